import itertools

import numpy as np
import pytest

from cofrelay import lattice
from cofrelay.errors import DimensionError, NestingError

Z = lattice.scaled_integers(1.0)
Z2 = lattice.scaled_integers(1.0, 2)
Z4 = lattice.scaled_integers(4.0)
Z8 = lattice.scaled_integers(8.0)
CHAIN = lattice.NestedChain(fine=Z, mid=Z4, coarse=Z8)


def brute_force_codebook_1d(fine_scale, shaping_scale):
    """Independent enumeration: integers inside the shaping Voronoi cell,
    boundary cosets resolved to the lexicographically smaller member."""
    half = shaping_scale / 2.0
    pts = []
    for k in np.arange(-2 * shaping_scale, 2 * shaping_scale + 1, fine_scale):
        if -half <= k < half:
            pts.append(float(k))
        elif k == half:  # the +boundary point loses to its -boundary twin
            pts.append(-half)
    return sorted(set(pts))


class TestQuantize:
    def test_z2_rounding(self):
        assert np.array_equal(lattice.quantize(Z2, [0.4, -1.6]), [0.0, -2.0])

    def test_zero_vector(self):
        assert np.array_equal(lattice.quantize(Z4, [0.0]), [0.0])

    def test_nearest_multiple_of_four(self):
        assert np.array_equal(lattice.quantize(Z4, [1.0]), [0.0])

    def test_tie_goes_to_smaller_point(self):
        assert lattice.quantize(Z4, [2.0])[0] == 0.0
        assert lattice.quantize(Z4, [-2.0])[0] == -4.0
        assert lattice.quantize(Z8, [4.0])[0] == 0.0

    def test_general_generator_matches_diagonal(self):
        # a rotated Z^2 copy: exact windowed search must agree with the
        # rotation of the diagonal answer
        th = 0.3
        rot = np.array([[np.cos(th), -np.sin(th)], [np.sin(th), np.cos(th)]])
        lat = lattice.Lattice(rot)
        rng = np.random.default_rng(0)
        for _ in range(200):
            p = rng.uniform(-4, 4, 2)
            q = lattice.quantize(lat, p)
            expected = rot @ np.round(rot.T @ p)
            assert np.allclose(q, expected, atol=1e-12)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            lattice.quantize(Z2, [1.0])


class TestMod:
    def test_known_values(self):
        assert lattice.mod_lattice(Z, [2.7])[0] == pytest.approx(-0.3)
        assert lattice.mod_lattice(Z4, [8.0])[0] == 0.0
        assert lattice.mod_lattice(Z, [-0.3])[0] == pytest.approx(-0.3)

    def test_idempotent_and_periodic(self):
        rng = np.random.default_rng(1)
        pts = rng.uniform(-30, 30, size=(2000, 1))
        for p in pts:
            m = lattice.mod_lattice(Z4, p)
            assert np.array_equal(lattice.mod_lattice(Z4, m), m)
            shift = p + 4.0 * rng.integers(-5, 6)
            assert np.allclose(lattice.mod_lattice(Z4, shift), m, atol=1e-9)

    def test_quantize_plus_mod_identity(self):
        rng = np.random.default_rng(2)
        for _ in range(500):
            p = rng.uniform(-20, 20, 2)
            assert np.array_equal(lattice.quantize(Z2, p) + lattice.mod_lattice(Z2, p), p)


class TestSecondMoment:
    def test_unit_interval(self):
        est = lattice.second_moment(Z, 100000, seed=10)
        assert abs(est.value - 1.0 / 12.0) <= 3.0 * est.stderr

    def test_scaling(self):
        est = lattice.second_moment(Z4, 100000, seed=11)
        assert abs(est.value - 16.0 / 12.0) <= 3.0 * est.stderr

    def test_product_lattice_per_dimension(self):
        est = lattice.second_moment(Z2, 50000, seed=12)
        assert abs(est.value - 1.0 / 12.0) <= 3.0 * est.stderr

    def test_sample_floor(self):
        with pytest.raises(ValueError):
            lattice.second_moment(Z, 10)


class TestCodebook:
    def test_z_in_4z(self):
        expected = brute_force_codebook_1d(1.0, 4.0)
        assert expected == [-2.0, -1.0, 0.0, 1.0]  # frozen oracle output
        got = [e.point[0] for e in lattice.enumerate_codebook(Z, Z4)]
        assert got == expected

    def test_degenerate_nesting(self):
        cb = lattice.enumerate_codebook(Z, Z)
        assert len(cb) == 1 and cb[0].point[0] == 0.0

    def test_z2_in_2z2(self):
        # brute force over the square cell [-1, 1)^2 with boundary election
        shaping = lattice.scaled_integers(2.0, 2)
        members = []
        for k in itertools.product(range(-3, 4), repeat=2):
            p = np.asarray(k, dtype=float)
            d0 = p @ p
            near = [np.asarray(v) * 2.0 for v in itertools.product(range(-2, 3), repeat=2)
                    if any(v)]
            if all(d0 <= (p - lam) @ (p - lam) + 1e-12 for lam in near):
                members.append(tuple(p))
        cosets = {}
        for p in members:
            key = tuple(np.mod(p, 2.0))
            cosets.setdefault(key, []).append(p)
        expected = sorted(min(v) for v in cosets.values())
        got = [tuple(e.point) for e in lattice.enumerate_codebook(Z2, shaping)]
        assert got == expected
        assert len(got) == 4

    def test_size_matches_covolume_ratio(self):
        for fine_s, shape_s in ((1.0, 3.0), (1.0, 5.0), (2.0, 8.0)):
            fine = lattice.scaled_integers(fine_s)
            shaping = lattice.scaled_integers(shape_s)
            cb = lattice.enumerate_codebook(fine, shaping)
            assert len(cb) == round(shaping.volume / fine.volume)
            assert [e.index for e in cb] == list(range(len(cb)))

    def test_nesting_violation(self):
        with pytest.raises(NestingError):
            lattice.enumerate_codebook(Z4, Z)  # 1Z is not a sublattice of 4Z


class TestChain:
    def test_valid_chain(self):
        lattice.NestedChain(fine=Z, mid=Z4, coarse=Z8)

    def test_broken_chain(self):
        with pytest.raises(NestingError):
            lattice.NestedChain(fine=Z, mid=lattice.scaled_integers(3.0),
                                coarse=lattice.scaled_integers(7.0))


class TestMmseAlpha:
    def test_values(self):
        assert lattice.mmse_alpha(1, 1, 2) == pytest.approx(0.5)
        assert lattice.mmse_alpha(5, 0, 0) == pytest.approx(1.0)
        assert lattice.mmse_alpha(3, 1, 1) == pytest.approx(0.8)

    def test_all_zero(self):
        with pytest.raises(ValueError):
            lattice.mmse_alpha(0, 0, 0)

    def test_negative(self):
        with pytest.raises(ValueError):
            lattice.mmse_alpha(-1, 1, 1)


class TestCofRoundtrip:
    def test_hand_evaluated_case(self):
        # t = (3 + 1 - Q_{4Z}(1)) mod 8Z = 4 mod 8Z = 4
        te, td = lattice.cof_roundtrip(CHAIN, [3], [1], [0], [0], 1.0, 1.0, 0.0)
        assert te[0] == 4.0 and td[0] == 4.0

    def test_zero_codewords(self):
        te, td = lattice.cof_roundtrip(CHAIN, [0], [0], [0], [0], 1.0, 1.0, 0.0)
        assert te[0] == 0.0 and td[0] == 0.0

    def test_dither_invariance(self):
        te, td = lattice.cof_roundtrip(CHAIN, [3], [1], [0], [0.5], 1.0, 1.0, 0.0)
        assert np.allclose(te, td, atol=1e-12)

    def test_exhaustive_noiseless(self):
        cb1 = lattice.enumerate_codebook(Z, Z8)
        cb2 = lattice.enumerate_codebook(Z, Z4)
        assert len(cb1) * len(cb2) == 32
        rng = np.random.default_rng(3)
        for e1 in cb1:
            for e2 in cb2:
                te, td = lattice.cof_roundtrip(CHAIN, e1.point, e2.point,
                                               [0.0], [0.0], 1.0, 1.0, 0.0)
                assert np.allclose(te, td, atol=1e-9)
                u1 = lattice.mod_lattice(Z8, rng.uniform(-8, 8, 1))
                u2 = lattice.mod_lattice(Z4, rng.uniform(-4, 4, 1))
                te, td = lattice.cof_roundtrip(CHAIN, e1.point, e2.point,
                                               u1, u2, 1.0, 1.0, 0.0)
                assert np.allclose(te, td, atol=1e-9)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            lattice.cof_roundtrip(CHAIN, [3, 1], [1], [0], [0], 1.0, 1.0, 0.0)
