"""Nested-lattice primitives and a desk-scale compute-and-forward round trip.

Lattices are represented by full-rank real generator matrices (columns are
basis vectors). The instances exercised here are small: scaled-integer
chains like Z / 4Z / 8Z, for which the nearest-point search is exact
coordinate-wise rounding. General generators fall back to a windowed exact
search in dimension <= 2 and Babai rounding above that.

Voronoi boundary ties are resolved deterministically: the quantizer picks
the lexicographically smallest of the equidistant lattice points, and the
codebook enumeration elects the lexicographically smallest member of each
boundary coset. Determinism matters more than the particular choice; every
mod-arithmetic identity used downstream is invariant to it.
"""

from dataclasses import dataclass
import itertools
import math
from typing import NamedTuple

import numpy as np

from .errors import DimensionError, NestingError

_TIE_RTOL = 1e-12


@dataclass(frozen=True)
class Lattice:
    """A full-rank lattice {G k : k integer vector}."""
    generator: np.ndarray

    def __post_init__(self):
        g = np.atleast_2d(np.asarray(self.generator, dtype=float))
        if g.ndim != 2 or g.shape[0] != g.shape[1]:
            raise DimensionError(f"generator must be square, got shape {g.shape}")
        if not np.all(np.isfinite(g)) or np.linalg.cond(g) > 1e12:
            raise DimensionError("generator must be finite and well conditioned")
        object.__setattr__(self, "generator", g)

    @property
    def dimension(self) -> int:
        return self.generator.shape[0]

    @property
    def volume(self) -> float:
        """Covolume |det G| = volume of any fundamental domain."""
        return abs(float(np.linalg.det(self.generator)))

    def is_diagonal(self) -> bool:
        g = self.generator
        return np.count_nonzero(g - np.diag(np.diagonal(g))) == 0


def scaled_integers(scale: float, dim: int = 1) -> Lattice:
    """The lattice scale * Z^dim."""
    return Lattice(scale * np.eye(dim))


def _lex_less(a, b) -> bool:
    for x, y in zip(a, b):
        if x < y - 1e-15:
            return True
        if x > y + 1e-15:
            return False
    return False


def _quantize_diagonal(diag, p):
    """Exact per-coordinate rounding; halves go to the smaller lattice point."""
    x = p / diag
    k_down = np.ceil(x - 0.5)   # half rounds down: smaller point when diag > 0
    k_up = np.floor(x + 0.5)    # half rounds up: smaller point when diag < 0
    k = np.where(diag > 0, k_down, k_up)
    return k * diag


def quantize(lat: Lattice, p) -> np.ndarray:
    """Nearest lattice point to p, ties to the lexicographically smaller point."""
    p = np.asarray(p, dtype=float).reshape(-1)
    n = lat.dimension
    if p.shape[0] != n:
        raise DimensionError(f"point dimension {p.shape[0]} != lattice dimension {n}")
    g = lat.generator
    if lat.is_diagonal():
        return _quantize_diagonal(np.diagonal(g), p)
    coords = np.linalg.solve(g, p)
    base = np.round(coords).astype(int)
    if n > 2:
        return g @ base  # Babai rounding; exact only for near-orthogonal bases
    best = None
    best_d2 = np.inf
    for offs in itertools.product(range(-3, 4), repeat=n):
        cand = g @ (base + np.asarray(offs))
        d2 = float(np.sum((p - cand) ** 2))
        if d2 < best_d2 * (1 - _TIE_RTOL) or best is None:
            best, best_d2 = cand, d2
        elif d2 <= best_d2 * (1 + _TIE_RTOL) and _lex_less(cand, best):
            best = cand
    return best


def mod_lattice(lat: Lattice, p) -> np.ndarray:
    """p mod the lattice: the representative p - Q(p) in the Voronoi region."""
    p = np.asarray(p, dtype=float).reshape(-1)
    return p - quantize(lat, p)


def _mod_many(lat: Lattice, pts: np.ndarray) -> np.ndarray:
    if lat.is_diagonal():
        diag = np.diagonal(lat.generator)
        x = pts / diag
        k = np.where(diag > 0, np.ceil(x - 0.5), np.floor(x + 0.5))
        return pts - k * diag
    return np.stack([mod_lattice(lat, p) for p in pts])


class SecondMomentEstimate(NamedTuple):
    value: float
    stderr: float


def second_moment(lat: Lattice, samples: int, seed: int = 0) -> SecondMomentEstimate:
    """Monte Carlo estimate of the per-dimension second moment sigma^2.

    Uniform samples over the centered fundamental parallelepiped are folded
    into the Voronoi region by the mod map (a measure-preserving bijection
    between the two fundamental domains), then ||v||^2 / n is averaged.
    """
    if samples < 1000:
        raise ValueError(f"need at least 1000 samples, got {samples}")
    n = lat.dimension
    rng = np.random.default_rng(seed)
    unit = rng.random((samples, n)) - 0.5
    pts = unit @ lat.generator.T
    v = _mod_many(lat, pts)
    vals = np.sum(v * v, axis=1) / n
    est = float(np.mean(vals))
    err = float(np.std(vals, ddof=1) / math.sqrt(samples))
    return SecondMomentEstimate(est, err)


@dataclass(frozen=True)
class NestedChain:
    """Doubly nested chain: coarse subset of mid subset of fine."""
    fine: Lattice
    mid: Lattice
    coarse: Lattice

    def __post_init__(self):
        _check_nested(self.mid, self.fine, "mid in fine")
        _check_nested(self.coarse, self.mid, "coarse in mid")


def _check_nested(sub: Lattice, sup: Lattice, what: str):
    """Every generator column of the coarser lattice must have integer
    coordinates in the finer one."""
    if sub.dimension != sup.dimension:
        raise NestingError(f"{what}: dimension mismatch")
    coords = np.linalg.solve(sup.generator, sub.generator)
    if np.max(np.abs(coords - np.round(coords))) > 1e-9:
        raise NestingError(f"{what}: subset relation violated")


@dataclass(frozen=True)
class CodebookEntry:
    point: np.ndarray
    index: int


def enumerate_codebook(fine: Lattice, shaping: Lattice) -> list:
    """All fine-lattice points inside the Voronoi region of the shaping lattice.

    Entries are one representative per coset of the shaping lattice, in
    lexicographic order, with boundary cosets resolved to their
    lexicographically smallest closed-Voronoi member. The count must equal
    the covolume ratio.
    """
    _check_nested(shaping, fine, "shaping in fine")
    n = fine.dimension
    size_f = fine.volume
    size_s = shaping.volume
    expected = size_s / size_f
    if abs(expected - round(expected)) > 1e-6:
        raise NestingError(f"covolume ratio {expected} is not an integer")
    expected = int(round(expected))

    # Candidate fine points: integer coordinates covering an inflated shaping cell.
    corners = np.asarray(list(itertools.product([-1.5, 1.5], repeat=n)))
    pts = corners @ shaping.generator.T
    coords = np.linalg.solve(fine.generator, pts.T).T
    lo = np.floor(coords.min(axis=0)).astype(int) - 1
    hi = np.ceil(coords.max(axis=0)).astype(int) + 1

    # Shaping points near the origin, for the closed-Voronoi membership test.
    near = [shaping.generator @ np.asarray(k)
            for k in itertools.product(range(-2, 3), repeat=n)
            if any(k)]

    members = []
    for k in itertools.product(*[range(a, b + 1) for a, b in zip(lo, hi)]):
        p = fine.generator @ np.asarray(k, dtype=float)
        d0 = float(np.sum(p * p))
        scale = max(1.0, d0)
        if all(d0 <= float(np.sum((p - lam) ** 2)) + _TIE_RTOL * scale for lam in near):
            members.append(p)

    # Group by coset of the shaping lattice; keep the lexicographic minimum.
    chosen = []
    for p in members:
        placed = False
        for idx, q in enumerate(chosen):
            diff = np.linalg.solve(shaping.generator, p - q)
            if np.max(np.abs(diff - np.round(diff))) < 1e-9:
                if _lex_less(p, q):
                    chosen[idx] = p
                placed = True
                break
        if not placed:
            chosen.append(p)

    if len(chosen) != expected:
        raise NestingError(f"enumerated {len(chosen)} codewords, expected {expected}; "
                           "enumeration window too small or nesting inconsistent")
    chosen.sort(key=lambda p: tuple(p))
    return [CodebookEntry(point=p, index=i) for i, p in enumerate(chosen)]


def mmse_alpha(p1g1: float, p2g2: float, sigma2: float) -> float:
    """Scaling that minimizes the effective noise before lattice quantization.

    alpha = S / (S + sigma^2) with S the total received signal power
    P_1 |g h_1|^2 + P_2 |g h_2|^2.
    """
    if p1g1 < 0 or p2g2 < 0 or sigma2 < 0:
        raise ValueError("powers must be nonnegative")
    s = p1g1 + p2g2
    if s + sigma2 <= 0:
        raise ValueError("all-zero input: MMSE coefficient undefined")
    return s / (s + sigma2)


def cof_roundtrip(chain: NestedChain, w1, w2, u1, u2,
                  p1g1: float, p2g2: float, sigma2: float,
                  noise=None):
    """One compute-and-forward exchange in the lattice domain.

    User 1 shapes with the coarse lattice, user 2 with the mid lattice. The
    relay target is t = [w1 + w2 - Q_mid(w2 + u2)] mod coarse; the decode path
    computes (alpha * sum_i (w_i + u_i mod shaping_i) + alpha * noise
    - sum_i u_i) mod coarse. Noiseless with alpha = 1 the two sides agree
    exactly, dithered or not.

    Returns (t_expected, t_decoded).
    """
    n = chain.fine.dimension
    w1, w2, u1, u2 = (np.asarray(v, dtype=float).reshape(-1) for v in (w1, w2, u1, u2))
    for name, v in (("w1", w1), ("w2", w2), ("u1", u1), ("u2", u2)):
        if v.shape[0] != n:
            raise DimensionError(f"{name} has dimension {v.shape[0]}, lattice has {n}")
    if noise is None:
        noise = np.zeros(n)
    noise = np.asarray(noise, dtype=float).reshape(-1)
    if noise.shape[0] != n:
        raise DimensionError("noise dimension mismatch")

    alpha = mmse_alpha(p1g1, p2g2, sigma2)
    t_expected = mod_lattice(chain.coarse, w1 + w2 - quantize(chain.mid, w2 + u2))
    x1 = mod_lattice(chain.coarse, w1 + u1)
    x2 = mod_lattice(chain.mid, w2 + u2)
    y = alpha * (x1 + x2) + alpha * noise - u1 - u2
    t_decoded = mod_lattice(chain.coarse, y)
    return t_expected, t_decoded
