"""Exact construction of the A/B/C/D/E root systems.

Coordinates are ambient Euclidean coordinates scaled by a global factor of 2
and stored as integers, so the half-integer entries of the E series stay
exact.  The normalized bilinear form fixes every long root at squared length
2; for the C family that requires a 1/2 scale on the raw dot product.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Optional

from .errors import DimensionMismatch, UnsupportedFamily

SUPPORTED_RANKS = {
    "A": range(1, 9),
    "B": range(2, 9),
    "C": range(3, 9),
    "D": range(4, 9),
    "E": (6, 7, 8),
}


@dataclass(frozen=True, order=True)
class RootVector:
    """A root in scaled integer coordinates (2x the ambient coordinates)."""

    coords: tuple[int, ...]

    @property
    def ambient_dim(self) -> int:
        return len(self.coords)

    def __add__(self, other: "RootVector") -> "RootVector":
        if len(self.coords) != len(other.coords):
            raise DimensionMismatch("ambient dimensions differ")
        return RootVector(tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other: "RootVector") -> "RootVector":
        if len(self.coords) != len(other.coords):
            raise DimensionMismatch("ambient dimensions differ")
        return RootVector(tuple(a - b for a, b in zip(self.coords, other.coords)))

    def __neg__(self) -> "RootVector":
        return RootVector(tuple(-a for a in self.coords))

    def scale(self, k: int) -> "RootVector":
        return RootVector(tuple(k * a for a in self.coords))

    def unscaled(self) -> tuple[Fraction, ...]:
        """Ambient coordinates as exact rationals."""
        return tuple(Fraction(c, 2) for c in self.coords)

    def __repr__(self) -> str:
        return f"RootVector({self.coords})"


def _dot_scaled(x: RootVector, y: RootVector) -> int:
    return sum(a * b for a, b in zip(x.coords, y.coords))


@dataclass(frozen=True)
class RootSystem:
    """Finite crystallographic root system with exact arithmetic."""

    family: str
    rank: int
    ambient_dim: int
    norm_scale: Fraction
    roots: tuple[RootVector, ...]
    positives: tuple[RootVector, ...]
    simples: tuple[RootVector, ...]
    # coefficients of each root over the simple roots, by root
    expansions: dict[RootVector, tuple[int, ...]] = field(repr=False)
    _root_set: frozenset[RootVector] = field(repr=False)
    _positive_set: frozenset[RootVector] = field(repr=False)

    @property
    def name(self) -> str:
        return f"{self.family}{self.rank}"

    def contains(self, x: RootVector) -> bool:
        return x in self._root_set

    def is_positive(self, x: RootVector) -> bool:
        return x in self._positive_set

    def height(self, x: RootVector) -> int:
        return sum(self.expansions[x])

    def to_json_dict(self) -> dict:
        scale = self.norm_scale
        return {
            "family": self.family,
            "rank": self.rank,
            "scale": str(scale) if scale.denominator != 1 else str(scale.numerator),
            "simples": [list(s.coords) for s in self.simples],
            "positives": [list(p.coords) for p in self.positives],
        }


def _check_supported(family: str, rank: int) -> None:
    fam = family.upper()
    if fam not in SUPPORTED_RANKS:
        raise UnsupportedFamily(f"family {family!r} is not supported")
    if rank not in SUPPORTED_RANKS[fam]:
        raise UnsupportedFamily(f"{fam}_{rank} is outside the supported range")


def _basis_vector(dim: int, i: int, value: int) -> list[int]:
    v = [0] * dim
    v[i] = value
    return v


def _enumerate_scaled_roots(family: str, rank: int) -> tuple[int, list[RootVector]]:
    """Return (ambient_dim, all roots) in scaled integer coordinates."""
    out: list[tuple[int, ...]] = []
    if family == "A":
        dim = rank + 1
        for i, j in itertools.permutations(range(dim), 2):
            v = [0] * dim
            v[i], v[j] = 2, -2
            out.append(tuple(v))
    elif family in ("B", "C", "D"):
        dim = rank
        for i, j in itertools.combinations(range(dim), 2):
            for si, sj in itertools.product((2, -2), repeat=2):
                v = [0] * dim
                v[i], v[j] = si, sj
                out.append(tuple(v))
        if family == "B":
            for i in range(dim):
                out.append(tuple(_basis_vector(dim, i, 2)))
                out.append(tuple(_basis_vector(dim, i, -2)))
        elif family == "C":
            for i in range(dim):
                out.append(tuple(_basis_vector(dim, i, 4)))
                out.append(tuple(_basis_vector(dim, i, -4)))
    elif family == "E":
        dim = 8
        for i, j in itertools.combinations(range(8), 2):
            for si, sj in itertools.product((2, -2), repeat=2):
                v = [0] * 8
                v[i], v[j] = si, sj
                out.append(tuple(v))
        for signs in itertools.product((1, -1), repeat=8):
            if signs.count(-1) % 2 == 0:
                out.append(signs)
    else:  # pragma: no cover - guarded by _check_supported
        raise UnsupportedFamily(family)
    return dim, [RootVector(v) for v in out]


def _simple_roots(family: str, rank: int, dim: int) -> list[RootVector]:
    simples: list[list[int]] = []
    if family == "A":
        for i in range(rank):
            v = [0] * dim
            v[i], v[i + 1] = 2, -2
            simples.append(v)
    elif family in ("B", "C", "D"):
        for i in range(rank - 1):
            v = [0] * dim
            v[i], v[i + 1] = 2, -2
            simples.append(v)
        v = [0] * dim
        if family == "B":
            v[rank - 1] = 2
        elif family == "C":
            v[rank - 1] = 4
        else:
            v[rank - 2], v[rank - 1] = 2, 2
        simples.append(v)
    elif family == "E":
        # Standard reference-table ordering in 8 ambient coordinates.
        simples.append([1, -1, -1, -1, -1, -1, -1, 1])
        simples.append([2, 2, 0, 0, 0, 0, 0, 0])
        for i in range(rank - 2):
            v = [0] * 8
            v[i], v[i + 1] = -2, 2
            simples.append(v)
    return [RootVector(tuple(v)) for v in simples]


def _expansion_solver(simples: list[RootVector]):
    """Exact least-squares solver c with sum_j c_j * simple_j = root."""
    cols = [s.coords for s in simples]
    k = len(cols)
    gram = [[sum(Fraction(a * b) for a, b in zip(cols[i], cols[j])) for j in range(k)] for i in range(k)]
    inv = _invert_fraction_matrix(gram)

    def solve(root: RootVector) -> tuple[int, ...]:
        rhs = [sum(Fraction(c * x) for c, x in zip(col, root.coords)) for col in cols]
        coeffs = [sum(inv[i][j] * rhs[j] for j in range(k)) for i in range(k)]
        out = []
        for c in coeffs:
            if c.denominator != 1:
                raise ValueError(f"non-integral expansion for {root}: {coeffs}")
            out.append(int(c))
        # confirm the expansion reproduces the root (span membership)
        recon = [0] * root.ambient_dim
        for c, s in zip(out, simples):
            for i, x in enumerate(s.coords):
                recon[i] += c * x
        if tuple(recon) != root.coords:
            raise ValueError(f"{root} is outside the simple-root span")
        return tuple(out)

    return solve


def _invert_fraction_matrix(m: list[list[Fraction]]) -> list[list[Fraction]]:
    n = len(m)
    aug = [[Fraction(m[i][j]) for j in range(n)] + [Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    for col in range(n):
        piv = next(r for r in range(col, n) if aug[r][col] != 0)
        aug[col], aug[piv] = aug[piv], aug[col]
        inv_p = Fraction(1) / aug[col][col]
        aug[col] = [x * inv_p for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[col])]
    return [row[n:] for row in aug]


@lru_cache(maxsize=None)
def build_root_system(family: str, rank: int) -> RootSystem:
    """Construct the root system for a supported family/rank pair."""
    fam = family.upper()
    _check_supported(fam, rank)
    dim, roots = _enumerate_scaled_roots(fam, rank)
    simples = _simple_roots(fam, rank, dim)
    if fam == "E" and rank < 8:
        # Restrict the rank-8 enumeration to the span of the leading simples.
        full_solver = _expansion_solver(_simple_roots("E", 8, 8))
        keep = []
        for r in roots:
            coeffs = full_solver(r)
            if all(c == 0 for c in coeffs[rank:]):
                keep.append(r)
        roots = keep
    solver = _expansion_solver(simples)
    expansions = {r: solver(r) for r in roots}
    for r, coeffs in expansions.items():
        pos, neg = any(c > 0 for c in coeffs), any(c < 0 for c in coeffs)
        if pos and neg:
            raise ValueError(f"mixed-sign expansion for {r}; bad simple roots")
    positives = [r for r in roots if sum(expansions[r]) > 0]
    norm_scale = Fraction(1, 2) if fam == "C" else Fraction(1)
    roots_sorted = tuple(sorted(roots))
    return RootSystem(
        family=fam,
        rank=rank,
        ambient_dim=dim,
        norm_scale=norm_scale,
        roots=roots_sorted,
        positives=tuple(sorted(positives)),
        simples=tuple(simples),
        expansions=expansions,
        _root_set=frozenset(roots),
        _positive_set=frozenset(positives),
    )


def inner(sys: RootSystem, x: RootVector, y: RootVector) -> Fraction:
    """Normalized inner product; long roots have (x, x) = 2."""
    if x.ambient_dim != sys.ambient_dim or y.ambient_dim != sys.ambient_dim:
        raise DimensionMismatch("vector does not match the system's ambient space")
    return sys.norm_scale * Fraction(_dot_scaled(x, y), 4)


def is_root(sys: RootSystem, x: RootVector) -> bool:
    return sys.contains(x)


def add(sys: RootSystem, x: RootVector, y: RootVector) -> Optional[RootVector]:
    """Sum of two vectors when it is again a root, else None."""
    s = x + y
    return s if sys.contains(s) else None


def precedes(sys: RootSystem, alpha: RootVector, delta: RootVector) -> bool:
    """The non-partial ordering: alpha < delta iff delta - alpha is positive."""
    return sys.is_positive(delta - alpha)


def is_long(sys: RootSystem, alpha: RootVector) -> bool:
    return inner(sys, alpha, alpha) == 2


def long_roots(sys: RootSystem) -> tuple[RootVector, ...]:
    return tuple(r for r in sys.roots if is_long(sys, r))


def reflect(sys: RootSystem, beta: RootVector, alpha: RootVector) -> RootVector:
    """Reflection of beta through the hyperplane orthogonal to alpha."""
    num = 2 * inner(sys, beta, alpha) / inner(sys, alpha, alpha)
    if num.denominator != 1:
        raise ValueError("non-integral Cartan coefficient; inputs are not roots")
    result = beta - alpha.scale(int(num))
    if not sys.contains(result):
        raise ValueError(f"reflection left the root set: {result}")
    return result


def long_orbit_is_transitive(sys: RootSystem) -> bool:
    """Whether reflections generate a single orbit on the long roots."""
    longs = set(long_roots(sys))
    start = next(iter(sorted(longs)))
    orbit = {start}
    frontier = [start]
    while frontier:
        current = frontier.pop()
        for s in sys.simples:
            image = reflect(sys, current, s)
            if image in longs and image not in orbit:
                orbit.add(image)
                frontier.append(image)
    return orbit == longs


def w_set(sys: RootSystem, delta: RootVector) -> frozenset[RootVector]:
    """All roots alpha such that delta - alpha is again a root."""
    return frozenset(a for a in sys.roots if sys.contains(delta - a))


def w_pairs(sys: RootSystem, delta: RootVector) -> frozenset[frozenset[RootVector]]:
    """Unordered root pairs {alpha, beta} with alpha + beta = delta."""
    return frozenset(frozenset((a, delta - a)) for a in w_set(sys, delta))


def w_pair_count(sys: RootSystem, delta: RootVector) -> int:
    return len(w_pairs(sys, delta))
