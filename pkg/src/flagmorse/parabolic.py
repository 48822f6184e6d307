"""Painted diagrams and the resulting isotropy/tangent root split."""

from __future__ import annotations

from dataclasses import dataclass, field

from .rootsys import RootSystem, RootVector


@dataclass(frozen=True)
class PaintedDiagram:
    """A subset of simple-root indices (0-based) marked as painted."""

    sys: RootSystem
    sigma_k: frozenset[int]

    def __post_init__(self):
        bad = [i for i in self.sigma_k if not 0 <= i < self.sys.rank]
        if bad:
            raise ValueError(f"painted indices out of range: {bad}")

    @staticmethod
    def of(sys: RootSystem, indices) -> "PaintedDiagram":
        indices = tuple(indices)
        if len(indices) != len(set(indices)):
            raise ValueError(f"duplicate painted indices: {indices}")
        return PaintedDiagram(sys, frozenset(indices))

    def render(self) -> str:
        return "".join("x" if i in self.sigma_k else "o" for i in range(self.sys.rank))


@dataclass(frozen=True)
class ParabolicSplit:
    """Roots split into the painted span and its complement."""

    sys: RootSystem
    sigma_k: frozenset[int]
    delta_k: frozenset[RootVector]
    delta_k_pos: frozenset[RootVector]
    delta_m_pos: frozenset[RootVector]
    m_pos_sorted: tuple[RootVector, ...] = field(repr=False)
    k_pos_sorted: tuple[RootVector, ...] = field(repr=False)

    @property
    def v(self) -> int:
        return len(self.delta_m_pos)

    def in_k(self, root: RootVector) -> bool:
        return root in self.delta_k

    def in_m_pos(self, root: RootVector) -> bool:
        return root in self.delta_m_pos

    def to_json_dict(self) -> dict:
        return {
            "family": self.sys.family,
            "rank": self.sys.rank,
            "painted": sorted(self.sigma_k),
            "diagram": PaintedDiagram(self.sys, self.sigma_k).render(),
            "delta_k": [list(r.coords) for r in sorted(self.delta_k)],
            "delta_m_pos": [list(r.coords) for r in self.m_pos_sorted],
            "v": self.v,
        }


def split(sys: RootSystem, painted: PaintedDiagram) -> ParabolicSplit:
    """Split the roots by span membership over the painted simples."""
    if painted.sys is not sys:
        raise ValueError("painted diagram belongs to a different system")
    sigma = painted.sigma_k
    delta_k = frozenset(
        r for r in sys.roots
        if all(c == 0 for i, c in enumerate(sys.expansions[r]) if i not in sigma)
    )
    k_pos = frozenset(r for r in delta_k if sys.is_positive(r))
    m_pos = frozenset(r for r in sys.positives if r not in delta_k)
    return ParabolicSplit(
        sys=sys,
        sigma_k=sigma,
        delta_k=delta_k,
        delta_k_pos=k_pos,
        delta_m_pos=m_pos,
        m_pos_sorted=tuple(sorted(m_pos, key=lambda r: (sys.height(r), r.coords))),
        k_pos_sorted=tuple(sorted(k_pos, key=lambda r: (sys.height(r), r.coords))),
    )


def borel_split(sys: RootSystem) -> ParabolicSplit:
    return split(sys, PaintedDiagram.of(sys, ()))


def verify_m_closure(sp: ParabolicSplit) -> list[tuple[RootVector, RootVector]]:
    """Counterexamples to: sums of tangent-positive roots avoid the painted span.

    Expected empty for every valid split.
    """
    sys = sp.sys
    bad = []
    for a in sp.m_pos_sorted:
        for b in sp.m_pos_sorted:
            s = a + b
            if sys.contains(s) and s in sp.delta_k:
                bad.append((a, b))
    return bad
