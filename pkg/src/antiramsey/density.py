"""Exact m2-density, 2-balancedness and the threshold exponent beta(H, S).

Everything here is rational arithmetic via :class:`fractions.Fraction`.

The maximum of ``(e(J)-1)/(v(J)-2)`` over subgraphs ``J`` with ``v(J) >= 3``
is computed over *induced* subgraphs only.  For a fixed vertex set the ratio
is increasing in the number of edges, so adding the missing induced edges
never lowers it; the restriction is therefore exact.  The test suite checks
this against an enumeration of every (vertex set, edge subset) pair.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .graphs import Graph, LabeledTwoGraph, amalgamate, make_book

MAX_EXACT_VERTICES = 22


@dataclass(frozen=True)
class DensityReport:
    value: Fraction
    witness: Graph
    witness_vertices: tuple[int, ...]
    two_balanced: bool

    def to_dict(self) -> dict:
        return {
            "m2": str(self.value),
            "witness_vertices": list(self.witness_vertices),
            "witness_edges": [list(e) for e in self.witness.edges],
            "two_balanced": self.two_balanced,
        }


def _ratio(e: int, v: int) -> Fraction:
    return Fraction(e - 1, v - 2)


def m2_density(h: Graph) -> DensityReport:
    """Exact m2-density with a canonical witness.

    Ties between maximising subgraphs go to fewest vertices, then fewest
    edges, then the lexicographically smallest edge list.
    """
    n = h.n
    if n < 3:
        raise ValueError("m2-density needs at least 3 vertices")
    if h.e < 1:
        raise ValueError("m2-density needs at least one edge")
    if n > MAX_EXACT_VERTICES:
        raise ValueError(f"exact m2 limited to {MAX_EXACT_VERTICES} vertices")
    nbmask = [0] * n
    for u, v in h.edges:
        nbmask[u] |= 1 << v
        nbmask[v] |= 1 << u

    # induced edge counts for every vertex subset, built from the lowest set bit
    size = 1 << n
    ecount = [0] * size
    best: Optional[Fraction] = None
    best_key = None
    for mask in range(1, size):
        low = mask & -mask
        x = low.bit_length() - 1
        rest = mask ^ low
        ecount[mask] = ecount[rest] + (nbmask[x] & rest).bit_count()
        v = mask.bit_count()
        if v < 3:
            continue
        r = _ratio(ecount[mask], v)
        if best is None or r > best:
            best, best_key = r, [(v, ecount[mask], mask)]
        elif r == best:
            best_key.append((v, ecount[mask], mask))

    def tiebreak(item):
        v, e, mask = item
        verts = [x for x in range(n) if mask >> x & 1]
        vs = set(verts)
        edges = [ed for ed in h.edges if ed[0] in vs and ed[1] in vs]
        return (v, e, edges)

    _, _, wmask = min(best_key, key=tiebreak)
    wverts = tuple(x for x in range(n) if wmask >> x & 1)
    whole = _ratio(h.e, n)
    return DensityReport(best, h.induced(wverts), wverts, whole == best)


def is_two_balanced(s: Graph) -> bool:
    return m2_density(s).two_balanced


def beta(h: Graph, s: Graph) -> Fraction:
    """Exponent ``(v(S) - 2 + 1/m2(H)) / e(S)``."""
    if s.n < 3 or s.e < 1:
        raise ValueError("S must have at least 3 vertices and one edge")
    m2h = m2_density(h).value
    return (s.n - 2 + 1 / m2h) / s.e


@dataclass
class HypothesisReport:
    m2_h: Fraction
    m2_f: Fraction
    m2_s: Fraction
    h_above_one: bool
    h_below_f: bool
    s_two_balanced: bool
    s_arrows_f: str  # "holds" | "fails" | "unknown" | "skipped"
    beta: Optional[Fraction] = None
    notes: list[str] = field(default_factory=list)

    @property
    def density_hypotheses_hold(self) -> bool:
        return self.h_above_one and self.h_below_f and self.s_two_balanced

    @property
    def all_hold(self) -> bool:
        return self.density_hypotheses_hold and self.s_arrows_f == "holds"

    def to_dict(self) -> dict:
        return {
            "m2_H": str(self.m2_h),
            "m2_F": str(self.m2_f),
            "m2_S": str(self.m2_s),
            "m2_H_above_1": self.h_above_one,
            "m2_H_below_m2_F": self.h_below_f,
            "S_two_balanced": self.s_two_balanced,
            "S_arrows_F": self.s_arrows_f,
            "beta": None if self.beta is None else str(self.beta),
            "density_hypotheses_hold": self.density_hypotheses_hold,
            "all_hold": self.all_hold,
            "notes": self.notes,
        }


def check_theorem_hypotheses(
    f: LabeledTwoGraph,
    h: LabeledTwoGraph,
    s: Graph,
    arrows_budget: Optional[int] = 1_000_000,
) -> HypothesisReport:
    """Check ``1 < m2(H) < m2(F)``, S 2-balanced, and decide ``S ->rb F``.

    ``arrows_budget=None`` runs the arrows search without a node limit;
    ``arrows_budget=0`` skips it.
    """
    m2h = m2_density(h.graph).value
    m2f = m2_density(f.graph).value
    rs = m2_density(s)
    rep = HypothesisReport(
        m2_h=m2h,
        m2_f=m2f,
        m2_s=rs.value,
        h_above_one=m2h > 1,
        h_below_f=m2h < m2f,
        s_two_balanced=rs.two_balanced,
        s_arrows_f="skipped",
        beta=beta(h.graph, s),
    )
    if arrows_budget == 0:
        rep.notes.append("S ->rb F not checked")
        return rep
    from .rainbow import arrows_rainbow

    res = arrows_rainbow(s, f.graph, budget=arrows_budget)
    rep.s_arrows_f = res.verdict
    return rep


@dataclass(frozen=True)
class CorollaryGap:
    t: int
    m2_h: Fraction
    beta_value: Fraction
    half: Fraction
    m2_amalgam: Fraction
    m2_amalgam_reciprocal: Fraction
    beta_above_half: bool
    reciprocal_at_most_half: bool
    strict_gap: bool

    def to_dict(self) -> dict:
        return {
            "t": self.t,
            "m2_H": str(self.m2_h),
            "beta": str(self.beta_value),
            "half": str(self.half),
            "m2_amalgam": str(self.m2_amalgam),
            "m2_amalgam_reciprocal": str(self.m2_amalgam_reciprocal),
            "beta_above_half": self.beta_above_half,
            "reciprocal_at_most_half": self.reciprocal_at_most_half,
            "strict_gap": self.strict_gap,
        }


def check_corollary_gap(h: Graph | LabeledTwoGraph, t: int) -> CorollaryGap:
    """Compare beta(H, B_{3t-2}) with 1/m2(B_t + H) for H with 1 < m2(H) < 2.

    ``h`` given as a plain graph is rooted at its edge ``(0, 1)``.
    """
    if t < 1:
        raise ValueError("t must be >= 1")
    lh = h if isinstance(h, LabeledTwoGraph) else LabeledTwoGraph(h, (0, 1))
    m2h = m2_density(lh.graph).value
    if not (1 < m2h < 2):
        raise ValueError(f"need 1 < m2(H) < 2, got {m2h}")
    b = beta(lh.graph, make_book(3 * t - 2))
    amalg = amalgamate(LabeledTwoGraph(make_book(t), (0, 1)), lh)
    m2a = m2_density(amalg).value
    half = Fraction(1, 2)
    return CorollaryGap(
        t=t,
        m2_h=m2h,
        beta_value=b,
        half=half,
        m2_amalgam=m2a,
        m2_amalgam_reciprocal=1 / m2a,
        beta_above_half=b > half,
        reciprocal_at_most_half=1 / m2a <= half,
        strict_gap=b > 1 / m2a,
    )
