"""Pseudo-randomness checks for (color-class) graphs.

Subset-quantified properties (regularity, upper uniformity, discrepancy)
have an exact mode gated by instance size and a sampled mode that can only
ever find violations.  In each exact routine the inner quantifier is solved
in closed form (best ``V`` for a fixed ``U`` is a sorted prefix or the
positive part of a weight vector), so only one side is enumerated.

Walk conventions: an ``l``-circuit is a closed vertex sequence, so a single
unordered ``l``-cycle corresponds to ``2*l`` circuits.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence

import numpy as np

from .graphs import Graph
from .rainbow import ImproperColoring, ProperColoring, is_proper

REGULAR_EXACT_LIMIT = 26  # |U| + |V|
UPPER_UNIFORM_EXACT_LIMIT = 20  # v(G)
DISC_EXACT_LIMIT = 18  # v(G)
_CHUNK = 1 << 15
_TOL = 1e-12


class InstanceTooLarge(ValueError):
    pass


def _subset_masks(k: int, lo: int, hi: int) -> np.ndarray:
    """Boolean rows for integers ``lo..hi-1`` read as ``k``-bit masks."""
    ints = np.arange(lo, hi, dtype=np.int64)
    return ((ints[:, None] >> np.arange(k, dtype=np.int64)) & 1).astype(bool)


# ----------------------------------------------------------------------
# pair density

@dataclass(frozen=True)
class PairDensity:
    u_set: tuple[int, ...]
    v_set: tuple[int, ...]
    edges_across: int
    density: float


def _check_pair(u: Sequence[int], v: Sequence[int]) -> tuple[list[int], list[int]]:
    u, v = list(u), list(v)
    if not u or not v:
        raise ValueError("pair sets must be nonempty")
    if set(u) & set(v):
        raise ValueError("pair sets must be disjoint")
    return u, v


def pair_density(g: Graph, u: Sequence[int], v: Sequence[int]) -> PairDensity:
    u, v = _check_pair(u, v)
    vs = set(v)
    cnt = sum(1 for x in u for y in g.adj[x] if y in vs)
    return PairDensity(tuple(u), tuple(v), cnt, cnt / (len(u) * len(v)))


def _biadjacency(g: Graph, u: Sequence[int], v: Sequence[int]) -> np.ndarray:
    a = g.adjacency_matrix()
    return a[np.ix_(list(u), list(v))]


@dataclass
class Verdict:
    """Result of a subset-quantified check.

    ``holds`` is certified only when ``method == "exact"``; a sampled
    ``True`` means no violation was found in ``probes`` tries.
    """

    name: str
    holds: bool
    method: str
    probes: int = 0
    worst: float = 0.0
    bound: float = 0.0
    witness: Optional[dict] = None
    parameters: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)


def _min_size(frac: float, total: int) -> int:
    return max(1, math.ceil(frac * total - 1e-12))


def check_regular_pair(
    g: Graph,
    u: Sequence[int],
    v: Sequence[int],
    eps: float,
    p: float,
    mode: str = "exact",
    probes: int = 1000,
    seed: int = 0,
) -> Verdict:
    """Is ``g[U, V]`` (eps, p)-regular?

    Every ``U' ⊆ U, V' ⊆ V`` with ``|U'| >= eps|U|`` and ``|V'| >= eps|V|``
    must satisfy ``|d(U, V) - d(U', V')| <= eps * p``.
    """
    u, v = _check_pair(u, v)
    params = {"eps": eps, "p": p, "|U|": len(u), "|V|": len(v)}
    bound = eps * p
    b = _biadjacency(g, u, v)
    d0 = b.sum() / (len(u) * len(v))
    if mode == "exact":
        if len(u) + len(v) > REGULAR_EXACT_LIMIT:
            raise InstanceTooLarge(f"exact regularity needs |U|+|V| <= {REGULAR_EXACT_LIMIT}")
        left, right = (u, v) if len(u) <= len(v) else (v, u)
        bb = b if left is u else b.T
        a, c = len(left), len(right)
        lmin, rmin = _min_size(eps, a), _min_size(eps, c)
        worst, wit = 0.0, None
        ks = np.arange(1, c + 1)
        for lo in range(1, 1 << a, _CHUNK):
            hi = min(1 << a, lo + _CHUNK)
            m = _subset_masks(a, lo, hi)
            sz = m.sum(axis=1)
            ok = sz >= lmin
            if not ok.any():
                continue
            m, sz = m[ok], sz[ok]
            deg = m.astype(np.int64) @ bb  # degree of each right vertex into U'
            deg.sort(axis=1)
            low = np.cumsum(deg, axis=1)
            high = np.cumsum(deg[:, ::-1], axis=1)
            denom = sz[:, None] * ks[None, :]
            for arr in (low, high):
                dev = np.abs(arr / denom - d0)[:, rmin - 1:]
                idx = np.unravel_index(np.argmax(dev), dev.shape)
                if dev[idx] > worst:
                    worst = float(dev[idx])
                    row = np.flatnonzero(ok)[idx[0]] + lo
                    wit = {"left_mask": int(row), "right_size": int(idx[1] + rmin)}
        holds = worst <= bound + _TOL
        return Verdict("regular_pair", holds, "exact", 0, worst, bound, None if holds else wit, params)
    if mode != "sampled":
        raise ValueError(f"unknown mode {mode!r}")
    rng = np.random.default_rng(seed)
    umin, vmin = _min_size(eps, len(u)), _min_size(eps, len(v))
    worst, wit = 0.0, None
    for _ in range(probes):
        ku = int(rng.integers(umin, len(u) + 1))
        kv = int(rng.integers(vmin, len(v) + 1))
        su = rng.choice(len(u), ku, replace=False)
        sv = rng.choice(len(v), kv, replace=False)
        dev = abs(b[np.ix_(su, sv)].sum() / (ku * kv) - d0)
        if dev > worst:
            worst = float(dev)
            wit = {"U'": sorted(u[i] for i in su), "V'": sorted(v[i] for i in sv)}
    holds = worst <= bound + _TOL
    return Verdict("regular_pair", holds, "sampled", probes, worst, bound, None if holds else wit, params)


def check_upper_uniform(
    g: Graph, mu: float, p: float, mode: str = "exact", probes: int = 1000, seed: int = 0
) -> Verdict:
    """Is ``d(U, V) <= (1 + mu) p`` for all disjoint ``U, V`` of size at least ``mu * v(G)``?"""
    n = g.n
    params = {"mu": mu, "p": p, "n": n}
    bound = (1 + mu) * p
    kmin = _min_size(mu, n)
    if 2 * kmin > n:
        return Verdict("upper_uniform", True, "exact", 0, 0.0, bound, None, params)
    a = g.adjacency_matrix()
    if mode == "exact":
        if n > UPPER_UNIFORM_EXACT_LIMIT:
            raise InstanceTooLarge(f"exact upper uniformity needs v(G) <= {UPPER_UNIFORM_EXACT_LIMIT}")
        worst, wit = 0.0, None
        ks = np.arange(1, n + 1)
        for lo in range(1, 1 << n, _CHUNK):
            hi = min(1 << n, lo + _CHUNK)
            m = _subset_masks(n, lo, hi)
            sz = m.sum(axis=1)
            ok = (sz >= kmin) & (n - sz >= kmin)
            if not ok.any():
                continue
            m, sz = m[ok], sz[ok]
            deg = (m.astype(np.int64) @ a).astype(float)
            deg[m] = -np.inf  # V must avoid U
            deg = -np.sort(-deg, axis=1)
            top = np.cumsum(deg, axis=1)
            dens = top / (sz[:, None] * ks[None, :])
            room = (n - sz)[:, None] >= ks[None, :]
            valid = room & (ks[None, :] >= kmin)
            dens = np.where(valid, dens, -np.inf)
            idx = np.unravel_index(np.argmax(dens), dens.shape)
            if dens[idx] > worst:
                worst = float(dens[idx])
                wit = {"U_mask": int(np.flatnonzero(ok)[idx[0]] + lo), "V_size": int(idx[1] + 1)}
        holds = worst <= bound + _TOL
        return Verdict("upper_uniform", holds, "exact", 0, worst, bound, None if holds else wit, params)
    if mode != "sampled":
        raise ValueError(f"unknown mode {mode!r}")
    rng = np.random.default_rng(seed)
    worst, wit = 0.0, None
    for _ in range(probes):
        perm = rng.permutation(n)
        ku = int(rng.integers(kmin, n - kmin + 1))
        kv = int(rng.integers(kmin, n - ku + 1))
        su, sv = perm[:ku], perm[ku:ku + kv]
        dens = a[np.ix_(su, sv)].sum() / (ku * kv)
        if dens > worst:
            worst = float(dens)
            wit = {"U": sorted(su.tolist()), "V": sorted(sv.tolist())}
    holds = worst <= bound + _TOL
    return Verdict("upper_uniform", holds, "sampled", probes, worst, bound, None if holds else wit, params)


# ----------------------------------------------------------------------
# discrepancy

@dataclass(frozen=True)
class DiscEstimate:
    """Smallest ``eps`` for which DISC(eps) holds (exact), or a lower bound (sampled).

    ``e(U, V)`` counts ordered pairs ``(x, y)`` with ``x in U``, ``y in V``
    and ``xy`` an edge, so ``U`` and ``V`` may overlap.
    """

    value: float
    exact_value: Optional[Fraction]
    method: str
    probes: int
    u_mask: int

    def holds(self, eps: float) -> bool:
        if self.method != "exact":
            raise ValueError("a sampled estimate cannot certify DISC")
        return self.value <= eps + _TOL


def _disc_rows(a: np.ndarray, d: np.ndarray, vol: int, m: np.ndarray) -> np.ndarray:
    """Integer numerators ``vol * max_V |e(U,V) - vol(U)vol(V)/vol|`` per row of ``m``."""
    mi = m.astype(np.int64)
    volu = mi @ d
    w = vol * (mi @ a) - volu[:, None] * d[None, :]
    pos = np.where(w > 0, w, 0).sum(axis=1)
    neg = -np.where(w < 0, w, 0).sum(axis=1)
    return np.maximum(pos, neg)


def disc_discrepancy(g: Graph, mode: str = "exact", probes: int = 2000, seed: int = 0) -> DiscEstimate:
    """``max_{U,V} |e(U,V) - vol(U) vol(V) / vol(G)| / vol(G)``."""
    n = g.n
    a = g.adjacency_matrix()
    d = a.sum(axis=1)
    vol = int(d.sum())
    if vol == 0:
        raise ValueError("discrepancy undefined for a graph without edges")
    if mode == "exact":
        if n > DISC_EXACT_LIMIT:
            raise InstanceTooLarge(f"exact DISC needs v(G) <= {DISC_EXACT_LIMIT}")
        best, arg = 0, 0
        for lo in range(0, 1 << n, _CHUNK):
            hi = min(1 << n, lo + _CHUNK)
            vals = _disc_rows(a, d, vol, _subset_masks(n, lo, hi))
            i = int(np.argmax(vals))
            if vals[i] > best:
                best, arg = int(vals[i]), lo + i
        exact = Fraction(best, vol * vol)
        return DiscEstimate(float(exact), exact, "exact", 0, arg)
    if mode != "sampled":
        raise ValueError(f"unknown mode {mode!r}")
    rng = np.random.default_rng(seed)
    m = rng.random((probes, n)) < 0.5
    vals = _disc_rows(a, d, vol, m)
    i = int(np.argmax(vals))
    arg = int((m[i].astype(np.int64) << np.arange(n)).sum()) if n < 63 else -1
    return DiscEstimate(int(vals[i]) / (vol * vol), None, "sampled", probes, arg)


def has_disc(g: Graph, eps: float) -> bool:
    return disc_discrepancy(g, "exact").holds(eps)


# ----------------------------------------------------------------------
# circuits and cycles

def _walk_spectrum(g: Graph) -> np.ndarray:
    d = np.asarray(g.degrees, dtype=float)
    keep = d > 0
    if not keep.all():
        warnings.warn(
            f"{int((~keep).sum())} isolated vertices excluded from the circuit weight sum",
            stacklevel=3,
        )
    a = g.adjacency_matrix(dtype=float)[np.ix_(keep, keep)]
    s = 1.0 / np.sqrt(d[keep])
    return np.linalg.eigvalsh(a * s[:, None] * s[None, :])


def circuit_weight_sum(g: Graph, ell: int) -> float:
    """Sum over ``ell``-circuits of the product of ``1/deg`` along the circuit.

    Equals the trace of the ``ell``-th power of the random-walk matrix,
    evaluated through the spectrum of ``D^-1/2 A D^-1/2``.
    """
    if ell < 2:
        raise ValueError("circuit length must be >= 2")
    if g.e == 0:
        raise ValueError("circuit weights need at least one edge")
    lam = _walk_spectrum(g)
    return math.fsum((lam ** ell).tolist())


def check_circuit_property(g: Graph, ell: int, eps: float) -> bool:
    return abs(circuit_weight_sum(g, ell) - 1.0) <= eps


def _matrix_power_trace(a: np.ndarray, ell: int) -> int:
    n = a.shape[0]
    dmax = int(a.sum(axis=1).max()) if n else 0
    if n == 0:
        return 0
    if n * float(max(dmax, 1)) ** ell < 2.0 ** 62:
        r = np.linalg.matrix_power(a.astype(np.int64), ell)
        return int(np.trace(r))
    r = np.linalg.matrix_power(a.astype(object), ell)
    return int(sum(r[i, i] for i in range(n)))


def count_circuits(g: Graph, ell: int) -> int:
    """Number of ``ell``-circuits (closed vertex sequences) = ``trace(A^ell)``."""
    if ell < 1:
        raise ValueError("ell must be >= 1")
    return _matrix_power_trace(g.adjacency_matrix(), ell)


def _cycles_dfs(g: Graph, ell: int, visit=None) -> int:
    """Unordered simple ``ell``-cycles; each is found twice (both directions) then halved.

    ``visit(path)`` is called for every directed traversal found.
    """
    count = 0
    adj = g.adj
    for s in range(g.n):
        path = [s]
        on = {s}

        def rec(x: int) -> int:
            c = 0
            if len(path) == ell:
                if s in g.nbrs[x]:
                    if visit is not None:
                        visit(path)
                    return 1
                return 0
            for y in adj[x]:
                if y > s and y not in on:
                    path.append(y)
                    on.add(y)
                    c += rec(y)
                    path.pop()
                    on.discard(y)
            return c

        count += rec(s)
    return count // 2


def _codegree_matrix(g: Graph) -> np.ndarray:
    a = g.adjacency_matrix()
    return a @ a


def count_cycles(g: Graph, ell: int) -> int:
    """Number of (unordered) simple ``ell``-cycles."""
    if ell < 3:
        raise ValueError("cycles need length >= 3")
    if ell == 3:
        return count_circuits(g, 3) // 6
    if ell == 4 and g.n > 12:
        c = _codegree_matrix(g)
        iu = np.triu_indices(g.n, 1)
        v = c[iu]
        return int((v * (v - 1) // 2).sum()) // 2
    return _cycles_dfs(g, ell)


def count_paths_between(g: Graph, u: int, v: int, ell_vertices: int) -> int:
    """Simple ``u``-``v`` paths with exactly ``ell_vertices`` vertices."""
    if u == v:
        raise ValueError("endpoints must differ")
    if ell_vertices < 2:
        return 0
    on = {u}

    def rec(x: int, left: int) -> int:
        # left = vertices still to add, including v
        if left == 1:
            return 1 if v in g.nbrs[x] else 0
        c = 0
        for y in g.adj[x]:
            if y == v or y in on:
                continue
            on.add(y)
            c += rec(y, left - 1)
            on.discard(y)
        return c

    return rec(u, ell_vertices - 1)


def _coloring_tuple(g: Graph, c: ProperColoring | Sequence[int]) -> tuple[int, ...]:
    if isinstance(c, ProperColoring):
        if c.graph != g:
            raise ValueError("coloring belongs to a different graph")
        return c.colors
    cols = tuple(c)
    if len(cols) != g.e or not is_proper(g, cols):
        raise ImproperColoring("not a proper coloring of g")
    return cols


def count_color_tied_paths(g: Graph, c: ProperColoring | Sequence[int], k_vertices: int) -> int:
    """Unordered simple paths on ``k_vertices`` vertices whose first and last edges share a color."""
    cols = _coloring_tuple(g, c)
    if k_vertices < 3:
        raise ValueError("a color-tied path has at least 3 vertices")
    idx = g.edge_index

    def col(a: int, b: int) -> int:
        return cols[idx[(a, b) if a < b else (b, a)]]

    total = 0
    for a, b in g.edges:
        for x, y in ((a, b), (b, a)):
            first = col(x, y)
            on = {x, y}

            def rec(z: int, left: int) -> int:
                if left == 1:
                    # last vertex: at most one neighbour of z carries the first color
                    return sum(1 for w in g.adj[z] if w not in on and col(z, w) == first)
                s = 0
                for w in g.adj[z]:
                    if w not in on:
                        on.add(w)
                        s += rec(w, left - 1)
                        on.discard(w)
                return s

            total += rec(y, k_vertices - 2)
    return total // 2


def _non_rainbow_c4_fast(g: Graph, cols: Sequence[int]) -> int:
    n = g.n
    a = g.adjacency_matrix().astype(bool)
    cm = np.full((n, n), -1, dtype=np.int64)
    ea = g.edge_array
    carr = np.asarray(cols, dtype=np.int64)
    if g.e:
        cm[ea[:, 0], ea[:, 1]] = carr
        cm[ea[:, 1], ea[:, 0]] = carr
    order = np.argsort(carr, kind="stable")
    bounds = np.flatnonzero(np.diff(carr[order])) + 1
    pairs = 0  # (same-color opposite pair, closing pair)
    both = 0  # closing pair also same-colored
    for grp in np.split(order, bounds):
        if len(grp) < 2:
            continue
        x, y = ea[grp, 0], ea[grp, 1]
        iu = np.triu_indices(len(grp), 1)
        xi, yi, xj, yj = x[iu[0]], y[iu[0]], x[iu[1]], y[iu[1]]
        for p1, q1, p2, q2 in ((yi, xj, yj, xi), (yi, yj, xj, xi)):
            ok = a[p1, q1] & a[p2, q2]
            pairs += int(ok.sum())
            both += int((ok & (cm[p1, q1] == cm[p2, q2])).sum())
    return pairs - both // 2


def count_non_rainbow_cycles(g: Graph, c: ProperColoring | Sequence[int], ell: int) -> int:
    """Simple ``ell``-cycles on which some color appears twice."""
    cols = _coloring_tuple(g, c)
    if ell < 3:
        raise ValueError("cycles need length >= 3")
    if ell == 3:
        return 0
    if ell == 4:
        return _non_rainbow_c4_fast(g, cols)
    return _count_cycles_by_color(g, cols, ell)[1]


def _count_cycles_by_color(g: Graph, cols: Sequence[int], ell: int) -> tuple[int, int]:
    """(rainbow, non-rainbow) simple ``ell``-cycles by direct enumeration."""
    idx = g.edge_index
    rb = [0, 0]

    def visit(path):
        cs = [cols[idx[(a, b) if a < b else (b, a)]] for a, b in zip(path, path[1:] + path[:1])]
        rb[0 if len(set(cs)) == len(cs) else 1] += 1

    _cycles_dfs(g, ell, visit)
    return rb[0] // 2, rb[1] // 2


def count_rainbow_cycles(g: Graph, c: ProperColoring | Sequence[int], ell: int) -> int:
    cols = _coloring_tuple(g, c)
    return _count_cycles_by_color(g, cols, ell)[0]


# ----------------------------------------------------------------------
# degree concentration

@dataclass(frozen=True)
class DegreeConcentration:
    reference: float
    delta: float
    fraction_within: float
    within: int
    vertices: int
    min_degree: int
    max_degree: int
    mean_degree: float

    def to_dict(self) -> dict:
        return asdict(self)


def degree_concentration_report(
    g_t: Graph, reference: float, delta: float, vertices: Optional[Iterable[int]] = None
) -> DegreeConcentration:
    """Share of vertices whose degree lies in ``(1 ± delta) * reference``."""
    if reference <= 0:
        raise ValueError("reference degree must be positive")
    deg = np.asarray(g_t.degrees, dtype=np.int64)
    if vertices is not None:
        deg = deg[list(vertices)]
    if deg.size == 0:
        raise ValueError("no vertices to report on")
    within = int((np.abs(deg - reference) <= delta * reference + 1e-12).sum())
    return DegreeConcentration(
        reference, delta, within / deg.size, within, int(deg.size),
        int(deg.min()), int(deg.max()), float(deg.mean()),
    )


# ----------------------------------------------------------------------
# report

@dataclass
class DiagnosticsReport:
    entries: list[dict] = field(default_factory=list)

    def add(self, name: str, parameters: dict, result, method: str, sample_count: int = 0, **extra) -> None:
        entry = {"name": name, "parameters": parameters, "result": result, "method": method}
        if method == "sampled":
            entry["sample_count"] = sample_count
        entry.update(extra)
        self.entries.append(entry)

    def to_dict(self) -> dict:
        return {"entries": self.entries}


def diagnose(
    g: Graph,
    ells: Sequence[int] = (4,),
    eps: float = 0.1,
    mode: Optional[str] = None,
    probes: int = 2000,
    seed: int = 0,
    reference: Optional[float] = None,
    delta: float = 0.2,
) -> DiagnosticsReport:
    """Battery of checks on one graph; exact where the size gates allow."""
    rep = DiagnosticsReport()
    rep.add("graph", {}, {"n": g.n, "e": g.e, "max_degree": g.max_degree}, "exact")
    if g.e == 0:
        return rep
    dmode = mode or ("exact" if g.n <= DISC_EXACT_LIMIT else "sampled")
    de = disc_discrepancy(g, dmode, probes, seed)
    rep.add("disc", {}, {"eps_star": de.value}, de.method, de.probes)
    for ell in ells:
        with warnings.catch_warnings(record=True) as w:
            warnings.simplefilter("always")
            ws = circuit_weight_sum(g, ell)
        rep.add(
            "circuit_weight_sum", {"ell": ell}, {"value": ws, "circuit_holds": abs(ws - 1) <= eps},
            "exact", isolated_excluded=bool(w), eps=eps,
        )
        circ = count_circuits(g, ell)
        entry = {"circuits": circ}
        if ell >= 3:
            cyc = count_cycles(g, ell)
            entry["cycles"] = cyc
            entry["circuits_per_cycle_traversal"] = circ / (2 * ell * cyc) if cyc else None
        rep.add("circuits_vs_cycles", {"ell": ell}, entry, "exact")
    ref = reference if reference is not None else 2 * g.e / g.n
    rep.add("degree_concentration", {"reference": ref, "delta": delta},
            degree_concentration_report(g, ref, delta).to_dict(), "exact")
    return rep
