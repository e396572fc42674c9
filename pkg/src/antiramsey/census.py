"""Transversal and isolated copy counts, the isolated-copy subgraph, and the edge-family relation.

A copy of ``S`` is *isolated* when no other copy of ``S`` in the host
shares an edge with it.  Isolation is always judged in the whole host
graph, also when only transversal copies are being counted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from .graphs import Edge, Embedding, Graph, enumerate_copies
from .random_models import PartitionLayout, sample_gnp_graph, trial_rng


def _norm(e: Sequence[int]) -> Edge:
    u, v = int(e[0]), int(e[1])
    return (u, v) if u < v else (v, u)


def isolated_copies(g: Graph, s: Graph, copies: Optional[list[Embedding]] = None) -> list[Embedding]:
    """Copies of ``s`` sharing no edge with any other copy of ``s``."""
    if copies is None:
        copies = enumerate_copies(g, s)
    load: dict[Edge, int] = {}
    edge_lists = [c.edges for c in copies]
    for es in edge_lists:
        for e in es:
            load[e] = load.get(e, 0) + 1
    return [c for c, es in zip(copies, edge_lists) if all(load[e] == 1 for e in es)]


@dataclass(frozen=True)
class IsolatedSubgraph:
    graph: Graph
    copies: tuple[Embedding, ...]
    copy_index: dict = field(hash=False, compare=False)

    def copy_of(self, u: int, v: int) -> Optional[int]:
        return self.copy_index.get(_norm((u, v)))


def isolated_subgraph(g: Graph, s: Graph) -> IsolatedSubgraph:
    """Spanning subgraph of edges lying in isolated copies, with edge -> copy index."""
    iso = isolated_copies(g, s)
    index: dict[Edge, int] = {}
    for k, c in enumerate(iso):
        for e in c.edges:
            index[e] = k
    return IsolatedSubgraph(Graph(g.n, index.keys()), tuple(iso), index)


@dataclass
class TransversalCounts:
    z: int
    y: int
    copies: Optional[list[Embedding]] = None

    def to_dict(self) -> dict:
        d = {"Z": self.z, "Y": self.y}
        if self.copies is not None:
            d["copies"] = [list(c.mapping) for c in self.copies]
        return d


def _parts_of(parts: PartitionLayout | Sequence[Iterable[int]]) -> list[frozenset[int]]:
    raw = parts.parts if isinstance(parts, PartitionLayout) else parts
    out = [frozenset(p) for p in raw]
    for i in range(len(out)):
        for j in range(i + 1, len(out)):
            if out[i] & out[j]:
                raise ValueError("parts must be disjoint")
    return out


def transversal_counts(
    g: Graph,
    s: Graph,
    parts: PartitionLayout | Sequence[Iterable[int]],
    labeled: bool = False,
    isolated: Optional[IsolatedSubgraph] = None,
    keep_copies: bool = False,
) -> TransversalCounts:
    """Z (transversal copies) and Y (those that are also isolated in ``g``).

    Unlabeled: a copy is transversal when its vertices meet every part
    exactly once.  ``labeled=True`` additionally requires some embedding of
    the copy to send pattern vertex ``i`` into part ``i``.  A precomputed
    :class:`IsolatedSubgraph` may be passed to avoid recomputing isolation.
    """
    ps = _parts_of(parts)
    if len(ps) != s.n:
        raise ValueError(f"need {s.n} parts, got {len(ps)}")
    if labeled:
        cand = enumerate_copies(g, s, domains=ps)
    else:
        lab = {}
        for i, p in enumerate(ps):
            for x in p:
                lab[x] = i
        allowed = frozenset(lab)
        cand = [
            c for c in enumerate_copies(g, s, domains=[allowed] * s.n)
            if len({lab[x] for x in c.mapping}) == s.n
        ]
    iso = isolated if isolated is not None else isolated_subgraph(g, s)
    iso_keys = {c.key for c in iso.copies}
    y = sum(1 for c in cand if c.key in iso_keys)
    return TransversalCounts(len(cand), y, cand if keep_copies else None)


def edge_family_embeds(g: Graph, s: Graph, e_set: Iterable[Sequence[int]], isolated: Optional[IsolatedSubgraph] = None) -> bool:
    """``E ⊑ G^S``: every edge of ``E`` lies in an isolated copy, no two in the same one."""
    es = {_norm(e) for e in e_set}
    if not es:
        raise ValueError("edge family must be nonempty")
    iso = isolated if isolated is not None else isolated_subgraph(g, s)
    owners = []
    for e in es:
        k = iso.copy_index.get(e)
        if k is None:
            return False
        owners.append(k)
    return len(set(owners)) == len(owners)


def _connected(s: Graph) -> bool:
    if s.n == 0:
        return True
    seen = {0}
    stack = [0]
    while stack:
        x = stack.pop()
        for y in s.adj[x]:
            if y not in seen:
                seen.add(y)
                stack.append(y)
    return len(seen) == s.n


def _local_embeds(g: Graph, s: Graph, es: set[Edge]) -> bool:
    """Same answer as :func:`edge_family_embeds`, only looking at copies through ``E``.

    A copy through ``e`` is isolated iff each of its edges lies in exactly
    one copy, which only requires copies meeting that copy's edges.
    """
    if any(not g.has_edge(*e) for e in es):
        return False
    if not _connected(s):
        return edge_family_embeds(g, s, es)
    # copies through E and every copy meeting them lie within distance 2 v(s) of E
    seeds = {x for e in es for x in e}
    ball = set(seeds)
    frontier = set(seeds)
    for _ in range(2 * s.n):
        nxt = {y for x in frontier for y in g.adj[x]} - ball
        if not nxt:
            break
        ball |= nxt
        frontier = nxt
    verts = sorted(ball)
    sub = g.induced(verts)
    back = {x: i for i, x in enumerate(verts)}
    iso = isolated_subgraph(sub, s)
    return edge_family_embeds(sub, s, [(back[u], back[v]) for u, v in es], iso)


@dataclass(frozen=True)
class EmbedEstimate:
    frequency: float
    hits: int
    trials: int
    stderr: float
    ci_low: float
    ci_high: float
    bound: float  # q ** |E|
    q: float

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def wilson_interval(hits: int, trials: int, z: float = 1.96) -> tuple[float, float]:
    if trials == 0:
        return 0.0, 1.0
    ph = hits / trials
    den = 1 + z * z / trials
    mid = (ph + z * z / (2 * trials)) / den
    half = z * math.sqrt(ph * (1 - ph) / trials + z * z / (4 * trials * trials)) / den
    return max(0.0, mid - half), min(1.0, mid + half)


def _embed_trial(args) -> int:
    n, p, s, es, seed, t = args
    g = sample_gnp_graph(n, p, trial_rng(seed, t))
    return int(_local_embeds(g, s, es))


def estimate_embed_probability(
    n: int,
    p: float,
    s: Graph,
    e_set: Iterable[Sequence[int]],
    trials: int,
    seed: int,
    workers: int = 1,
) -> EmbedEstimate:
    """Monte Carlo frequency of ``E ⊑ G(n,p)^S`` next to the bound ``q^|E|``, ``q = n^(v-2) p^e``."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    es = {_norm(e) for e in e_set}
    if not es:
        raise ValueError("edge family must be nonempty")
    from .parallel import run_trials

    hits = sum(run_trials(_embed_trial, [(n, p, s, es, seed, t) for t in range(trials)], workers))
    f = hits / trials
    se = math.sqrt(f * (1 - f) / trials)
    lo, hi = wilson_interval(hits, trials)
    q = n ** (s.n - 2) * p ** s.e
    return EmbedEstimate(f, hits, trials, se, lo, hi, q ** len(es), q)
