"""Simple undirected graphs, books, cycles and cliques, amalgamation and copy search.

Vertices are the integers ``0..n-1``.  Graphs are immutable; adjacency is
precomputed at construction so a graph can be shared freely between trials.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, Sequence

import numpy as np

Edge = tuple[int, int]


def _norm(u: int, v: int) -> Edge:
    return (u, v) if u < v else (v, u)


class Graph:
    """Immutable simple graph on vertices ``0..n-1``.

    Equality is label-sensitive: two graphs are equal iff they have the same
    vertex count and the same edge set.  Use :func:`are_isomorphic` for
    isomorphism.
    """

    __slots__ = ("n", "edges", "adj", "nbrs", "__dict__")

    def __init__(self, n: int, edges: Iterable[Sequence[int]] = ()):
        n = int(n)
        if n < 0:
            raise ValueError("vertex count must be non-negative")
        es = set()
        for e in edges:
            u, v = int(e[0]), int(e[1])
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge {(u, v)} out of range for n={n}")
            es.add(_norm(u, v))
        self.n = n
        self.edges: tuple[Edge, ...] = tuple(sorted(es))
        nb: list[list[int]] = [[] for _ in range(n)]
        for u, v in self.edges:
            nb[u].append(v)
            nb[v].append(u)
        self.adj: tuple[tuple[int, ...], ...] = tuple(tuple(sorted(x)) for x in nb)
        self.nbrs: tuple[frozenset[int], ...] = tuple(frozenset(x) for x in nb)

    # -- basic queries -------------------------------------------------
    @property
    def v(self) -> int:
        return self.n

    @property
    def e(self) -> int:
        return len(self.edges)

    def degree(self, x: int) -> int:
        return len(self.adj[x])

    @cached_property
    def degrees(self) -> tuple[int, ...]:
        return tuple(len(a) for a in self.adj)

    @property
    def max_degree(self) -> int:
        return max(self.degrees, default=0)

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.nbrs[u]

    @cached_property
    def edge_index(self) -> dict[Edge, int]:
        return {e: i for i, e in enumerate(self.edges)}

    def index_of(self, u: int, v: int) -> int:
        return self.edge_index[_norm(u, v)]

    @cached_property
    def edge_array(self) -> np.ndarray:
        arr = np.array(self.edges, dtype=np.int64).reshape(-1, 2)
        arr.setflags(write=False)
        return arr

    def adjacency_matrix(self, dtype=np.int64) -> np.ndarray:
        a = np.zeros((self.n, self.n), dtype=dtype)
        if self.edges:
            ea = self.edge_array
            a[ea[:, 0], ea[:, 1]] = 1
            a[ea[:, 1], ea[:, 0]] = 1
        return a

    # -- derived graphs ------------------------------------------------
    def spanning_subgraph(self, edge_ids: Iterable[int]) -> "Graph":
        return Graph(self.n, (self.edges[i] for i in edge_ids))

    def induced(self, vertices: Sequence[int]) -> "Graph":
        """Induced subgraph, relabelled so ``vertices[i]`` becomes ``i``."""
        pos = {x: i for i, x in enumerate(vertices)}
        return Graph(
            len(pos),
            ((pos[u], pos[v]) for u, v in self.edges if u in pos and v in pos),
        )

    def relabel(self, perm: Sequence[int]) -> "Graph":
        """Graph with vertex ``x`` renamed ``perm[x]``."""
        if sorted(perm) != list(range(self.n)):
            raise ValueError("perm must be a permutation of range(n)")
        return Graph(self.n, ((perm[u], perm[v]) for u, v in self.edges))

    def complement(self) -> "Graph":
        return Graph(
            self.n,
            (e for e in itertools.combinations(range(self.n), 2) if not self.has_edge(*e)),
        )

    # -- dunder --------------------------------------------------------
    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self.n == other.n and self.edges == other.edges

    def __hash__(self) -> int:
        return hash((self.n, self.edges))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, e={self.e})"


@dataclass(frozen=True)
class LabeledTwoGraph:
    """A graph with a distinguished ordered edge ``root = (label-1, label-2)``."""

    graph: Graph
    root: tuple[int, int] = (0, 1)

    def __post_init__(self):
        a, b = self.root
        if a == b:
            raise ValueError("root vertices must differ")
        if not self.graph.has_edge(a, b):
            raise ValueError(f"root {self.root} is not an edge")


@dataclass(frozen=True)
class Embedding:
    """A copy of ``pattern`` in a host: ``mapping[i]`` is the image of pattern vertex ``i``."""

    pattern: Graph
    mapping: tuple[int, ...]

    @property
    def vertices(self) -> tuple[int, ...]:
        return self.mapping

    @property
    def edges(self) -> tuple[Edge, ...]:
        m = self.mapping
        return tuple(sorted(_norm(m[u], m[v]) for u, v in self.pattern.edges))

    @property
    def key(self) -> tuple[frozenset[int], frozenset[Edge]]:
        return frozenset(self.mapping), frozenset(self.edges)


# ----------------------------------------------------------------------
# constructors

def make_book(t: int) -> Graph:
    """Book graph B_t: ``t`` triangles on the common edge ``01``.

    Vertex order is ``u1=0, u2=1, v_k = k+1`` for ``k = 1..t``.
    """
    if t < 1:
        raise ValueError("book size t must be >= 1")
    edges = [(0, 1)]
    for k in range(2, t + 2):
        edges += [(0, k), (1, k)]
    return Graph(t + 2, edges)


def make_cycle(k: int) -> Graph:
    """C_k on ``0..k-1`` in cyclic order."""
    if k < 3:
        raise ValueError("cycle length must be >= 3")
    return Graph(k, ((i, (i + 1) % k) for i in range(k)))


def make_clique(k: int) -> Graph:
    if k < 3:
        raise ValueError("clique size must be >= 3")
    return Graph(k, itertools.combinations(range(k), 2))


def make_path(k: int) -> Graph:
    """Path on ``k`` vertices ``0-1-...-(k-1)``."""
    if k < 1:
        raise ValueError("path must have at least one vertex")
    return Graph(k, ((i, i + 1) for i in range(k - 1)))


def disjoint_union(*graphs: Graph) -> Graph:
    edges: list[Edge] = []
    off = 0
    for g in graphs:
        edges += [(u + off, v + off) for u, v in g.edges]
        off += g.n
    return Graph(off, edges)


def amalgamate(f: LabeledTwoGraph, h: LabeledTwoGraph) -> Graph:
    """Glue ``f`` and ``h`` along their rooted edges.

    ``f``'s vertices keep their numbers.  ``h``'s roots map onto ``f``'s
    roots (label 1 to label 1, label 2 to label 2) and its remaining
    vertices are appended in increasing order.
    """
    fa, fb = f.root
    ha, hb = h.root
    pos = {ha: fa, hb: fb}
    nxt = f.graph.n
    for x in range(h.graph.n):
        if x not in pos:
            pos[x] = nxt
            nxt += 1
    edges = list(f.graph.edges) + [(pos[u], pos[v]) for u, v in h.graph.edges]
    return Graph(nxt, edges)


_NAMED = re.compile(r"^(K|C|P|B)(\d+)$")


def named_graph(name: str) -> Graph:
    """Parse ``K<k>``, ``C<k>``, ``P<k>``, ``B<t>`` or ``g6:<graph6>``."""
    name = name.strip()
    if name.startswith("g6:"):
        from .graph6 import from_graph6

        return from_graph6(name[3:])
    m = _NAMED.match(name)
    if not m:
        raise ValueError(f"unknown graph name {name!r}")
    kind, k = m.group(1), int(m.group(2))
    return {"K": make_clique, "C": make_cycle, "P": make_path, "B": make_book}[kind](k)


def named_labeled(name: str) -> LabeledTwoGraph:
    """``NAME`` or ``NAME@a-b``; the root defaults to ``(0, 1)``."""
    if "@" in name:
        base, root = name.rsplit("@", 1)
        a, b = (int(x) for x in root.split("-"))
        return LabeledTwoGraph(named_graph(base), (a, b))
    return LabeledTwoGraph(named_graph(name))


# ----------------------------------------------------------------------
# copy search

def _search_order(pattern: Graph) -> list[int]:
    """Connected-first vertex order: each next vertex has the most already-placed neighbours."""
    order: list[int] = []
    placed: set[int] = set()
    remaining = set(range(pattern.n))
    while remaining:
        best = max(
            remaining,
            key=lambda x: (len(pattern.nbrs[x] & placed), pattern.degree(x), -x),
        )
        order.append(best)
        placed.add(best)
        remaining.discard(best)
    return order


def iter_embeddings(
    host: Graph,
    pattern: Graph,
    domains: Sequence[Iterable[int] | None] | None = None,
) -> Iterator[tuple[int, ...]]:
    """All injective edge-preserving maps ``pattern -> host`` (not modulo automorphisms).

    ``domains[i]``, when given, restricts the image of pattern vertex ``i``.
    """
    k = pattern.n
    if k > host.n:
        return
    order = _search_order(pattern)
    back = [[u for u in pattern.adj[x] if u in set(order[:i])] for i, x in enumerate(order)]
    pdeg = pattern.degrees
    hdeg = host.degrees
    dom: list[frozenset[int] | None] = [None] * k
    if domains is not None:
        for i, d in enumerate(domains):
            if d is not None:
                dom[i] = frozenset(d)
    mapping = [-1] * k
    used: set[int] = set()
    all_vertices = range(host.n)

    def rec(i: int) -> Iterator[tuple[int, ...]]:
        if i == k:
            yield tuple(mapping)
            return
        x = order[i]
        if back[i]:
            cand = host.nbrs[mapping[back[i][0]]]
            for u in back[i][1:]:
                cand = cand & host.nbrs[mapping[u]]
            cand = sorted(cand)
        else:
            cand = all_vertices
        d = dom[x]
        need = pdeg[x]
        for y in cand:
            if y in used or hdeg[y] < need or (d is not None and y not in d):
                continue
            mapping[x] = y
            used.add(y)
            yield from rec(i + 1)
            used.discard(y)
        mapping[x] = -1

    yield from rec(0)


def enumerate_copies(
    host: Graph,
    pattern: Graph,
    domains: Sequence[Iterable[int] | None] | None = None,
) -> list[Embedding]:
    """Every copy (subgraph) of ``pattern`` in ``host``, each listed once.

    Maps differing by an automorphism of ``pattern`` have the same image and
    are collapsed; the representative kept is the first one found.
    """
    seen: set = set()
    out: list[Embedding] = []
    for m in iter_embeddings(host, pattern, domains):
        emb = Embedding(pattern, m)
        key = emb.key
        if key not in seen:
            seen.add(key)
            out.append(emb)
    return out


def count_embeddings(host: Graph, pattern: Graph) -> int:
    return sum(1 for _ in iter_embeddings(host, pattern))


def automorphisms(g: Graph) -> list[tuple[int, ...]]:
    return list(iter_embeddings(g, g))


def find_isomorphism(g1: Graph, g2: Graph) -> tuple[int, ...] | None:
    """A bijection mapping edges of ``g1`` onto edges of ``g2``, or ``None``."""
    if g1.n != g2.n or g1.e != g2.e or sorted(g1.degrees) != sorted(g2.degrees):
        return None
    # equal edge counts make every injective homomorphism an isomorphism
    return next(iter_embeddings(g2, g1), None)


def are_isomorphic(g1: Graph, g2: Graph) -> bool:
    return find_isomorphism(g1, g2) is not None
