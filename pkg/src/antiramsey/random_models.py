"""Samplers for G(n, p), the two-layer model, proper colorings and color-class splits.

RNG discipline: every random object is drawn from a
:class:`numpy.random.Generator` built by :func:`trial_rng` from
``(seed, *keys)``, typically ``(seed, trial_index)``.  A trial's randomness
therefore depends only on its own keys, never on scheduling.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .graphs import Edge, Graph
from .rainbow import ProperColoring, hunt_counterexample

STRATEGIES = ("greedy", "distinct", "random-greedy", "adversarial")


def trial_rng(seed: int, *keys: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(seed), *map(int, keys)]))


def _pairs_from_index(n: int, k: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Invert the lexicographic index of pairs ``(i, j)``, ``i < j``."""
    k = k.astype(np.int64)
    # row i starts at i*n - i*(i+1)/2
    i = (2 * n - 1 - np.sqrt((2 * n - 1) ** 2 - 8.0 * k)) // 2
    i = i.astype(np.int64)
    start = i * n - i * (i + 1) // 2
    # guard against rounding at row boundaries
    over = start > k
    i[over] -= 1
    start = i * n - i * (i + 1) // 2
    nxt = (i + 1) * n - (i + 1) * (i + 2) // 2
    under = nxt <= k
    i[under] += 1
    start = i * n - i * (i + 1) // 2
    j = k - start + i + 1
    return i, j


def geometric_pair_indices(n: int, p: float, rng: np.random.Generator) -> np.ndarray:
    """Indices of pairs kept by independent p-coins, via geometric skipping."""
    total = n * (n - 1) // 2
    if p <= 0 or total == 0:
        return np.zeros(0, dtype=np.int64)
    if p >= 1:
        return np.arange(total, dtype=np.int64)
    out = []
    pos = -1
    batch = max(16, int(total * p * 1.1) + 16)
    while True:
        gaps = rng.geometric(p, size=batch)
        idx = pos + np.cumsum(gaps)
        keep = idx[idx < total]
        out.append(keep)
        if len(keep) < len(idx):
            break
        pos = int(idx[-1])
    return np.concatenate(out)


@dataclass(frozen=True)
class GnpSample:
    graph: Graph
    n: int
    p: float
    seed: int


def sample_gnp_graph(n: int, p: float, rng: np.random.Generator) -> Graph:
    if not 0 <= p <= 1:
        raise ValueError("p must lie in [0, 1]")
    if n < 1:
        raise ValueError("n must be >= 1")
    k = geometric_pair_indices(n, p, rng)
    i, j = _pairs_from_index(n, k)
    return Graph(n, zip(i.tolist(), j.tolist()))


def sample_gnp(n: int, p: float, seed: int) -> GnpSample:
    """Reproducible G(n, p) sample."""
    return GnpSample(sample_gnp_graph(n, p, trial_rng(seed)), n, p, seed)


def coupled_gnp_marks(n: int, p_max: float, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Pairs present at ``p_max`` and a uniform mark for each.

    A pair is in G(n, p) for ``p <= p_max`` iff its mark is below ``p / p_max``,
    so the samples for a whole grid of ``p`` values are nested.
    """
    k = geometric_pair_indices(n, p_max, rng)
    i, j = _pairs_from_index(n, k)
    marks = rng.random(len(k))
    return np.stack([i, j], axis=1), marks


def graph_at(n: int, pairs: np.ndarray, marks: np.ndarray, p: float, p_max: float) -> Graph:
    if p_max <= 0:
        return Graph(n)
    keep = marks < (p / p_max)
    sel = pairs[keep]
    return Graph(n, map(tuple, sel.tolist()))


@dataclass(frozen=True)
class PartitionLayout:
    """Equitable vertex partition with role tags such as ``V1`` or ``U3``."""

    parts: tuple[tuple[int, ...], ...]
    roles: tuple[str, ...]

    def __post_init__(self):
        if len(self.parts) != len(self.roles):
            raise ValueError("one role per part")
        seen: set[int] = set()
        for p in self.parts:
            if seen & set(p):
                raise ValueError("parts overlap")
            seen |= set(p)
        sizes = [len(p) for p in self.parts]
        if sizes and max(sizes) - min(sizes) > 1:
            raise ValueError("parts must be equitable")

    @classmethod
    def equitable(cls, n: int, roles: Sequence[str]) -> "PartitionLayout":
        k = len(roles)
        parts = tuple(tuple(range(i, n, k)) for i in range(k))
        return cls(parts, tuple(roles))

    @classmethod
    def for_pipeline(cls, n: int, s: int, h: int) -> "PartitionLayout":
        """``V_1..V_s`` then ``U_3..U_h``."""
        roles = [f"V{i}" for i in range(1, s + 1)] + [f"U{i}" for i in range(3, h + 1)]
        return cls.equitable(n, roles)

    def part(self, role: str) -> tuple[int, ...]:
        return self.parts[self.roles.index(role)]

    def membership(self, n: int) -> np.ndarray:
        lab = np.full(n, -1, dtype=np.int64)
        for i, p in enumerate(self.parts):
            lab[list(p)] = i
        return lab


def sample_two_layer(
    n: int, p: float, q_prime: float, layout: PartitionLayout, seed: int, v_roles: Sequence[str] | None = None
) -> GnpSample:
    """Pairs inside the union of the ``V`` parts get a p-coin; every pair gets an independent q'-coin.

    An edge is present if any of its coins fires (simple-graph union).
    """
    if q_prime > p:
        raise ValueError("q' must not exceed p")
    if not (0 <= q_prime and p <= 1):
        raise ValueError("probabilities must lie in [0, 1]")
    rng = trial_rng(seed)
    if v_roles is None:
        v_roles = [r for r in layout.roles if r.startswith("V")]
    inside = np.zeros(n, dtype=bool)
    for r in v_roles:
        inside[list(layout.part(r))] = True
    k1 = geometric_pair_indices(n, p, rng)
    i1, j1 = _pairs_from_index(n, k1)
    m = inside[i1] & inside[j1]
    k2 = geometric_pair_indices(n, q_prime, rng)
    keys = np.union1d(k1[m], k2)
    i, j = _pairs_from_index(n, keys)
    return GnpSample(Graph(n, zip(i.tolist(), j.tolist())), n, p, seed)


# ----------------------------------------------------------------------
# colorings

def greedy_coloring(g: Graph, order: Sequence[int] | None = None) -> list[int]:
    """Smallest free color per edge; uses at most ``2*Delta - 1`` colors."""
    used = [0] * g.n
    cols = [0] * g.e
    edges = g.edges
    for i in (range(g.e) if order is None else order):
        u, v = edges[i]
        mask = used[u] | used[v]
        c = (~mask & (mask + 1)).bit_length() - 1
        cols[i] = c
        bit = 1 << c
        used[u] |= bit
        used[v] |= bit
    return cols


def proper_color(g: Graph, strategy: str = "greedy", seed: int = 0, target: Graph | None = None) -> ProperColoring:
    """A verified proper coloring.

    ``greedy`` colors edges in lexicographic order, ``random-greedy`` in a
    seeded random order, ``distinct`` gives every edge its own color, and
    ``adversarial`` (heuristic) runs the counterexample hunter against
    ``target`` and falls back to random greedy if it finds nothing.
    """
    if strategy == "greedy":
        return ProperColoring(g, greedy_coloring(g))
    if strategy == "distinct":
        return ProperColoring(g, range(g.e))
    if strategy == "random-greedy":
        order = trial_rng(seed, 1).permutation(g.e).tolist()
        return ProperColoring(g, greedy_coloring(g, order))
    if strategy == "adversarial":
        if target is None:
            raise ValueError("adversarial coloring needs a target graph")
        c = hunt_counterexample(g, target, trials=5, seed=seed, steps=500)
        if c is not None:
            return c
        return proper_color(g, "random-greedy", seed)
    raise ValueError(f"unknown coloring strategy {strategy!r}")


@dataclass(frozen=True)
class ColorAssignment:
    """Map color id -> class id; ``classes`` lists the class labels."""

    sigma: np.ndarray
    classes: tuple

    @property
    def class_count(self) -> int:
        return len(self.classes)

    def class_of(self, label) -> int:
        return self.classes.index(label)

    def to_json(self) -> dict:
        return {"classes": [list(c) if isinstance(c, tuple) else c for c in self.classes], "sigma": self.sigma.tolist()}


def assign_colors(c: ProperColoring, classes: int | Sequence, seed: int) -> ColorAssignment:
    """I.i.d. uniform class for every used color.

    ``classes`` is either a positive integer ``T`` (labels ``0..T-1``) or an
    explicit label sequence such as the edge list of ``H``.
    """
    labels = tuple(range(classes)) if isinstance(classes, (int, np.integer)) else tuple(classes)
    if not labels:
        raise ValueError("need at least one class")
    rng = trial_rng(seed, 2)
    sigma = rng.integers(0, len(labels), size=c.num_colors)
    sigma.setflags(write=False)
    return ColorAssignment(sigma, labels)


def class_edge_ids(c: ProperColoring, sigma: ColorAssignment) -> list[np.ndarray]:
    per_edge = sigma.sigma[c.array] if c.graph.e else np.zeros(0, dtype=np.int64)
    return [np.flatnonzero(per_edge == t) for t in range(sigma.class_count)]


def color_class_subgraph(g: Graph, c: ProperColoring, sigma: ColorAssignment, t: int) -> Graph:
    """Spanning subgraph of edges whose color was sent to class index ``t``."""
    if not 0 <= t < sigma.class_count:
        raise ValueError(f"class {t} out of range")
    if c.graph != g:
        raise ValueError("coloring belongs to a different graph")
    per_edge = sigma.sigma[c.array] if g.e else np.zeros(0, dtype=np.int64)
    return g.spanning_subgraph(np.flatnonzero(per_edge == t).tolist())
