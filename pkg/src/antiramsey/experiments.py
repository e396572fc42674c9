"""Experiment configs, Monte Carlo drivers and report persistence.

Every trial draws its randomness from ``trial_rng(seed, trial, ...)`` and
results are reduced in trial order, so a config with a fixed seed produces
byte-identical output for any worker count.  Wall-clock timings are left
out of persisted reports unless explicitly requested, for the same reason.
"""

from __future__ import annotations

import csv
import io
import json
import math
import time
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Any, Optional, Sequence

import numpy as np

from .census import isolated_subgraph, transversal_counts, wilson_interval
from .density import beta, check_corollary_gap, check_theorem_hypotheses, m2_density
from .diagnostics import (
    circuit_weight_sum,
    count_circuits,
    count_cycles,
    degree_concentration_report,
    diagnose,
)
from .graphs import Graph, LabeledTwoGraph, amalgamate, named_graph, named_labeled
from .parallel import run_trials
from .rainbow import arrows_rainbow, find_rainbow_copy, verify_book_lemma
from .random_models import (
    STRATEGIES,
    PartitionLayout,
    assign_colors,
    class_edge_ids,
    coupled_gnp_marks,
    graph_at,
    proper_color,
    sample_gnp_graph,
    sample_two_layer,
    trial_rng,
)

SCHEMA_VERSION = 1
KINDS = ("threshold-curve", "pipeline", "diagnostics", "arrows", "density", "book-lemma")

MAX_CURVE_N = 20000
MAX_ADVERSARIAL_N = 200
MAX_PIPELINE_N = 5000


class ConfigError(ValueError):
    """Invalid experiment configuration (CLI exit code 2)."""


class InfeasibleInstance(ValueError):
    """Valid but out-of-reach instance (CLI exit code 3)."""


# ----------------------------------------------------------------------
# config

@dataclass
class ExperimentConfig:
    kind: str
    n: Optional[int] = None
    p: Optional[float] = None
    p_grid: Optional[list[float]] = None
    beta_grid: Optional[list[float]] = None
    C: float = 1.0
    graphs: list[str] = field(default_factory=list)
    host: Optional[str] = None
    target: Optional[str] = None
    S: Optional[str] = None
    F: Optional[str] = None
    H: Optional[str] = None
    t: Optional[int] = None
    classes: Any = "edges"
    strategy: str = "greedy"
    trials: int = 100
    seed: int = 0
    budget: Optional[int] = None
    alpha: float = 0.01
    ell: int = 2
    delta: float = 0.2
    eps: float = 0.1
    mode: Optional[str] = None
    probes: int = 2000
    search_budget: Optional[int] = 200_000
    q_prime: Optional[float] = None  # overrides e(H) q when set
    # execution-only settings; never part of a persisted result
    workers: int = 1
    output: Optional[str] = None
    format: str = "json"
    timing: bool = False

    _EXEC = ("workers", "output", "format", "timing")

    def validate(self) -> "ExperimentConfig":
        if self.kind not in KINDS:
            raise ConfigError(f"unknown kind {self.kind!r}; expected one of {KINDS}")
        if self.format not in ("json", "csv"):
            raise ConfigError("format must be json or csv")
        if self.strategy not in STRATEGIES:
            raise ConfigError(f"unknown strategy {self.strategy!r}")
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        for name in ("p_grid", "beta_grid"):
            grid = getattr(self, name)
            if grid is not None and len(grid) == 0:
                raise ConfigError(f"{name} must be nonempty")
        for p in (self.p_grid or []) + ([self.p] if self.p is not None else []):
            if not 0 <= p <= 1:
                raise ConfigError(f"probability {p} outside [0, 1]")
        if self.classes != "edges":
            try:
                t = int(self.classes)
            except (TypeError, ValueError):
                raise ConfigError("classes must be 'edges' or a positive integer") from None
            if t < 1:
                raise ConfigError("classes must be positive")
            self.classes = t
        for name in ("graphs",):
            for g in getattr(self, name):
                _graph(g)
        for name in ("host", "target", "S", "F", "H"):
            val = getattr(self, name)
            if val is not None:
                _labeled(val) if name in ("S", "F", "H") else _graph(val)
        return self

    def to_dict(self, include_exec: bool = False) -> dict:
        d = {f.name: getattr(self, f.name) for f in fields(self) if not f.name.startswith("_")}
        if not include_exec:
            for k in self._EXEC:
                d.pop(k, None)
        return d

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        data = dict(data)
        ver = data.pop("schema_version", SCHEMA_VERSION)
        if ver != SCHEMA_VERSION:
            raise ConfigError(f"unsupported config schema_version {ver}")
        known = {f.name for f in fields(cls) if not f.name.startswith("_")}
        extra = set(data) - known
        if extra:
            raise ConfigError(f"unknown config keys: {sorted(extra)}")
        if "kind" not in data:
            raise ConfigError("config needs a 'kind'")
        return cls(**data).validate()

    @classmethod
    def load(cls, path: str | Path) -> "ExperimentConfig":
        try:
            data = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        return cls.from_dict(data)

    def p_values(self) -> list[tuple[float, float]]:
        """(p, exponent) pairs; the exponent is beta with ``p = C n^-beta``."""
        if self.n is None:
            raise ConfigError("n is required")
        if self.beta_grid is not None:
            out = []
            for b in self.beta_grid:
                p = self.C * self.n ** (-b)
                if not 0 <= p <= 1:
                    raise ConfigError(f"C n^-beta = {p} outside [0, 1] for beta={b}")
                out.append((p, b))
            return out
        grid = self.p_grid if self.p_grid is not None else ([self.p] if self.p is not None else None)
        if grid is None:
            raise ConfigError("need p, p_grid or beta_grid")
        out = []
        for p in grid:
            expo = -math.log(p / self.C) / math.log(self.n) + 0.0 if p > 0 and self.n > 1 else math.inf
            out.append((p, expo))
        return out


def _graph(name: str) -> Graph:
    try:
        return named_graph(name)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _labeled(name: str) -> LabeledTwoGraph:
    try:
        return named_labeled(name)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _num(x: float) -> Optional[float]:
    return None if x is None or (isinstance(x, float) and not math.isfinite(x)) else x


# ----------------------------------------------------------------------
# threshold curve

@dataclass
class CurveResult:
    rows: list[dict]
    outcomes: np.ndarray  # trials x grid booleans
    strategy: str
    target: str

    def to_dict(self) -> dict:
        return {
            "strategy": self.strategy,
            "target": self.target,
            "proxy": "rainbow copy under the named coloring strategy, not the arrows relation",
            "heuristic": self.strategy == "adversarial",
            "rows": self.rows,
        }


def _curve_trial(args) -> list[bool]:
    n, grid, h, strategy, seed, t = args
    ps = [p for p, _ in grid]
    p_max = max(ps)
    rng = trial_rng(seed, t)
    pairs, marks = coupled_gnp_marks(n, p_max, rng)
    out = []
    for k, p in enumerate(ps):
        g = graph_at(n, pairs, marks, p, p_max)
        if g.e < h.e:
            out.append(False)
            continue
        c = proper_color(g, strategy, seed=int(trial_rng(seed, t, k).integers(2**31)), target=h)
        out.append(find_rainbow_copy(g, c.colors, h) is not None)
    return out


def run_threshold_curve(config: ExperimentConfig) -> CurveResult:
    """Frequency, over trials, that the chosen coloring of G(n, p) contains a rainbow target.

    Samples across the p grid are coupled (nested) within each trial.  The
    frequency is a proxy for P[G(n,p) ->rb H]; with ``greedy`` or
    ``distinct`` it only shows that *this* coloring has a rainbow copy, and
    ``adversarial`` is a heuristic.
    """
    if config.target is None:
        raise ConfigError("threshold curve needs a target graph")
    h = _graph(config.target)
    grid = config.p_values()
    n = config.n
    if n > MAX_CURVE_N:
        raise InfeasibleInstance(f"n={n} exceeds {MAX_CURVE_N}; reduce n")
    if config.strategy == "adversarial" and n > MAX_ADVERSARIAL_N:
        raise InfeasibleInstance(f"adversarial coloring limited to n <= {MAX_ADVERSARIAL_N}")
    tasks = [(n, grid, h, config.strategy, config.seed, t) for t in range(config.trials)]
    res = np.array(run_trials(_curve_trial, tasks, config.workers), dtype=bool).reshape(config.trials, len(grid))
    rows = []
    for k, (p, expo) in enumerate(grid):
        hits = int(res[:, k].sum())
        lo, hi = wilson_interval(hits, config.trials)
        rows.append({
            "p": p,
            "exponent": _num(expo),
            "frequency": hits / config.trials,
            "trials": config.trials,
            "ci_low": lo,
            "ci_high": hi,
            "strategy": config.strategy,
        })
    return CurveResult(rows, res, config.strategy, config.target)


# ----------------------------------------------------------------------
# pipeline

@dataclass
class TrialRecord:
    trial: int
    seed: int
    edges: int
    colors_used: int
    strategy: str
    rainbow_amalgam: Optional[bool]
    y_class: int
    z_class: int
    y_host: int
    z_host: int
    y_target: float
    degree: list[dict]
    circuits: list[dict]
    wall_time: Optional[float] = None

    def to_dict(self) -> dict:
        d = asdict(self)
        if d["wall_time"] is None:
            d.pop("wall_time")
        return d


def _pipeline_trial(args) -> dict:
    (n, p, qp, s_l, f_l, h_l, layout, strategy, seed, t, alpha, ell, delta, search_budget, timing) = args
    t0 = time.perf_counter()
    s, h = s_l.graph, h_l.graph
    sample = sample_two_layer(n, p, qp, layout, int(trial_rng(seed, t).integers(2**62)))
    g = sample.graph
    amalg = amalgamate(f_l, h_l)
    col = proper_color(g, strategy, seed=int(trial_rng(seed, t, 1).integers(2**31)), target=amalg)
    h_edges = list(h.edges)
    sigma = assign_colors(col, h_edges, int(trial_rng(seed, t, 2).integers(2**62)))
    ids = class_edge_ids(col, sigma)
    # class subgraphs must partition E(G)
    allids = np.concatenate(ids) if ids else np.zeros(0, dtype=np.int64)
    assert len(allids) == g.e and len(np.unique(allids)) == g.e

    ha, hb = h_l.root
    root_cls = sigma.class_of((min(ha, hb), max(ha, hb)))
    g12 = g.spanning_subgraph(ids[root_cls].tolist())
    v_parts = [layout.part(f"V{i}") for i in range(1, s.n + 1)]
    cnt12 = transversal_counts(g12, s, v_parts, isolated=isolated_subgraph(g12, s))
    cnt = transversal_counts(g, s, v_parts, isolated=isolated_subgraph(g, s))

    # part hosting each H vertex: roots -> V1, V2; others -> U3.. in order
    others = [x for x in range(h.n) if x not in (ha, hb)]
    part_of = {ha: layout.part("V1"), hb: layout.part("V2")}
    for k, x in enumerate(others):
        part_of[x] = layout.part(f"U{k + 3}")
    v_union = set().union(*map(set, v_parts))
    p_in = 1 - (1 - p) * (1 - qp)
    degree, circuits = [], []
    for ci, (x, y) in enumerate(h_edges):
        px, py = part_of[x], part_of[y]
        sx, sy = set(px), set(py)
        sub = Graph(n, (e for e in (g.edges[i] for i in ids[ci].tolist())
                        if (e[0] in sx and e[1] in sy) or (e[0] in sy and e[1] in sx)))
        pp = p_in if (sx <= v_union and sy <= v_union) else qp
        ref = pp * (len(px) + len(py)) / 2 / len(h_edges)
        if ref > 0:
            rep = degree_concentration_report(sub, ref, delta, vertices=list(px) + list(py))
            degree.append({"edge": [x, y], **rep.to_dict()})
        verts = sorted(v for v in sx | sy if sub.degree(v) > 0)
        bip = sub.induced(verts)
        entry = {"edge": [x, y], "edges": bip.e, "length": 2 * ell}
        if bip.e:
            entry["circuit_weight_sum"] = circuit_weight_sum(bip, 2 * ell)
            circ = count_circuits(bip, 2 * ell)
            cyc = count_cycles(bip, 2 * ell) if (2 * ell == 4 or bip.n <= 60) else None
            entry["circuits"] = circ
            entry["cycles"] = cyc
            entry["circuit_cycle_ratio"] = circ / (2 * 2 * ell * cyc) if cyc else None
        circuits.append(entry)

    found = _bounded_rainbow(g, col.colors, amalg, search_budget)
    rec = TrialRecord(
        trial=t,
        seed=seed,
        edges=g.e,
        colors_used=col.num_colors,
        strategy=strategy,
        rainbow_amalgam=found,
        y_class=cnt12.y,
        z_class=cnt12.z,
        y_host=cnt.y,
        z_host=cnt.z,
        y_target=alpha * n ** s.n * p ** s.e,
        degree=degree,
        circuits=circuits,
        wall_time=(time.perf_counter() - t0) if timing else None,
    )
    return rec.to_dict()


def _bounded_rainbow(g: Graph, colors, h: Graph, budget: Optional[int]) -> Optional[bool]:
    if budget is not None and g.e > budget:
        return None
    return find_rainbow_copy(g, colors, h) is not None


def run_pipeline_experiment(config: ExperimentConfig) -> dict:
    """One or more instances of the color-partition pipeline.

    Samples the two-layer graph, colors it, sends every color to a uniform
    edge of H, and reports the isolated transversal S-copies of the class
    graph of the rooted edge together with degree and circuit diagnostics of
    every class graph.
    """
    for name in ("S", "F", "H"):
        if getattr(config, name) is None:
            raise ConfigError(f"pipeline needs {name}")
    s_l, f_l, h_l = _labeled(config.S), _labeled(config.F), _labeled(config.H)
    s, f, h = s_l.graph, f_l.graph, h_l.graph
    if s.n < f.n or s.e < f.e:
        raise ConfigError("S must be at least as large as F")
    if config.n is None:
        raise ConfigError("pipeline needs n")
    n = config.n
    if n > MAX_PIPELINE_N:
        raise InfeasibleInstance(f"pipeline limited to n <= {MAX_PIPELINE_N}")
    (p, expo), = config.p_values()[:1]
    q = 6 * s.e * n ** (s.n - 2) * p ** s.e
    qp = h.e * q if config.q_prime is None else config.q_prime
    if not 0 <= qp <= p:
        raise InfeasibleInstance(
            f"q' = {qp:.4g} must lie in [0, p = {p:.4g}]; lower p, raise n or set q_prime"
        )
    parts = s.n + h.n - 2
    if n < parts:
        raise InfeasibleInstance(f"n must be at least {parts}")
    layout = PartitionLayout.for_pipeline(n, s.n, h.n)
    tasks = [
        (n, p, qp, s_l, f_l, h_l, layout, config.strategy, config.seed, t,
         config.alpha, config.ell, config.delta, config.search_budget, config.timing)
        for t in range(config.trials)
    ]
    records = run_trials(_pipeline_trial, tasks, config.workers)
    ratios = [r["y_class"] / r["y_host"] for r in records if r["y_host"]]
    summary = {
        "p": p,
        "exponent": _num(expo),
        "q": q,
        "q_prime": qp,
        "q_prime_derived": config.q_prime is None,
        "expected_class_share": len(h.edges) ** (-s.e),
        "mean_y_ratio": float(np.mean(ratios)) if ratios else None,
        "y_target": config.alpha * n ** s.n * p ** s.e,
        "y_target_met": sum(1 for r in records if r["y_class"] >= r["y_target"]),
        "rainbow_found": sum(1 for r in records if r["rainbow_amalgam"]),
        "trials": config.trials,
        "layout_sizes": [len(x) for x in layout.parts],
        "layout_roles": list(layout.roles),
    }
    return {"summary": summary, "trials": records}


# ----------------------------------------------------------------------
# other kinds

def _diag_trial(args) -> list[dict]:
    n, p, T, strategy, seed, t, ells, eps, mode, probes, delta = args
    g = sample_gnp_graph(n, p, trial_rng(seed, t))
    col = proper_color(g, strategy, seed=int(trial_rng(seed, t, 1).integers(2**31)))
    sigma = assign_colors(col, T, int(trial_rng(seed, t, 2).integers(2**62)))
    out = []
    for k, ids in enumerate(class_edge_ids(col, sigma)):
        gt = g.spanning_subgraph(ids.tolist())
        rep = diagnose(gt, ells, eps, mode, probes, seed, reference=p * n / T, delta=delta)
        out.append({"trial": t, "class": k, **rep.to_dict()})
    return out


def run_diagnostics(config: ExperimentConfig) -> dict:
    ells = (2 * config.ell,)
    if config.host is not None:
        g = _graph(config.host)
        rep = diagnose(g, ells, config.eps, config.mode, config.probes, config.seed, delta=config.delta)
        return {"graph": config.host, **rep.to_dict()}
    if config.n is None or config.p is None:
        raise ConfigError("diagnostics needs host, or n and p")
    T = 1 if config.classes == "edges" else int(config.classes)
    tasks = [(config.n, config.p, T, config.strategy, config.seed, t, ells, config.eps,
              config.mode, config.probes, config.delta) for t in range(config.trials)]
    per = run_trials(_diag_trial, tasks, config.workers)
    return {"n": config.n, "p": config.p, "classes": T, "results": [x for r in per for x in r]}


def run_density(config: ExperimentConfig) -> dict:
    out: dict = {"graphs": {}}
    for name in config.graphs:
        out["graphs"][name] = m2_density(_graph(name)).to_dict()
    if config.H is not None and config.S is not None:
        out["beta"] = str(beta(_labeled(config.H).graph, _labeled(config.S).graph))
    if config.F is not None and config.H is not None and config.S is not None:
        rep = check_theorem_hypotheses(_labeled(config.F), _labeled(config.H), _labeled(config.S).graph,
                                       arrows_budget=config.budget if config.budget is not None else 1_000_000)
        out["hypotheses"] = rep.to_dict()
    if config.H is not None and config.t is not None:
        out["corollary"] = check_corollary_gap(_labeled(config.H), config.t).to_dict()
    return out


def run_arrows(config: ExperimentConfig) -> dict:
    if config.host is None or config.target is None:
        raise ConfigError("arrows needs host and target")
    res = arrows_rainbow(_graph(config.host), _graph(config.target), budget=config.budget)
    return {"host": config.host, "target": config.target, **res.to_dict()}


def run_book_lemma(config: ExperimentConfig) -> dict:
    if config.t is None:
        raise ConfigError("book-lemma needs t")
    res = verify_book_lemma(config.t, budget=config.budget)
    return {"t": config.t, "host": f"B{3 * config.t - 2}", "target": f"B{config.t}", **res.to_dict()}


def run_config(config: ExperimentConfig) -> dict:
    config.validate()
    if config.kind == "threshold-curve":
        results = run_threshold_curve(config).to_dict()
    elif config.kind == "pipeline":
        results = run_pipeline_experiment(config)
    elif config.kind == "diagnostics":
        results = run_diagnostics(config)
    elif config.kind == "density":
        results = run_density(config)
    elif config.kind == "arrows":
        results = run_arrows(config)
    else:
        results = run_book_lemma(config)
    return {"schema_version": SCHEMA_VERSION, "kind": config.kind, "config": config.to_dict(), "results": results}


# ----------------------------------------------------------------------
# persistence

CSV_COLUMNS = {
    "threshold-curve": ["p", "exponent", "frequency", "trials", "ci_low", "ci_high", "strategy"],
}


def _rows_for_csv(report: dict) -> tuple[list[str], list[dict]]:
    kind = report.get("kind")
    res = report.get("results", {})
    if kind == "threshold-curve" or "rows" in res:
        return CSV_COLUMNS["threshold-curve"], res.get("rows", [])
    if kind == "pipeline":
        rows = []
        for r in res.get("trials", []):
            rows.append({k: r[k] for k in ("trial", "edges", "colors_used", "y_class", "z_class", "y_host", "z_host", "y_target", "rainbow_amalgam")})
        return ["trial", "edges", "colors_used", "y_class", "z_class", "y_host", "z_host", "y_target", "rainbow_amalgam"], rows
    raise ValueError(f"no CSV layout for kind {kind!r}; use json")


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return repr(x)
    return str(x)


def render_report(report: dict, fmt: str = "json") -> str:
    if fmt == "json":
        return json.dumps(report, sort_keys=True, indent=2) + "\n"
    if fmt != "csv":
        raise ValueError(f"unknown format {fmt!r}")
    cols, rows = _rows_for_csv(report)
    buf = io.StringIO()
    buf.write(f"# schema_version={report.get('schema_version', SCHEMA_VERSION)} kind={report.get('kind', '')}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    for r in rows:
        w.writerow([_fmt(r.get(c)) for c in cols])
    return buf.getvalue()


def emit_report(report: dict, fmt: str = "json", path: Optional[str | Path] = None) -> str:
    """Render ``report`` and write it to ``path`` (if given); returns the text."""
    text = render_report(report, fmt)
    if path is not None:
        try:
            Path(path).write_text(text)
        except OSError as exc:
            raise OSError(f"cannot write report to {path}: {exc}") from exc
    return text


def _parse_cell(s: str):
    if s == "":
        return None
    if s in ("true", "false"):
        return s == "true"
    try:
        return int(s)
    except ValueError:
        pass
    try:
        return float(s)
    except ValueError:
        return s


def load_report(path: str | Path) -> dict:
    """Parse a report written by :func:`emit_report` (either format)."""
    text = Path(path).read_text()
    if text.startswith("#"):
        first, _, body = text.partition("\n")
        meta = dict(tok.split("=", 1) for tok in first[1:].split() if "=" in tok)
        reader = csv.reader(io.StringIO(body))
        header = next(reader, [])
        rows = [{c: _parse_cell(v) for c, v in zip(header, r)} for r in reader]
        return {"schema_version": int(meta["schema_version"]), "kind": meta.get("kind"), "columns": header, "rows": rows}
    return json.loads(text)
