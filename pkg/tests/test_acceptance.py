"""Acceptance criteria 1-12, one test each.

Every test records a single PASS/FAIL line (printed in the terminal summary)
before asserting, and checks its runtime budget alongside its tolerance.
"""

import json
import math
import time
from fractions import Fraction

import numpy as np
import pytest

from antiramsey.census import estimate_embed_probability, isolated_subgraph, transversal_counts
from antiramsey.cli import main
from antiramsey.density import beta, check_corollary_gap, m2_density
from antiramsey.diagnostics import (
    circuit_weight_sum,
    count_circuits,
    count_cycles,
    count_non_rainbow_cycles,
    disc_discrepancy,
)
from antiramsey.experiments import ExperimentConfig, run_threshold_curve
from antiramsey.graphs import (
    Graph,
    LabeledTwoGraph,
    amalgamate,
    disjoint_union,
    make_book,
    make_clique,
    make_cycle,
)
from antiramsey.rainbow import (
    arrows_rainbow,
    count_coloring_classes,
    find_rainbow_copy,
    is_proper,
    verify_book_lemma,
)
from antiramsey.random_models import (
    PartitionLayout,
    assign_colors,
    class_edge_ids,
    proper_color,
    sample_gnp_graph,
    trial_rng,
)
from oracles import (
    brute_census,
    brute_circuit_weight,
    brute_class_count,
    brute_trace,
    m2_by_edge_subsets,
    random_graph,
)


def test_criterion_01_density_table(report_criterion):
    t0 = time.perf_counter()
    bad = []
    for k in range(3, 8):
        g = make_clique(k)
        want = Fraction(k + 1, 2)
        if not (m2_density(g).value == want == m2_by_edge_subsets(g)):
            bad.append(f"K{k}")
    for k in range(4, 10):
        g = make_cycle(k)
        want = Fraction(k - 1, k - 2)
        if not (m2_density(g).value == want == m2_by_edge_subsets(g)):
            bad.append(f"C{k}")
    for t in range(1, 7):
        g = make_book(t)
        if not (m2_density(g).value == 2 == m2_by_edge_subsets(g)):
            bad.append(f"B{t}")
    dt = time.perf_counter() - t0
    ok = not bad and dt < 10
    report_criterion(1, ok, f"17 exact m2 values, mismatches={bad}, {dt:.1f}s (<10s)")
    assert ok


def test_criterion_02_corollary_arithmetic(report_criterion):
    t0 = time.perf_counter()
    half = Fraction(1, 2)
    bad = []
    for k in range(4, 8):
        h = LabeledTwoGraph(make_cycle(k))
        for t in range(1, 5):
            b = beta(h.graph, make_book(3 * t - 2))
            m2a = m2_density(amalgamate(LabeledTwoGraph(make_book(t)), h)).value
            gap = check_corollary_gap(h, t)
            if not (b > half and 1 / m2a <= half and gap.beta_value == b and gap.m2_amalgam == m2a):
                bad.append((k, t))
    dt = time.perf_counter() - t0
    ok = not bad and dt < 10
    report_criterion(2, ok, f"16 (H, t) pairs, failures={bad}, {dt:.1f}s (<10s)")
    assert ok


def test_criterion_03_book_lemma(report_criterion):
    t0 = time.perf_counter()
    r1 = verify_book_lemma(1)
    r2 = verify_book_lemma(2)
    neg = arrows_rainbow(make_book(2), make_book(2))
    c = neg.counterexample
    verified = (
        neg.verdict == "fails"
        and c is not None
        and is_proper(c.graph, c.colors)
        and find_rainbow_copy(c.graph, c.colors, make_book(2)) is None
    )
    dt = time.perf_counter() - t0
    ok = r1.verdict == "holds" and r2.verdict == "holds" and make_book(4).e == 9 and verified and dt < 300
    report_criterion(3, ok, f"B1->B1 {r1.verdict}, B4->B2 {r2.verdict}, B2->B2 {neg.verdict} (verified={verified}), {dt:.1f}s (<300s)")
    assert ok


def test_criterion_04_class_enumerator_oracle(report_criterion):
    t0 = time.perf_counter()
    rng = np.random.default_rng(20240401)
    corpus = []
    while len(corpus) < 20:
        g = random_graph(rng, int(rng.integers(3, 8)), float(rng.uniform(0.2, 0.7)))
        if 1 <= g.e <= 7:
            corpus.append(g)
    bad = [g for g in corpus if count_coloring_classes(g) != brute_class_count(g)]
    dt = time.perf_counter() - t0
    ok = not bad and dt < 60
    report_criterion(4, ok, f"20 graphs <=7 edges, mismatches={len(bad)}, {dt:.1f}s (<60s)")
    assert ok


def test_criterion_05_circuit_machinery(report_criterion):
    t0 = time.perf_counter()
    rng = np.random.default_rng(55)
    corpus = []
    while len(corpus) < 50:
        g = random_graph(rng, int(rng.integers(2, 8)), float(rng.uniform(0.3, 0.9)))
        if g.e and min(g.degrees) > 0:
            corpus.append(g)
    worst = 0.0
    trace_ok = True
    for g in corpus:
        for ell in (2, 3, 4, 5):
            worst = max(worst, abs(circuit_weight_sum(g, ell) - brute_circuit_weight(g, ell)))
            trace_ok &= count_circuits(g, ell) == brute_trace(g, ell)
    k3 = circuit_weight_sum(make_clique(3), 4)
    dt = time.perf_counter() - t0
    ok = worst <= 1e-9 and abs(k3 - 1.125) <= 1e-12 and trace_ok and dt < 60
    report_criterion(5, ok, f"max |spectral - enumerated| = {worst:.2e} (<=1e-9), K3 l=4 -> {k3!r}, traces exact={trace_ok}, {dt:.1f}s (<60s)")
    assert ok


def test_criterion_06_circuit_implies_disc(report_criterion):
    t0 = time.perf_counter()
    rng = np.random.default_rng(606)
    corpus = [make_clique(12), make_clique(9), disjoint_union(make_clique(5), make_clique(5))]
    while len(corpus) < 30:
        g = random_graph(rng, int(rng.integers(6, 13)), float(rng.uniform(0.3, 0.95)))
        if g.e and min(g.degrees) > 0:
            corpus.append(g)
    counterexamples = []
    nontrivial = 0
    for g in corpus:
        disc = disc_discrepancy(g, "exact").value
        for ell in (1, 2, 3):
            # smallest eps with CIRCUIT_{2l}(eps); the implication must hold for it and every larger eps
            eps = abs(circuit_weight_sum(g, 2 * ell) - 1.0)
            for e in (eps, eps * 1.5, eps + 0.05):
                if e < 1:
                    nontrivial += 1
                if disc > e ** (1 / (2 * ell)) + 1e-12:
                    counterexamples.append((g.n, g.e, ell, e, disc))
    dt = time.perf_counter() - t0
    ok = not counterexamples and dt < 600
    report_criterion(6, ok, f"30 graphs v<=12, {nontrivial} non-vacuous checks, counterexamples={len(counterexamples)}, {dt:.1f}s (<600s)")
    assert ok


def test_criterion_07_degree_concentration(report_criterion):
    t0 = time.perf_counter()
    n, p, T, delta, trials = 2000, 0.05, 3, 0.2, 20
    ref = p * n / T
    within = total = 0
    for t in range(trials):
        g = sample_gnp_graph(n, p, trial_rng(7, t))
        c = proper_color(g, "greedy")
        sigma = assign_colors(c, T, seed=int(trial_rng(7, t, 1).integers(2**62)))
        ea = g.edge_array
        for ids in class_edge_ids(c, sigma):
            deg = np.bincount(ea[ids].ravel(), minlength=n)
            within += int(np.sum(np.abs(deg - ref) <= delta * ref))
            total += n
    frac = within / total
    dt = time.perf_counter() - t0
    ok = frac >= 0.95 and dt < 300
    report_criterion(7, ok, f"fraction of (trial, vertex, class) within 1+-{delta} of pn/T = {frac:.4f} (need >=0.95), {dt:.1f}s (<300s)")
    assert ok


def test_criterion_08_non_rainbow_cycles(report_criterion):
    t0 = time.perf_counter()
    ns = (100, 200, 400)
    ratios, xs = [], []
    for n in ns:
        p = 4 / math.sqrt(n)
        nr = tot = 0
        for t in range(10):
            g = sample_gnp_graph(n, p, trial_rng(8, n, t))
            c = proper_color(g, "greedy")
            nr += count_non_rainbow_cycles(g, c, 4)
            tot += count_cycles(g, 4)
        ratios.append(nr / tot)
        xs.append(1 / (p * n))
    r, x = np.array(ratios), np.array(xs)
    # smallest c with ratio <= c/(pn) at every n
    c_fit = float(np.max(r / x))
    decreasing = bool(np.all(np.diff(r) < 0))
    dt = time.perf_counter() - t0
    ok = decreasing and c_fit <= 10 and dt < 600
    report_criterion(8, ok, f"ratios {[round(v, 4) for v in ratios]} at n={ns}, fitted c={c_fit:.2f} (<=10), decreasing={decreasing}, {dt:.1f}s (<600s)")
    assert ok


def test_criterion_09_negative_correlation(report_criterion):
    t0 = time.perf_counter()
    s = make_clique(3)
    lines, ok = [], True
    for es in ([(0, 1)], [(0, 1), (2, 3)]):
        est = estimate_embed_probability(30, 0.15, s, es, trials=100_000, seed=9)
        se = math.sqrt(max(est.frequency * (1 - est.frequency), 1e-12) / est.trials)
        good = est.frequency <= est.bound + 4 * se
        ok &= good
        lines.append(f"|E|={len(es)}: {est.frequency:.5f} <= {est.bound:.5f}+4se ({good})")
    dt = time.perf_counter() - t0
    ok = ok and dt < 300
    report_criterion(9, ok, f"{'; '.join(lines)}, {dt:.1f}s (<300s)")
    assert ok


def test_criterion_10_census_oracle(report_criterion):
    t0 = time.perf_counter()
    rng = np.random.default_rng(1010)
    corpus = [(make_book(t), make_clique(3)) for t in range(1, 6)]
    corpus += [(make_clique(4), make_clique(3)), (disjoint_union(make_clique(3), make_clique(3), Graph(2)), make_clique(3))]
    pats = [make_clique(3), make_cycle(4)]
    while len(corpus) < 30:
        corpus.append((random_graph(rng, int(rng.integers(4, 9)), float(rng.uniform(0.3, 0.7))), pats[len(corpus) % 2]))
    bad = 0
    for g, s in corpus:
        if g.n < s.n:
            continue
        parts = PartitionLayout.equitable(g.n, [str(i) for i in range(s.n)]).parts
        z, y, gs = brute_census(g, s, parts)
        tc = transversal_counts(g, s, parts)
        bad += (tc.z, tc.y) != (z, y) or set(isolated_subgraph(g, s).graph.edges) != gs
    dt = time.perf_counter() - t0
    ok = bad == 0 and dt < 60
    report_criterion(10, ok, f"30 instances v<=8, mismatches={bad}, {dt:.1f}s (<60s)")
    assert ok


def test_criterion_11_threshold_curve(report_criterion):
    t0 = time.perf_counter()
    n = 60
    cs = [0.5, 1.0, 1.5, 2.0, 3.0, 4.5, 6.0, 9.0]
    cfg = ExperimentConfig.from_dict(
        {"kind": "threshold-curve", "n": n, "target": "K3", "p_grid": [c / n for c in cs], "trials": 500, "seed": 11}
    )
    res = run_threshold_curve(cfg)
    freqs = [r["frequency"] for r in res.rows]
    model = [1 - math.exp(-(c ** 3) / 6) for c in cs]
    monotone = bool(np.all(np.diff(res.outcomes.astype(int), axis=1) >= 0))
    brackets = freqs[0] < 0.5 < freqs[-1]
    worst = max(abs(f - m) for f, m in zip(freqs, model))
    dt = time.perf_counter() - t0
    ok = monotone and brackets and worst <= 0.1 and dt < 600
    report_criterion(11, ok, f"freqs {[round(f, 3) for f in freqs]} at np={cs}, max |f - model| = {worst:.3f} (<=0.1), per-seed monotone={monotone}, {dt:.1f}s (<600s)")
    assert ok


REPRO_CONFIGS = [
    ({"kind": "threshold-curve", "n": 40, "target": "K3", "p_grid": [0.02, 0.05, 0.1], "trials": 60, "seed": 5}, "csv"),
    ({"kind": "threshold-curve", "n": 40, "target": "K3", "beta_grid": [1.0, 0.8], "C": 2.0, "trials": 30, "seed": 6}, "json"),
    ({"kind": "pipeline", "S": "K3@0-1", "F": "K3@0-1", "H": "C5@0-1", "n": 45, "p": 0.4, "q_prime": 0.05, "trials": 4, "seed": 3}, "json"),
    ({"kind": "pipeline", "S": "K3@0-1", "F": "K3@0-1", "H": "C5@0-1", "n": 45, "p": 0.4, "q_prime": 0.05, "trials": 4, "seed": 3}, "csv"),
    ({"kind": "diagnostics", "n": 30, "p": 0.3, "classes": 2, "trials": 3, "seed": 4}, "json"),
    ({"kind": "density", "graphs": ["K4", "B3"], "H": "C5@0-1", "t": 2}, "json"),
    ({"kind": "arrows", "host": "B2", "target": "B2"}, "json"),
    ({"kind": "book-lemma", "t": 1}, "json"),
]

SUBCOMMAND = {
    "threshold-curve": "gnp-experiment",
    "pipeline": "pipeline",
    "diagnostics": "diagnose",
    "density": "density",
    "arrows": "arrows",
    "book-lemma": "book-lemma",
}


def test_criterion_12_reproducibility(report_criterion, tmp_path):
    t0 = time.perf_counter()
    differing = []
    for k, (cfg, fmt) in enumerate(REPRO_CONFIGS):
        cfg_path = tmp_path / f"cfg{k}.json"
        cfg_path.write_text(json.dumps({"schema_version": 1, **cfg}))
        outputs = []
        for threads in (1, 4, 8):
            for rerun in range(2 if threads == 1 else 1):
                out = tmp_path / f"out{k}_{threads}_{rerun}.{fmt}"
                argv = [SUBCOMMAND[cfg["kind"]], "--config", str(cfg_path), "--threads", str(threads),
                        "--format", fmt, "--output", str(out)]
                assert main(argv) == 0
                outputs.append(out.read_bytes())
        if len(set(outputs)) != 1:
            differing.append(f"{cfg['kind']}/{fmt}")
    dt = time.perf_counter() - t0
    ok = not differing
    report_criterion(12, ok, f"{len(REPRO_CONFIGS)} configs x threads (1, 1, 4, 8), non-identical outputs={differing}, {dt:.1f}s")
    assert ok
