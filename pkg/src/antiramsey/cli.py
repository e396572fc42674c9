"""``antiramsey`` command-line interface.

Exit codes: 0 success, 2 configuration error, 3 infeasible instance.
"""

from __future__ import annotations

import argparse
import sys
from typing import Optional, Sequence

from .experiments import (
    ConfigError,
    ExperimentConfig,
    InfeasibleInstance,
    emit_report,
    run_config,
)
from .random_models import STRATEGIES

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INFEASIBLE = 3

SUBCOMMAND_KIND = {
    "density": "density",
    "arrows": "arrows",
    "book-lemma": "book-lemma",
    "gnp-experiment": "threshold-curve",
    "pipeline": "pipeline",
    "diagnose": "diagnostics",
}


def _floats(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _classes(text: str):
    return text if text == "edges" else int(text)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, help="base seed (default 0)")
    common.add_argument("--threads", type=int, default=None, help="worker processes (default 1)")
    common.add_argument("--output", help="write the report here instead of stdout")
    common.add_argument("--format", choices=("json", "csv"), help="report format (default json)")
    common.add_argument("--config", help="JSON config file; explicit flags override its values")
    common.add_argument("--timing", action="store_true", default=None, help="include wall times (breaks byte-stability)")

    ap = argparse.ArgumentParser(prog="antiramsey", description="Rainbow Ramsey experiments on small and random graphs.")
    sub = ap.add_subparsers(dest="command", required=True)

    d = sub.add_parser("density", parents=[common], help="m2-density, beta and hypothesis checks")
    d.add_argument("graphs", nargs="*", help="named graphs (K4, C5, B3, P4, g6:...)")
    d.add_argument("--S", dest="S", help="2-labeled S, e.g. B4@0-1")
    d.add_argument("--F", dest="F", help="2-labeled F")
    d.add_argument("--H", dest="H", help="2-labeled H")
    d.add_argument("--t", type=int, help="book parameter for the corollary gap check (needs --H)")
    d.add_argument("--budget", type=int, help="search-node budget for the S ->rb F check")

    a = sub.add_parser("arrows", parents=[common], help="decide G ->rb H exactly")
    a.add_argument("host", nargs="?", help="host graph G (may come from --config)")
    a.add_argument("target", nargs="?", help="target graph H")
    a.add_argument("--budget", type=int)

    b = sub.add_parser("book-lemma", parents=[common], help="decide B_{3t-2} ->rb B_t")
    b.add_argument("t", type=int, nargs="?", help="book parameter (may come from --config)")
    b.add_argument("--budget", type=int)

    g = sub.add_parser("gnp-experiment", parents=[common], help="threshold curve for a rainbow target in G(n,p)")
    g.add_argument("--target", help="target graph H (default K3)")
    g.add_argument("--n", type=int)
    g.add_argument("--p-grid", dest="p_grid", type=_floats)
    g.add_argument("--beta-grid", dest="beta_grid", type=_floats, help="exponents; p = C n^-beta")
    g.add_argument("--C", dest="C", type=float)
    g.add_argument("--strategy", choices=STRATEGIES)
    g.add_argument("--trials", type=int)

    p = sub.add_parser("pipeline", parents=[common], help="one color-partition pipeline run per trial")
    p.add_argument("--S", dest="S")
    p.add_argument("--F", dest="F")
    p.add_argument("--H", dest="H")
    p.add_argument("--n", type=int)
    p.add_argument("--p", type=float)
    p.add_argument("--beta-grid", dest="beta_grid", type=_floats, help="single exponent; p = C n^-beta")
    p.add_argument("--C", dest="C", type=float)
    p.add_argument("--strategy", choices=STRATEGIES)
    p.add_argument("--trials", type=int)
    p.add_argument("--q-prime", dest="q_prime", type=float, help="override q' = e(H) q (must not exceed p)")
    p.add_argument("--alpha", type=float)
    p.add_argument("--ell", type=int, help="circuit length is 2*ell")
    p.add_argument("--delta", type=float)

    x = sub.add_parser("diagnose", parents=[common], help="pseudorandomness diagnostics")
    x.add_argument("--graph", dest="host", help="named graph; otherwise sample G(n,p)")
    x.add_argument("--n", type=int)
    x.add_argument("--p", type=float)
    x.add_argument("--classes", type=_classes, help="T color classes ('edges' means 1)")
    x.add_argument("--strategy", choices=STRATEGIES)
    x.add_argument("--trials", type=int)
    x.add_argument("--ell", type=int)
    x.add_argument("--eps", type=float)
    x.add_argument("--delta", type=float)
    x.add_argument("--mode", choices=("exact", "sampled"))
    x.add_argument("--probes", type=int)
    return ap


_GLOBAL_MAP = {"threads": "workers"}


def config_from_args(ns: argparse.Namespace) -> ExperimentConfig:
    kind = SUBCOMMAND_KIND[ns.command]
    base: dict = {}
    if ns.config:
        loaded = ExperimentConfig.load(ns.config)
        if loaded.kind != kind:
            raise ConfigError(f"config kind {loaded.kind!r} does not match subcommand {ns.command!r}")
        base = loaded.to_dict(include_exec=True)
    base["kind"] = kind
    for key, val in vars(ns).items():
        if key in ("command", "config") or val is None:
            continue
        if key == "graphs" and not val:
            continue
        base[_GLOBAL_MAP.get(key, key)] = val
    if kind == "threshold-curve":
        base.setdefault("target", "K3")
    if kind == "pipeline" and base.get("beta_grid") and len(base["beta_grid"]) != 1:
        raise ConfigError("pipeline takes a single exponent")
    return ExperimentConfig.from_dict(base)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        cfg = config_from_args(ns)
        report = run_config(cfg)
        text = emit_report(report, cfg.format, cfg.output)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except InfeasibleInstance as exc:
        print(f"infeasible instance: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        # CSV layout missing for this kind, bad graph name reaching a constructor, ...
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if cfg.output is None:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
