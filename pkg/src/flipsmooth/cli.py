"""Command-line entry point: generate, run, sweep, verify, bound.

Exit codes: 0 success, 1 verification or assertion failure, 2 configuration error.
"""
from __future__ import annotations

import argparse
import itertools
import json
import sys
from pathlib import Path

from . import harness
from .analysis import theoretical_bound
from .flip_engine import PivotRule
from .graph_core import GraphError, degeneracy, write_graph
from .leveling import PartitionError

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


def _graph_flags(p: argparse.ArgumentParser, multi: bool = False) -> None:
    nargs = "+" if multi else None
    p.add_argument("--family", choices=harness.FAMILIES, default=None)
    p.add_argument("--n", type=int, nargs=nargs)
    p.add_argument("--m-attach", type=int)
    p.add_argument("--rows", type=int)
    p.add_argument("--cols", type=int)
    p.add_argument("--drop-prob", type=float, default=0.2)


def _trial_flags(p: argparse.ArgumentParser, multi: bool = False) -> None:
    nargs = "+" if multi else None
    p.add_argument("--config", help="JSON experiment config; explicit flags override it")
    p.add_argument("--graph", help="graph file instead of --family")
    p.add_argument("--graph-seed", type=int, default=0)
    p.add_argument("--alpha", type=int, nargs=nargs)
    p.add_argument("--beta", type=float, nargs=nargs)
    p.add_argument("--phi", type=float, nargs=nargs,
                   help="density bound; 0.5 selects the uniform model")
    p.add_argument("--base", type=float, help="adversarial offset for every edge (phi > 0.5)")
    p.add_argument("--rule", choices=[r.value for r in PivotRule], nargs=nargs)
    p.add_argument("--init", help="zeros, random, or a JSON file {\"side\": [...]}")
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int, help="base seed")
    p.add_argument("--c", type=float)
    p.add_argument("--max-steps", type=int)
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("-o", "--output")


def _graph_spec(args, n=None, alpha=None) -> dict:
    if args.graph:
        return {"path": args.graph}
    if args.family is None:
        raise harness.ConfigError("give --graph or --family")
    spec = {"family": args.family}
    if n is not None:
        spec["n"] = n
    if args.family == "forest-union":
        if alpha is None:
            raise harness.ConfigError("forest-union needs --alpha")
        spec["alpha"] = alpha
        spec["drop_prob"] = args.drop_prob
    for key in ("m_attach", "rows", "cols"):
        if getattr(args, key, None) is not None:
            spec[key] = getattr(args, key)
    seed = getattr(args, "graph_seed", None)
    if seed is None:
        seed = getattr(args, "seed", None)
    if args.family in ("forest-union", "preferential-attachment"):
        spec["seed"] = seed if seed is not None else 0
    return spec


def _model_spec(phi, base):
    if phi is None or (phi == 0.5 and base is None):
        return {"kind": "Uniform", "phi": 0.5}
    if base is None:
        raise harness.ConfigError("phi > 0.5 needs --base for the AdversarialPlusNoise model")
    return {"kind": "AdversarialPlusNoise", "phi": phi, "base": base}


def _config(args, n=None, alpha=None, beta=None, phi=None, rule=None) -> harness.ExperimentConfig:
    doc = {}
    if args.config:
        doc = json.loads(Path(args.config).read_text())
    if args.graph or args.family:
        doc["graph"] = _graph_spec(args, n, alpha)
    if "graph" not in doc:
        raise harness.ConfigError("give --graph, --family, or a config with 'graph'")
    if phi is not None or args.base is not None:
        doc["model"] = _model_spec(phi, args.base)
    for key, val in (("alpha", alpha), ("beta", beta), ("rule", rule), ("init", args.init),
                     ("trials", args.trials), ("seed", args.seed), ("c", args.c),
                     ("max_steps", args.max_steps), ("output", args.output)):
        if val is not None:
            doc[key] = val
    return harness.ExperimentConfig.from_dict(doc)


def _threads(args) -> int:
    return args.threads if args.threads is not None else harness.default_threads()


def cmd_generate(args) -> int:
    spec = _graph_spec(args, args.n, args.alpha)
    g = harness.build_graph(spec)
    write_graph(args.output, g)
    d, _ = degeneracy(g)
    print(f"n={g.n} m={g.m} degeneracy={d}")
    return EXIT_OK


def cmd_run(args) -> int:
    cfg = _config(args, args.n, args.alpha, args.beta, args.phi, args.rule)
    _, results = harness.run_experiment(cfg, _threads(args))
    for r in results:
        rec = r.record
        print(f"trial {rec.trial}: T={rec.T} status={rec.status} good_pairs={rec.good_pairs} "
              f"max_gap={rec.max_gap}")
    return EXIT_OK if harness.all_optimal(results) else EXIT_FAIL


def cmd_sweep(args) -> int:
    ns = args.n or [None]
    alphas = args.alpha or [None]
    betas = args.beta or [None]
    phis = args.phi or [None]
    rules = args.rule or [None]
    configs = [
        _config(args, n, a, b, p, r)
        for n, a, b, p, r in itertools.product(ns, alphas, betas, phis, rules)
    ]
    rows, medians = harness.sweep(configs, _threads(args))
    out = Path(args.output or ".")
    out.mkdir(parents=True, exist_ok=True)
    harness.write_rows(out / "sweep.csv", rows)
    harness.write_rows(out / "sweep_medians.csv", medians)
    for m in medians:
        print(f"config {m['config']}: n={m['n']} alpha={m['alpha']} beta={m['beta']} "
              f"median_T={m['median_T']} {m['error']}".rstrip())
    bad = [r for r in rows if r.get("error") or r.get("within_bound") is False]
    return EXIT_FAIL if bad else EXIT_OK


def cmd_verify(args) -> int:
    cfg = _config(args, args.n, args.alpha, args.beta, args.phi, args.rule)
    rep = harness.verify(cfg, _threads(args))
    print(f"passed={rep.passed} failed={rep.failed} budget_exhausted={rep.budget_exhausted}")
    for trial, why in rep.failures:
        print(f"  trial {trial}: {why}")
    return EXIT_OK if rep.ok else EXIT_FAIL


def cmd_bound(args) -> int:
    rep = theoretical_bound(args.n, args.phi, args.alpha, args.beta, args.c)
    print(json.dumps(rep.to_dict(), indent=1))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="flip-smooth", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write a generated graph file")
    _graph_flags(p)
    p.add_argument("--alpha", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_generate, graph=None)

    p = sub.add_parser("run", help="run seeded FLIP trials with analysis attached")
    _graph_flags(p)
    _trial_flags(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("sweep", help="run a grid of configurations")
    _graph_flags(p, multi=True)
    _trial_flags(p, multi=True)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("verify", help="check terminal cuts against brute force (n <= 16)")
    _graph_flags(p)
    _trial_flags(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("bound", help="print the explicit iteration bound")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--phi", type=float, default=0.5)
    p.add_argument("--alpha", type=int, required=True)
    p.add_argument("--beta", type=float, default=2.0)
    p.add_argument("--c", type=float, default=1.0)
    p.set_defaults(func=cmd_bound)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except PartitionError as exc:
        print(f"error: partition failed: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (harness.ConfigError, GraphError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
