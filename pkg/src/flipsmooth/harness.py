"""Seeded experiment driver: trials, sweeps and oracle verification.

Per-trial randomness comes from ``derive_seed(base_seed, trial, stream)`` with
separate streams for weights, the initial cut and the pivot rule.
"""
from __future__ import annotations

import csv
import dataclasses
import json
import os
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from . import generators
from .analysis import Analyzer, BoundReport, theoretical_bound
from .flip_engine import FlipTrace, PivotRule, Status, run, write_trace_csv
from .graph_core import GraphTopology, WeightAssignment, cut_weight, degeneracy, read_graph
from .leveling import Leveling, peel_partition, write_leveling
from .oracle import MAX_BRUTE_N, brute_force
from .smoothing import (INITIAL_CUT, PIVOT, WEIGHTS, Kind, SmoothedModel, derive_seed,
                        make_rng, sample_weights)

FAMILIES = ("forest-union", "preferential-attachment", "complete", "grid")
TIMING_FIELDS = ("wall_time",)
VERIFY_MAX_N = 16


class ConfigError(ValueError):
    pass


def build_graph(spec: dict) -> GraphTopology:
    """Graph from ``{"path": ...}`` or ``{"family": ..., <generator params>}``."""
    if "path" in spec:
        g, _ = read_graph(spec["path"])
        return g
    family = spec.get("family")
    try:
        if family == "forest-union":
            return generators.gen_forest_union(int(spec["n"]), int(spec["alpha"]),
                                               int(spec.get("seed", 0)),
                                               float(spec.get("drop_prob", 0.2)))
        if family == "preferential-attachment":
            return generators.gen_preferential_attachment(int(spec["n"]), int(spec["m_attach"]),
                                                          int(spec.get("seed", 0)))
        if family == "complete":
            return generators.gen_complete(int(spec["n"]))
        if family == "grid":
            return generators.gen_grid(int(spec["rows"]), int(spec["cols"]))
    except KeyError as exc:
        raise ConfigError(f"family {family!r} needs parameter {exc.args[0]!r}") from None
    raise ConfigError(f"unknown graph family {family!r}; choose from {', '.join(FAMILIES)}")


def family_alpha(spec: dict, g: GraphTopology) -> int:
    """Arboricity upper bound implied by how the graph was made."""
    family = spec.get("family")
    if family == "forest-union":
        return int(spec["alpha"])
    if family == "preferential-attachment":
        return int(spec["m_attach"])
    if family == "grid":
        return 2 if g.m else 1
    if family == "complete":
        return max(1, (g.n + 1) // 2)
    return max(1, degeneracy(g)[0])


def build_model(spec: dict, m: int) -> SmoothedModel:
    kind = Kind(spec.get("kind", Kind.UNIFORM.value))
    if kind is Kind.UNIFORM:
        return SmoothedModel.uniform()
    base = spec.get("base")
    if base is None:
        raise ConfigError("AdversarialPlusNoise needs 'base'")
    if isinstance(base, (int, float)):
        base = [float(base)] * m
    return SmoothedModel.adversarial(float(spec["phi"]), base)


@dataclass
class ExperimentConfig:
    graph: dict
    model: dict = field(default_factory=lambda: {"kind": "Uniform", "phi": 0.5})
    rule: str = PivotRule.FIRST_IMPROVING.value
    init: str = "random"  # "zeros", "random", or a path to {"side": [...]}
    trials: int = 1
    seed: int = 0
    c: float = 1.0
    beta: float = 2.0
    alpha: Optional[int] = None
    max_steps: Optional[int] = None
    output: Optional[str] = None

    def __post_init__(self):
        try:
            PivotRule(self.rule)
        except ValueError:
            raise ConfigError(f"unknown pivot rule {self.rule!r}") from None
        if self.trials < 0:
            raise ConfigError("trials must be >= 0")
        if self.c <= 0:
            raise ConfigError("c must be > 0")
        if self.max_steps is not None and self.max_steps < 0:
            raise ConfigError("max_steps must be >= 0")

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, doc: dict) -> "ExperimentConfig":
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = set(doc) - names
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        return cls(**doc)


@dataclass(frozen=True)
class TrialRecord:
    trial: int
    seed: int
    T: int
    status: str
    final_cut_weight: float
    good_pairs: int
    min_pair_gain: Optional[float]
    max_gap: int
    initial_potential: str
    epsilon_c: float
    explicit_bound: float
    wall_time: float

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


@dataclass
class Context:
    """Everything shared by the trials of one configuration (immutable in practice)."""

    config: ExperimentConfig
    g: GraphTopology
    lv: Leveling
    model: SmoothedModel
    bound: BoundReport
    initial_file: Optional[tuple] = None

    @property
    def max_steps(self) -> int:
        if self.config.max_steps is not None:
            return self.config.max_steps
        return (2 ** self.g.n) * self.g.n


def prepare(cfg: ExperimentConfig) -> Context:
    try:
        g = build_graph(cfg.graph)
        alpha = cfg.alpha if cfg.alpha is not None else family_alpha(cfg.graph, g)
        model = build_model(cfg.model, g.m)
    except (ValueError, OSError) as exc:
        raise ConfigError(str(exc)) from exc
    lv = peel_partition(g, alpha, cfg.beta)  # PartitionError passes through
    bound = theoretical_bound(max(g.n, 2), model.phi, alpha, cfg.beta, cfg.c)
    initial = None
    if cfg.init not in ("zeros", "random"):
        try:
            side = json.loads(Path(cfg.init).read_text())["side"]
        except (OSError, ValueError, KeyError) as exc:
            raise ConfigError(f"cannot read initial cut {cfg.init!r}: {exc}") from exc
        if len(side) != g.n:
            raise ConfigError(f"initial cut has {len(side)} entries for {g.n} nodes")
        initial = tuple(int(s) for s in side)
    return Context(cfg, g, lv, model, bound, initial)


def trial_weights(ctx: Context, t: int) -> WeightAssignment:
    return sample_weights(ctx.model, ctx.g, derive_seed(ctx.config.seed, t, WEIGHTS))


def trial_initial_cut(ctx: Context, t: int) -> tuple:
    policy = ctx.config.init
    if policy == "zeros":
        return (0,) * ctx.g.n
    if policy == "random":
        rng = make_rng(derive_seed(ctx.config.seed, t, INITIAL_CUT))
        return tuple(int(b) for b in rng.integers(0, 2, size=ctx.g.n))
    return ctx.initial_file


@dataclass
class TrialResult:
    record: TrialRecord
    trace: FlipTrace
    annotations: list
    weights: WeightAssignment
    analyzer: Analyzer


def run_trial(ctx: Context, t: int) -> TrialResult:
    start = time.perf_counter()
    w = trial_weights(ctx, t)
    initial = trial_initial_cut(ctx, t)
    rng = make_rng(derive_seed(ctx.config.seed, t, PIVOT))
    an = Analyzer(ctx.g, ctx.lv, w)
    trace = run(ctx.g, w, initial, PivotRule(ctx.config.rule), ctx.max_steps, rng, observer=an)
    s = an.summary(trace.T, ctx.bound)
    final_weight = trace.steps[-1].cut_weight_after if trace.steps else cut_weight(ctx.g, w, initial)
    rec = TrialRecord(
        trial=t,
        seed=derive_seed(ctx.config.seed, t, WEIGHTS),
        T=trace.T,
        status=trace.status.value,
        final_cut_weight=final_weight,
        good_pairs=s["good_pairs"],
        min_pair_gain=s["min_pair_gain"],
        max_gap=s["max_gap"],
        initial_potential=s["initial_potential"],
        epsilon_c=s["epsilon_c"],
        explicit_bound=s["explicit_bound"],
        wall_time=time.perf_counter() - start,
    )
    return TrialResult(rec, trace, an.annotations(), w, an)


def _trial_worker(args):
    ctx, t = args
    return run_trial(ctx, t)


def default_threads() -> int:
    try:
        return max(1, int(os.environ.get("FLIP_SMOOTH_THREADS", "1")))
    except ValueError:
        return 1


def run_trials(ctx: Context, threads: int = 1) -> list[TrialResult]:
    """All trials of a context, ordered by trial index."""
    jobs = [(ctx, t) for t in range(ctx.config.trials)]
    if threads <= 1 or len(jobs) <= 1:
        return [_trial_worker(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(_trial_worker, jobs))


def record_line(rec: TrialRecord) -> str:
    return json.dumps(rec.to_dict(), sort_keys=True)


def run_experiment(cfg: ExperimentConfig, threads: int = 1, write_traces: bool = True):
    """Run every trial and write ``summary.jsonl`` plus per-trial traces under ``cfg.output``."""
    ctx = prepare(cfg)
    results = run_trials(ctx, threads)
    if cfg.output:
        out = Path(cfg.output)
        out.mkdir(parents=True, exist_ok=True)
        (out / "config.json").write_text(json.dumps(cfg.to_dict(), sort_keys=True, indent=1) + "\n")
        write_leveling(out / "leveling.json", ctx.lv)
        with open(out / "summary.jsonl", "w") as f:
            for r in results:
                f.write(record_line(r.record) + "\n")
        if write_traces:
            (out / "traces").mkdir(exist_ok=True)
            for r in results:
                write_trace_csv(out / "traces" / f"trace_{r.record.trial:04d}.csv",
                                r.trace, r.annotations)
    return ctx, results


def all_optimal(results) -> bool:
    return all(r.record.status == Status.LOCAL_OPTIMUM.value for r in results)


# -- sweep --

SWEEP_KEYS = ("family", "n", "alpha", "beta", "phi", "rule")


def sweep(configs: list[ExperimentConfig], threads: int = 1) -> tuple[list[dict], list[dict]]:
    """Rows per (config, trial) and a median-T row per config.

    A configuration that fails (bad parameters, partition failure) yields one
    row carrying its error; the remaining configurations still run.
    """
    if not configs:
        raise ConfigError("empty sweep grid")
    rows, medians = [], []
    for k, cfg in enumerate(configs):
        key = {
            "config": k,
            "family": cfg.graph.get("family", cfg.graph.get("path")),
            "n": cfg.graph.get("n", ""),
            "alpha": cfg.alpha if cfg.alpha is not None else cfg.graph.get("alpha", ""),
            "beta": cfg.beta,
            "phi": cfg.model.get("phi", 0.5),
            "rule": cfg.rule,
        }
        try:
            ctx = prepare(cfg)
            results = run_trials(ctx, threads)
        except ValueError as exc:
            rows.append({**key, "error": str(exc)})
            medians.append({**key, "trials": 0, "median_T": "", "error": str(exc)})
            continue
        key["n"] = ctx.g.n
        key["alpha"] = ctx.lv.alpha
        for r in results:
            rec = r.record.to_dict()
            rec["within_bound"] = r.record.T <= ctx.bound.explicit_bound
            rows.append({**key, **rec, "error": ""})
        Ts = [r.record.T for r in results]
        medians.append({**key, "trials": len(Ts),
                        "median_T": statistics.median(Ts) if Ts else "", "error": ""})
    return rows, medians


def write_rows(path, rows: list[dict]) -> None:
    cols: list[str] = []
    for r in rows:
        for k in r:
            if k not in cols:
                cols.append(k)
    with open(path, "w", newline="") as f:
        out = csv.DictWriter(f, fieldnames=cols, lineterminator="\n", restval="")
        out.writeheader()
        for r in rows:
            out.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in r.items()})


# -- verification against the oracle --

@dataclass
class VerifyReport:
    passed: int = 0
    failed: int = 0
    budget_exhausted: int = 0
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.failed == 0


def verify_cut(g: GraphTopology, w: WeightAssignment, cut, oracle=None) -> tuple[bool, str]:
    """Is ``cut`` a brute-force local optimum with weight at most the maximum cut?"""
    bf = oracle if oracle is not None else brute_force(g, w)
    if not bf.contains(cut):
        return False, "terminal cut is not among the enumerated local optima"
    if cut_weight(g, w, cut) > bf.max_cut_weight + 1e-9:
        return False, "terminal cut weight exceeds the maximum cut weight"
    return True, ""


def verify(cfg: ExperimentConfig, threads: int = 1) -> VerifyReport:
    ctx = prepare(cfg)
    if ctx.g.n > min(VERIFY_MAX_N, MAX_BRUTE_N):
        raise ConfigError(f"verify needs n <= {VERIFY_MAX_N}, got n={ctx.g.n}")
    report = VerifyReport()
    for r in run_trials(ctx, threads):
        if r.trace.status is Status.BUDGET_EXHAUSTED:
            report.budget_exhausted += 1
            continue
        ok, why = verify_cut(ctx.g, r.weights, r.trace.final)
        if ok:
            report.passed += 1
        else:
            report.failed += 1
            report.failures.append((r.record.trial, why))
    return report
