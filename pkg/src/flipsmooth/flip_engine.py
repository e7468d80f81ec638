"""FLIP local search for local Max-Cut with incremental gain maintenance."""
from __future__ import annotations

import csv
import enum
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .graph_core import Cut, GraphError, GraphTopology, WeightAssignment, cut_weight


class PivotRule(str, enum.Enum):
    FIRST_IMPROVING = "first-improving"
    MAX_GAIN = "max-gain"
    MIN_POSITIVE_GAIN = "min-positive-gain"
    RANDOM_IMPROVING = "random-improving"


class Status(str, enum.Enum):
    LOCAL_OPTIMUM = "LocalOptimum"
    BUDGET_EXHAUSTED = "BudgetExhausted"


def gain(g: GraphTopology, w: WeightAssignment, cut: Sequence[int], v: int) -> float:
    """Change in cut weight if ``v`` switches sides, computed from scratch."""
    if not 0 <= v < g.n:
        raise GraphError(f"node {v} out of range [0, {g.n})")
    s = cut[v]
    total = 0.0
    for u, e in g.adjacency[v]:
        if cut[u] == s:
            total += w[e]
        else:
            total -= w[e]
    return total


def is_local_optimum(g: GraphTopology, w: WeightAssignment, cut: Sequence[int]) -> bool:
    return all(gain(g, w, cut, v) <= 0 for v in range(g.n))


@dataclass
class CutState:
    side: list
    cut_weight: float
    gains: list
    last_flipped: int = -1
    t: int = 0

    @classmethod
    def start(cls, g: GraphTopology, w: WeightAssignment, initial: Sequence[int]) -> "CutState":
        side = [int(s) for s in initial]
        if len(side) != g.n or any(s not in (0, 1) for s in side):
            raise GraphError(f"initial cut must be {g.n} bits")
        return cls(side, cut_weight(g, w, side), [gain(g, w, side, v) for v in range(g.n)])

    @property
    def cut(self) -> Cut:
        return tuple(self.side)

    def drift(self, g: GraphTopology, w: WeightAssignment) -> float:
        """Largest deviation of the cached values from a from-scratch recomputation."""
        err = abs(self.cut_weight - cut_weight(g, w, self.side))
        for v in range(g.n):
            err = max(err, abs(self.gains[v] - gain(g, w, self.side, v)))
        return err


@dataclass(frozen=True)
class FlipStep:
    t: int
    node: int
    gain: float
    cut_weight_after: float


@dataclass
class FlipTrace:
    initial: Cut
    steps: list = field(default_factory=list)
    status: Status = Status.LOCAL_OPTIMUM
    final: Optional[Cut] = None

    @property
    def T(self) -> int:
        return len(self.steps)


def improving_moves(g: GraphTopology, w: WeightAssignment, state: CutState) -> list[tuple[int, float]]:
    return [(v, x) for v, x in enumerate(state.gains) if x > 0]


def _select(state: CutState, rule: PivotRule, rng) -> Optional[int]:
    gains = state.gains
    n = len(gains)
    if rule is PivotRule.FIRST_IMPROVING:
        start = state.last_flipped + 1
        for k in range(n):
            v = (start + k) % n
            if gains[v] > 0:
                return v
        return None
    if rule is PivotRule.MAX_GAIN:
        best = max(range(n), key=lambda v: (gains[v], -v), default=None)
        return best if best is not None and gains[best] > 0 else None
    if rule is PivotRule.MIN_POSITIVE_GAIN:
        best = None
        for v in range(n):
            x = gains[v]
            if x > 0 and (best is None or x < gains[best]):
                best = v
        return best
    if rule is PivotRule.RANDOM_IMPROVING:
        cands = [v for v in range(n) if gains[v] > 0]
        if not cands:
            return None
        return cands[int(rng.integers(len(cands)))]
    raise ValueError(f"unknown pivot rule {rule!r}")


def apply_flip(g: GraphTopology, w: WeightAssignment, state: CutState, v: int) -> FlipStep:
    """Move ``v`` across the cut, updating caches in O(deg v)."""
    before = state.gains[v]
    s = state.side[v]
    for u, e in g.adjacency[v]:
        # edge (v,u) toggles: uncut -> cut lowers u's gain by 2w, cut -> uncut raises it
        if state.side[u] == s:
            state.gains[u] -= 2.0 * w[e]
        else:
            state.gains[u] += 2.0 * w[e]
    state.side[v] = 1 - s
    state.gains[v] = -before
    state.cut_weight += before
    state.last_flipped = v
    state.t += 1
    return FlipStep(state.t, v, before, state.cut_weight)


def step(g: GraphTopology, w: WeightAssignment, state: CutState, rule: PivotRule,
         rng: Optional[np.random.Generator] = None) -> Optional[FlipStep]:
    v = _select(state, PivotRule(rule), rng)
    if v is None:
        return None
    return apply_flip(g, w, state, v)


def run(g: GraphTopology, w: WeightAssignment, initial: Sequence[int], rule: PivotRule,
        max_steps: int, rng: Optional[np.random.Generator] = None,
        observer: Optional[Callable[[FlipStep, CutState], None]] = None) -> FlipTrace:
    """Run FLIP until a local optimum or until ``max_steps`` flips have been made.

    ``observer(step, state)`` is called synchronously after every flip.
    """
    if max_steps < 0:
        raise ValueError("max_steps must be >= 0")
    rule = PivotRule(rule)
    if rule is PivotRule.RANDOM_IMPROVING and rng is None:
        raise ValueError("random-improving needs an rng")
    state = CutState.start(g, w, initial)
    trace = FlipTrace(state.cut)
    while True:
        v = _select(state, rule, rng)
        if v is None:
            trace.status = Status.LOCAL_OPTIMUM
            break
        if trace.T >= max_steps:
            trace.status = Status.BUDGET_EXHAUSTED
            break
        st = apply_flip(g, w, state, v)
        trace.steps.append(st)
        if observer is not None:
            observer(st, state)
    trace.final = state.cut
    return trace


def replay_cuts(trace: FlipTrace):
    """Yield the cut before each step, then the final cut."""
    side = list(trace.initial)
    for st in trace.steps:
        yield tuple(side)
        side[st.node] ^= 1
    yield tuple(side)


TRACE_COLUMNS = ["step", "node", "level", "gain", "cut_weight", "good_move", "potential_after"]


def write_trace_csv(path, trace: FlipTrace, annotations: Optional[list] = None) -> None:
    """One row per step.  ``annotations[t-1]`` = (level, good_move, potential_after) when given."""
    with open(path, "w", newline="") as f:
        out = csv.writer(f, lineterminator="\n")
        out.writerow(TRACE_COLUMNS)
        for i, st in enumerate(trace.steps):
            if annotations is None:
                extra = ["", "", ""]
            else:
                level, good, pot = annotations[i]
                extra = [level, int(good), pot]
            out.writerow([st.t, st.node, extra[0], repr(st.gain), repr(st.cut_weight_after),
                          extra[1], extra[2]])
