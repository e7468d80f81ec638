"""Runtime instrumentation of a FLIP trace against the level structure.

Level weights are ``W(i) = (L - i + 1) * D**(L - i)`` with ``D = floor(2*beta*alpha)``.
A flip of an active level-i node removes ``W(i)`` and can activate at most ``D``
nodes at levels above i, each worth at most ``W(i+1)``, so the potential drops
by at least ``D**(L - i) >= 1``.  A flip of an inactive node is a good movement.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .flip_engine import CutState, FlipStep, FlipTrace
from .graph_core import GraphTopology, WeightAssignment
from .leveling import Leveling, ceil_log, threshold
from .smoothing import good_pair_epsilon

PAIR_TOL = 1e-9


class PairError(ValueError):
    pass


def level_weights(lv: Leveling) -> list[int]:
    """Exact integer weights, indexed by level (entry 0 unused)."""
    D = lv.threshold
    return [0] + [(lv.L - i + 1) * D ** (lv.L - i) for i in range(1, lv.L + 1)]


@dataclass
class ActivityState:
    leveling: Leveling
    active: list
    a: list  # a[i] = active nodes at level i, index 0 unused
    potential: int
    weights: list

    def scratch_potential(self) -> int:
        lv = self.leveling
        return sum(self.weights[lv.level[v]] for v in range(lv.n) if self.active[v])


def init_activity(lv: Leveling) -> ActivityState:
    W = level_weights(lv)
    a = [0] + lv.level_sizes()
    return ActivityState(lv, [True] * lv.n, a, sum(a[i] * W[i] for i in range(1, lv.L + 1)), W)


def potential(st: ActivityState) -> int:
    return st.potential


def record_flip(st: ActivityState, v: int) -> tuple[bool, int]:
    """Update activity for a flip of ``v``; returns (was_good, exact potential change)."""
    lv = st.leveling
    if not 0 <= v < lv.n:
        raise ValueError(f"node {v} out of range")
    was_good = not st.active[v]
    before = st.potential
    i = lv.level[v]
    if st.active[v]:
        st.active[v] = False
        st.a[i] -= 1
        st.potential -= st.weights[i]
    for u, _ in lv.restricted[v]:
        j = lv.level[u]
        if j > i and not st.active[u]:
            st.active[u] = True
            st.a[j] += 1
            st.potential += st.weights[j]
    return was_good, st.potential - before


@dataclass(frozen=True)
class GoodPair:
    t1: int
    t2: int
    node: int
    pair_gain: float  # gain(t1) + gain(t2) taken from the trace
    decomposition: tuple  # ((edge index, coefficient), ...) over E_*(node)
    decomposed_sum: float


class PairTracker:
    """Finds consecutive same-node flips with no lower-level neighbor flip in between.

    Keeps a flip counter per node.  At each flip of ``v`` it snapshots the
    counters of v's neighbors and whether each edge was cut just before the
    flip; at v's next flip, counter parities give the coefficient of each edge.
    """

    def __init__(self, g: GraphTopology, lv: Leveling, w: WeightAssignment):
        self.g, self.lv, self.w = g, lv, w
        self.counts = [0] * g.n
        self.last_step: list[Optional[int]] = [None] * g.n
        self.last_gain = [0.0] * g.n
        self._snap: list = [None] * g.n

    def feed(self, t: int, v: int, step_gain: float, side_before: Sequence[int]) -> Optional[GoodPair]:
        g, lv = self.g, self.lv
        found = None
        if self.last_step[v] is not None:
            snap = self._snap[v]
            lower_moved = any(
                lv.level[u] < lv.level[v] and self.counts[u] != cnt
                for (u, _), (cnt, _) in zip(g.adjacency[v], snap)
            )
            if not lower_moved:
                decomp = []
                total = 0.0
                for (u, e), (cnt, was_cut) in zip(g.adjacency[v], snap):
                    if lv.level[u] < lv.level[v]:
                        continue
                    if (self.counts[u] - cnt) % 2:
                        coef = -2 if was_cut else 2
                    else:
                        coef = 0
                    decomp.append((e, coef))
                    total += coef * self.w[e]
                found = GoodPair(self.last_step[v], t, v, self.last_gain[v] + step_gain,
                                 tuple(decomp), total)
        s = side_before[v]
        self._snap[v] = tuple((self.counts[u], side_before[u] != s) for u, _ in g.adjacency[v])
        self.counts[v] += 1
        self.last_step[v] = t
        self.last_gain[v] = step_gain
        return found


def scan_good_pairs(trace: FlipTrace, lv: Leveling, g: GraphTopology,
                    w: WeightAssignment) -> list[GoodPair]:
    """Every good pair in a finished trace, re-derived from the raw steps."""
    side = list(trace.initial)
    tracker = PairTracker(g, lv, w)
    pairs = []
    for st in trace.steps:
        p = tracker.feed(st.t, st.node, st.gain, side)
        if p is not None:
            pairs.append(p)
        side[st.node] ^= 1
    return pairs


def pair_gain(trace: FlipTrace, lv: Leveling, g: GraphTopology, w: WeightAssignment,
              t1: int, t2: int) -> tuple[float, list[tuple[int, int]]]:
    """Sum of the gains at steps t1 < t2 of the same node and its {-2,0,2} decomposition.

    Replays the trace directly.  Raises PairError if the steps are not a
    consecutive pair of one node with no lower-level neighbor moving between
    them, or if the decomposition does not reproduce the summed gain.
    """
    steps = trace.steps
    if not 1 <= t1 < t2 <= len(steps):
        raise PairError(f"need 1 <= t1 < t2 <= {len(steps)}, got {t1}, {t2}")
    v = steps[t1 - 1].node
    if steps[t2 - 1].node != v:
        raise PairError(f"step {t1} flips node {v} but step {t2} flips {steps[t2 - 1].node}")
    side = list(trace.initial)
    for st in steps[: t1 - 1]:
        side[st.node] ^= 1
    lower = _lower_neighbors(g, lv, v)
    flips = [0] * g.n
    for st in steps[t1: t2 - 1]:
        u = st.node
        if u == v:
            raise PairError(f"step {st.t} flips {v} again between {t1} and {t2}")
        if u in lower:
            raise PairError(
                f"step {st.t} flips {u}, a lower-level neighbor of {v}, between {t1} and {t2}")
        flips[u] += 1
    decomp = []
    for u, e in lv.restricted[v]:
        if flips[u] % 2 == 0:
            decomp.append((e, 0))
        else:
            decomp.append((e, 2 if side[u] == side[v] else -2))
    total = steps[t1 - 1].gain + steps[t2 - 1].gain
    rebuilt = sum(coef * w[e] for e, coef in decomp)
    if abs(total - rebuilt) > PAIR_TOL:
        raise PairError(f"pair ({t1}, {t2}): gains sum to {total!r}, decomposition to {rebuilt!r}")
    return total, decomp


def _lower_neighbors(g: GraphTopology, lv: Leveling, v: int) -> set:
    return {u for u, _ in g.adjacency[v] if lv.level[u] < lv.level[v]}


def gaps_from_flags(flags: Sequence[bool]) -> tuple[int, list[int]]:
    """Distances between consecutive good moves, counting the trace ends as boundaries."""
    marks = [0] + [t for t, good in enumerate(flags, 1) if good] + [len(flags)]
    gaps = [b - a for a, b in zip(marks, marks[1:])]
    if len(marks) > 2 and marks[-2] == marks[-1]:
        gaps.pop()  # trace ends on a good move
    return max(gaps, default=0), gaps


def good_move_gaps(trace: FlipTrace, lv: Leveling) -> tuple[int, list[int]]:
    st = init_activity(lv)
    return gaps_from_flags([record_flip(st, s.node)[0] for s in trace.steps])


@dataclass(frozen=True)
class BoundReport:
    n: int
    phi: float
    alpha: int
    beta: float
    c: float
    epsilon_c: float
    window: int
    explicit_bound: float
    label: str = "derived explicit constants; not a tight estimate"

    def to_dict(self) -> dict:
        return {
            "n": self.n, "phi": self.phi, "alpha": self.alpha, "beta": self.beta, "c": self.c,
            "epsilon_c": self.epsilon_c, "window": str(self.window),
            "explicit_bound": self.explicit_bound, "label": self.label,
        }


def worst_case_potential(n: int, alpha: int, beta: float) -> int:
    """Initial potential if all n nodes sat at level 1 of a ceil(log_beta n)-level partition."""
    L = max(ceil_log(n, beta), 1)
    return n * L * threshold(alpha, beta) ** (L - 1)


def theoretical_bound(n: int, phi: float, alpha: int, beta: float, c: float) -> BoundReport:
    """Explicit iteration ceiling: ceil(2 n^2 / eps) good-improvement windows of length P0 + 1.

    The cut weight lies in [-n^2, n^2], each window contains a good pair, and
    each good pair raises the weight by at least ``eps`` (w.h.p.).
    """
    eps = good_pair_epsilon(phi, beta, alpha, n, c)
    window = worst_case_potential(n, alpha, beta) + 1
    if eps == 0.0:
        bound = math.inf
    else:
        try:
            bound = float(math.ceil(2.0 * n * n / eps)) * float(window)
        except OverflowError:
            bound = math.inf
    return BoundReport(n, phi, alpha, beta, c, eps, window, bound)


@dataclass
class Analyzer:
    """Observer for :func:`flip_engine.run` that records activity and good pairs per step."""

    g: GraphTopology
    lv: Leveling
    w: WeightAssignment
    activity: ActivityState = field(init=False)
    tracker: PairTracker = field(init=False)
    initial_potential: int = field(init=False)
    good: list = field(default_factory=list)
    deltas: list = field(default_factory=list)
    potentials: list = field(default_factory=list)
    pairs: list = field(default_factory=list)
    nodes: list = field(default_factory=list)

    def __post_init__(self):
        self.activity = init_activity(self.lv)
        self.tracker = PairTracker(self.g, self.lv, self.w)
        self.initial_potential = self.activity.potential

    def __call__(self, st: FlipStep, state: CutState) -> None:
        side_before = state.side
        v = st.node
        side_before[v] ^= 1  # state is post-flip; view it pre-flip while feeding
        try:
            p = self.tracker.feed(st.t, v, st.gain, side_before)
        finally:
            side_before[v] ^= 1
        if p is not None:
            self.pairs.append(p)
        was_good, delta = record_flip(self.activity, v)
        self.nodes.append(v)
        self.good.append(was_good)
        self.deltas.append(delta)
        self.potentials.append(self.activity.potential)

    def annotations(self) -> list:
        return [(self.lv.level[v], g, p)
                for v, g, p in zip(self.nodes, self.good, self.potentials)]

    def summary(self, T: int, bound: BoundReport) -> dict:
        max_gap, _ = gaps_from_flags(self.good)
        return {
            "T": T,
            "good_pairs": sum(self.good),
            "min_pair_gain": min((p.pair_gain for p in self.pairs), default=None),
            "max_gap": max_gap,
            "initial_potential": str(self.initial_potential),
            "epsilon_c": bound.epsilon_c,
            "explicit_bound": bound.explicit_bound,
        }
