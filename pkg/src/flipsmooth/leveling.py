"""Hierarchical vertex partition by rounds of low-degree peeling.

Round i removes, all at once, every remaining node whose degree in the
remaining induced subgraph is at most ``2*beta*alpha``.  The removed set is
level i.  A node's restricted neighborhood is its neighbors at the same or a
higher level.
"""
from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from .graph_core import GraphTopology, degeneracy


class PartitionError(ValueError):
    """Raised when a peeling round cannot remove any node.

    ``stuck_nodes`` is the node set of the induced subgraph in which every
    node has degree above the threshold.
    """

    def __init__(self, msg: str, stuck_nodes: list[int], min_degree: int):
        super().__init__(msg)
        self.stuck_nodes = stuck_nodes
        self.min_degree = min_degree


def threshold(alpha: float, beta: float) -> int:
    # Degrees are integers, so "degree <= 2*beta*alpha" is "degree <= floor(2*beta*alpha)".
    return math.floor(2 * beta * alpha)


def ceil_log(n: int, beta: float) -> int:
    """Smallest k >= 0 with beta**k >= n, computed without float log rounding."""
    if beta <= 1:
        raise ValueError(f"log base must exceed 1, got {beta}")
    k, p = 0, 1.0
    while p < n:
        p *= beta
        k += 1
    return k


@dataclass(frozen=True)
class Leveling:
    alpha: int
    beta: float
    L: int
    level: tuple  # level[v] in 1..L
    restricted: tuple  # restricted[v] = ((u, edge index), ...) with level(u) >= level(v)

    @property
    def threshold(self) -> int:
        return threshold(self.alpha, self.beta)

    @property
    def n(self) -> int:
        return len(self.level)

    def level_sizes(self) -> list[int]:
        sizes = [0] * (self.L + 1)
        for lv in self.level:
            sizes[lv] += 1
        return sizes[1:]

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "beta": self.beta,
            "L": self.L,
            "levels": list(self.level),
            "restricted_degree": [len(r) for r in self.restricted],
        }


def restricted_lists(g: GraphTopology, level) -> tuple:
    return tuple(
        tuple((u, e) for u, e in g.adjacency[v] if level[u] >= level[v])
        for v in range(g.n)
    )


def peel_partition(g: GraphTopology, alpha: int, beta: float) -> Leveling:
    if alpha < 1:
        raise ValueError(f"alpha must be >= 1, got {alpha}")
    if g.n < 1:
        raise ValueError("graph has no nodes")
    if g.n >= 2 and not 2 <= beta <= g.n:
        raise ValueError(f"beta must lie in [2, {g.n}], got {beta}")

    d, _ = degeneracy(g)
    if d > 2 * alpha - 1:
        warnings.warn(
            f"degeneracy {d} exceeds 2*alpha-1 = {2 * alpha - 1}; "
            f"alpha={alpha} is below the arboricity",
            stacklevel=2,
        )

    thr = threshold(alpha, beta)
    deg = [g.degree(v) for v in range(g.n)]
    level = [0] * g.n
    remaining = list(range(g.n))
    rnd = 0
    while remaining:
        rnd += 1
        peeled = [v for v in remaining if deg[v] <= thr]
        if not peeled:
            lowest = min(deg[v] for v in remaining)
            shown = ", ".join(map(str, remaining[:10]))
            more = "" if len(remaining) <= 10 else f", ... ({len(remaining)} nodes)"
            raise PartitionError(
                f"no vertex removable in round {rnd}: induced subgraph on "
                f"[{shown}{more}] has minimum degree {lowest} > 2*beta*alpha = "
                f"{2 * beta * alpha:g}; alpha={alpha} is below its density",
                stuck_nodes=list(remaining),
                min_degree=lowest,
            )
        for v in peeled:
            level[v] = rnd
        for v in peeled:
            for u, _ in g.adjacency[v]:
                if level[u] == 0:
                    deg[u] -= 1
        remaining = [v for v in remaining if level[v] == 0]

    return Leveling(alpha, beta, rnd, tuple(level), restricted_lists(g, level))


@dataclass(frozen=True)
class Violation:
    kind: str
    node: Optional[int]
    detail: str


def validate_leveling(g: GraphTopology, lv: Leveling) -> list[Violation]:
    """Check every Leveling invariant from scratch; an empty list means valid."""
    report = []
    if len(lv.level) != g.n or len(lv.restricted) != g.n:
        report.append(Violation("size", None, f"leveling covers {len(lv.level)} of {g.n} nodes"))
        return report

    if g.n >= 2 and not 2 <= lv.beta <= g.n:
        report.append(Violation("beta-range", None, f"beta={lv.beta} not in [2, {g.n}]"))
    elif g.n >= 2 and lv.L > ceil_log(g.n, lv.beta):
        report.append(Violation(
            "level-count", None,
            f"L={lv.L} exceeds ceil(log_beta n)={ceil_log(g.n, lv.beta)}"))
    if g.n == 1 and lv.L != 1:
        report.append(Violation("level-count", None, f"single node needs L=1, got {lv.L}"))

    cap = 2 * lv.beta * lv.alpha
    for v in range(g.n):
        if not 1 <= lv.level[v] <= lv.L:
            report.append(Violation("level-range", v, f"level {lv.level[v]} not in [1, {lv.L}]"))
            continue
        got = sorted(lv.restricted[v])
        want = sorted((u, e) for u, e in g.adjacency[v] if lv.level[u] >= lv.level[v])
        if got != want:
            report.append(Violation("restricted-mismatch", v, f"have {got}, expected {want}"))
        if len(lv.restricted[v]) > cap:
            report.append(Violation(
                "restricted-size", v, f"|N_*| = {len(lv.restricted[v])} > {cap:g}"))
    return report


def write_leveling(path, lv: Leveling) -> None:
    Path(path).write_text(json.dumps(lv.to_dict()) + "\n")
