"""Exhaustive enumeration of cut classes for small graphs."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph_core import GraphTopology, WeightAssignment, canonical

MAX_BRUTE_N = 22
_CHUNK = 1 << 15


@dataclass
class BruteForceResult:
    max_cut_weight: float
    local_optima_count: int
    local_optima: list  # canonical cuts (node 0 on side 0)

    def contains(self, cut) -> bool:
        return canonical(cut) in self._index

    def __post_init__(self):
        self._index = set(self.local_optima)


def brute_force(g: GraphTopology, w: WeightAssignment) -> BruteForceResult:
    """Enumerate all 2^(n-1) cut classes with node 0 fixed on side 0.

    A class is a local optimum when no single flip has positive gain.
    """
    n = g.n
    if n > MAX_BRUTE_N:
        raise ValueError(f"brute force limited to n <= {MAX_BRUTE_N}, got n={n}")
    w.check(g)
    if n == 0:
        return BruteForceResult(0.0, 1, [()])
    wt = np.asarray(w.weights, dtype=float)
    us = np.fromiter((u for u, _ in g.edges), dtype=np.int64, count=g.m)
    vs = np.fromiter((v for _, v in g.edges), dtype=np.int64, count=g.m)
    # incidence[e, x] = 1 when x is an endpoint of e
    incidence = np.zeros((g.m, n))
    incidence[np.arange(g.m), us] = 1.0
    incidence[np.arange(g.m), vs] = 1.0
    shifts = np.arange(n, dtype=np.int64)

    best = -np.inf
    optima = []
    total = 1 << (n - 1)
    for lo in range(0, total, _CHUNK):
        codes = np.arange(lo, min(lo + _CHUNK, total), dtype=np.int64) << 1  # bit 0 = node 0 = 0
        bits = (codes[:, None] >> shifts) & 1
        crossing = bits[:, us] != bits[:, vs]
        weights = crossing @ wt
        best = max(best, float(weights.max()))
        # gain(x) = sum over incident e of w_e * (1 if uncut else -1)
        gains = np.where(crossing, -wt, wt) @ incidence
        local = np.all(gains <= 0, axis=1)
        for row in bits[local]:
            optima.append(tuple(int(b) for b in row))
    return BruteForceResult(best, len(optima), optima)
