"""Immutable graph topology, edge weights, cuts and degeneracy."""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional, Sequence

Cut = tuple  # tuple[int, ...] of 0/1, one entry per node


class GraphError(ValueError):
    pass


@dataclass(frozen=True)
class GraphTopology:
    n: int
    edges: tuple  # tuple[(u, v), ...]; position is the edge index
    adjacency: tuple  # adjacency[v] = ((neighbor, edge index), ...)

    @property
    def m(self) -> int:
        return len(self.edges)

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def neighbors(self, v: int) -> list[int]:
        return [u for u, _ in self.adjacency[v]]


@dataclass(frozen=True)
class WeightAssignment:
    weights: tuple  # tuple[float, ...], aligned with GraphTopology.edges

    def __post_init__(self):
        for i, x in enumerate(self.weights):
            if not -1.0 <= x <= 1.0:
                raise GraphError(f"weight {x!r} of edge {i} outside [-1, 1]")

    def __len__(self) -> int:
        return len(self.weights)

    def __getitem__(self, e: int) -> float:
        return self.weights[e]

    def check(self, g: GraphTopology) -> None:
        if len(self.weights) != g.m:
            raise GraphError(f"{len(self.weights)} weights for {g.m} edges")


def from_edge_list(n: int, pairs: Iterable[Sequence[int]]) -> GraphTopology:
    """Build a topology, preserving edge order; rejects loops, duplicates and bad endpoints."""
    if n < 0:
        raise GraphError(f"negative node count {n}")
    seen = set()
    edges = []
    adj: list[list] = [[] for _ in range(n)]
    for idx, (u, v) in enumerate(pairs):
        u, v = int(u), int(v)
        if u == v:
            raise GraphError(f"edge {idx}: self-loop at node {u}")
        if not (0 <= u < n and 0 <= v < n):
            raise GraphError(f"edge {idx}: endpoint of ({u}, {v}) outside [0, {n})")
        key = (u, v) if u < v else (v, u)
        if key in seen:
            raise GraphError(f"edge {idx}: duplicate edge ({u}, {v})")
        seen.add(key)
        e = len(edges)
        edges.append((u, v))
        adj[u].append((v, e))
        adj[v].append((u, e))
    return GraphTopology(n, tuple(edges), tuple(tuple(a) for a in adj))


def _check_cut(g: GraphTopology, c: Sequence[int]) -> None:
    if len(c) != g.n:
        raise GraphError(f"cut has {len(c)} entries for {g.n} nodes")


def cut_weight(g: GraphTopology, w: WeightAssignment, c: Sequence[int]) -> float:
    """Total weight of edges whose endpoints lie on different sides."""
    w.check(g)
    _check_cut(g, c)
    total = 0.0
    for (u, v), x in zip(g.edges, w.weights):
        if c[u] != c[v]:
            total += x
    return total


def complement(c: Sequence[int]) -> Cut:
    return tuple(1 - s for s in c)


def canonical(c: Sequence[int]) -> Cut:
    """Representative of the cut class {c, complement(c)} with node 0 on side 0."""
    c = tuple(c)
    if c and c[0] == 1:
        return complement(c)
    return c


def degeneracy(g: GraphTopology) -> tuple[int, list[int]]:
    """Min-degree peeling (Matula-Beck bucket queue).

    Returns ``(d, order)`` where every node has at most ``d`` neighbors later in
    ``order`` and ``d`` is attained.
    """
    n = g.n
    if n == 0:
        return 0, []
    deg = [g.degree(v) for v in range(n)]
    maxdeg = max(deg)
    buckets: list[set] = [set() for _ in range(maxdeg + 1)]
    for v in range(n):
        buckets[deg[v]].add(v)
    removed = [False] * n
    order = []
    d = 0
    lo = 0
    for _ in range(n):
        lo = max(lo - 1, 0)
        while not buckets[lo]:
            lo += 1
        v = min(buckets[lo])  # deterministic choice
        buckets[lo].remove(v)
        removed[v] = True
        order.append(v)
        d = max(d, lo)
        for u, _ in g.adjacency[v]:
            if not removed[u]:
                buckets[deg[u]].remove(u)
                deg[u] -= 1
                buckets[deg[u]].add(u)
    return d, order


def later_neighbor_counts(g: GraphTopology, order: Sequence[int]) -> list[int]:
    pos = {v: i for i, v in enumerate(order)}
    return [sum(1 for u in g.neighbors(v) if pos[u] > pos[v]) for v in order]


# -- graph file format: {"n": int, "edges": [[u, v, w|null], ...]} --

def graph_to_dict(g: GraphTopology, w: Optional[WeightAssignment] = None) -> dict:
    if w is not None:
        w.check(g)
    edges = [[u, v, None if w is None else w[e]] for e, (u, v) in enumerate(g.edges)]
    return {"n": g.n, "edges": edges}


def graph_from_dict(doc: dict) -> tuple[GraphTopology, Optional[WeightAssignment]]:
    try:
        n = int(doc["n"])
        rows = doc["edges"]
    except (KeyError, TypeError) as exc:
        raise GraphError(f"malformed graph document: {exc}") from None
    g = from_edge_list(n, [(r[0], r[1]) for r in rows])
    ws = [r[2] if len(r) > 2 else None for r in rows]
    if rows and all(x is not None for x in ws):
        return g, WeightAssignment(tuple(float(x) for x in ws))
    if any(x is not None for x in ws):
        raise GraphError("graph file mixes weighted and unweighted edges")
    return g, None


def write_graph(path, g: GraphTopology, w: Optional[WeightAssignment] = None) -> None:
    Path(path).write_text(json.dumps(graph_to_dict(g, w)) + "\n")


def read_graph(path) -> tuple[GraphTopology, Optional[WeightAssignment]]:
    return graph_from_dict(json.loads(Path(path).read_text()))
