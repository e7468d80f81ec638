"""Graph families with known sparsity for experiments."""
from __future__ import annotations

import numpy as np

from .graph_core import GraphTopology, from_edge_list
from .smoothing import make_rng


def _random_spanning_tree(n: int, rng: np.random.Generator) -> list[tuple[int, int]]:
    # Aldous-Broder walk on K_n: uniform spanning tree
    if n < 2:
        return []
    visited = [False] * n
    cur = int(rng.integers(n))
    visited[cur] = True
    left = n - 1
    tree = []
    while left:
        nxt = int(rng.integers(n - 1))
        if nxt >= cur:
            nxt += 1
        if not visited[nxt]:
            visited[nxt] = True
            tree.append((cur, nxt))
            left -= 1
        cur = nxt
    return tree


def gen_forest_union(n: int, alpha: int, seed: int, drop_prob: float = 0.2) -> GraphTopology:
    """Union of ``alpha`` random forests, so the arboricity is at most ``alpha``.

    Each forest is a uniform spanning tree of K_n with every edge then dropped
    independently with probability ``drop_prob``.  Repeated edges are merged.
    """
    if n < 1 or alpha < 1:
        raise ValueError("need n >= 1 and alpha >= 1")
    if not 0.0 <= drop_prob < 1.0:
        raise ValueError("drop_prob must lie in [0, 1)")
    rng = make_rng(seed)
    seen = set()
    edges = []
    for _ in range(alpha):
        tree = _random_spanning_tree(n, rng)
        keep = rng.random(len(tree)) >= drop_prob
        for (u, v), k in zip(tree, keep):
            key = (min(u, v), max(u, v))
            if k and key not in seen:
                seen.add(key)
                edges.append(key)
    return from_edge_list(n, edges)


def gen_preferential_attachment(n: int, m_attach: int, seed: int) -> GraphTopology:
    """Barabasi-Albert growth from a complete seed graph on ``m_attach + 1`` nodes."""
    if m_attach < 1 or n < m_attach + 1:
        raise ValueError(f"need m_attach >= 1 and n >= m_attach + 1, got n={n}, m_attach={m_attach}")
    rng = make_rng(seed)
    k = m_attach + 1
    edges = [(u, v) for u in range(k) for v in range(u + 1, k)]
    ends = [x for e in edges for x in e]  # each node appears deg(node) times
    for v in range(k, n):
        targets: list[int] = []
        while len(targets) < m_attach:
            u = ends[int(rng.integers(len(ends)))]
            if u not in targets:
                targets.append(u)
        for u in targets:
            edges.append((u, v))
            ends.extend((u, v))
    return from_edge_list(n, edges)


def gen_complete(n: int) -> GraphTopology:
    if n < 1:
        raise ValueError("need n >= 1")
    return from_edge_list(n, [(u, v) for u in range(n) for v in range(u + 1, n)])


def gen_grid(rows: int, cols: int) -> GraphTopology:
    if rows < 1 or cols < 1:
        raise ValueError("need rows, cols >= 1")
    edges = []
    for r in range(rows):
        for c in range(cols):
            v = r * cols + c
            if c + 1 < cols:
                edges.append((v, v + 1))
            if r + 1 < rows:
                edges.append((v, v + cols))
    return from_edge_list(rows * cols, edges)
