"""Random acyclic mixed graphs with a connected bidirected part."""

from __future__ import annotations

import heapq
from dataclasses import dataclass

import numpy as np

from .graph import MixedGraph


@dataclass(frozen=True)
class GenConfig:
    n: int
    p: float
    q: float
    seed: int = 0

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError(f"n must be at least 1, got {self.n}")
        for name in ("p", "q"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {value}")


def prufer_decode(seq) -> list[tuple[int, int]]:
    """Edges of the labeled tree on ``1..len(seq)+2`` with Prüfer sequence ``seq``."""
    n = len(seq) + 2
    degree = [1] * (n + 1)
    for x in seq:
        degree[x] += 1
    leaves = [v for v in range(1, n + 1) if degree[v] == 1]
    heapq.heapify(leaves)
    edges = []
    for x in seq:
        leaf = heapq.heappop(leaves)
        edges.append((min(leaf, x), max(leaf, x)))
        degree[x] -= 1
        if degree[x] == 1:
            heapq.heappush(leaves, x)
    u, w = heapq.heappop(leaves), heapq.heappop(leaves)
    edges.append((u, w))
    return edges


def random_spanning_tree(n: int, rng: np.random.Generator) -> frozenset[tuple[int, int]]:
    """Uniformly random labeled tree on ``1..n``, drawn via a random Prüfer sequence."""
    if n < 1:
        raise ValueError(f"n must be at least 1, got {n}")
    if n == 1:
        return frozenset()
    seq = rng.integers(1, n + 1, size=n - 2).tolist()
    return frozenset(prufer_decode(seq))


def random_mixed_graph(config: GenConfig, rng: np.random.Generator | None = None) -> MixedGraph:
    """Spanning bidirected tree, then extra ``i <-> j`` with probability ``p``, then ``i -> j`` (i < j) with probability ``q``.

    Pairs are visited in lexicographic order, bidirected pass first, so the
    generator state fully determines the graph. ``rng`` defaults to one seeded
    from ``config.seed``.
    """
    if rng is None:
        rng = np.random.default_rng(config.seed)
    n = config.n
    bidirected = set(random_spanning_tree(n, rng))
    iu, ju = np.triu_indices(n, k=1)
    pairs = list(zip((iu + 1).tolist(), (ju + 1).tolist()))
    extra = rng.random(len(pairs)) < config.p
    bidirected.update(pair for pair, hit in zip(pairs, extra) if hit)
    arrows = rng.random(len(pairs)) < config.q
    directed = {pair for pair, hit in zip(pairs, arrows) if hit}
    return MixedGraph(n, frozenset(directed), frozenset(bidirected))
