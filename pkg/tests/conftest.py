from __future__ import annotations

import numpy as np
import pytest
from hypothesis import strategies as st

from trekid.graph import MixedGraph
from trekid.graphgen import GenConfig, random_mixed_graph

SIX_D = {(1, 2), (1, 3), (1, 6), (2, 3), (2, 4), (2, 5), (2, 6), (3, 4), (4, 5)}
SIX_B = {(1, 4), (1, 6), (2, 3), (2, 5), (2, 6)}
SIX_AN5_D = {(1, 2), (1, 3), (2, 3), (2, 4), (2, 5), (3, 4), (4, 5)}
SIX_AN5_B = {(1, 4), (2, 3), (2, 5)}


def six_vertex() -> MixedGraph:
    return MixedGraph(6, frozenset(SIX_D), frozenset(SIX_B))


def six_vertex_an5() -> MixedGraph:
    return MixedGraph(5, frozenset(SIX_AN5_D), frozenset(SIX_AN5_B))


def bow() -> MixedGraph:
    return MixedGraph(2, frozenset({(1, 2)}), frozenset({(1, 2)}))


def graph(n, directed=(), bidirected=()) -> MixedGraph:
    return MixedGraph(n, frozenset(directed), frozenset(bidirected))


def relabel(G: MixedGraph, perm) -> MixedGraph:
    """``perm[v - 1]`` is the new label of ``v``."""
    f = lambda v: perm[v - 1]  # noqa: E731
    return MixedGraph(
        G.n,
        frozenset((f(u), f(w)) for u, w in G.directed),
        frozenset((f(u), f(w)) for u, w in G.bidirected),
    )


def random_graph(rng: np.random.Generator, n: int, p: float, q: float, shuffle: bool = True) -> MixedGraph:
    """Generator graph, optionally with shuffled labels so edges are not all forward."""
    G = random_mixed_graph(GenConfig(n, p, q), rng)
    if shuffle:
        G = relabel(G, [int(x) + 1 for x in rng.permutation(n)])
    return G


def all_graphs(n: int):
    """Every mixed graph on 1..n whose directed edges go from lower to higher label."""
    pairs = [(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)]
    m = len(pairs)
    for dmask in range(1 << m):
        D = frozenset(pairs[k] for k in range(m) if dmask >> k & 1)
        for bmask in range(1 << m):
            B = frozenset(pairs[k] for k in range(m) if bmask >> k & 1)
            yield MixedGraph(n, D, B)


@st.composite
def mixed_graphs(draw, min_n: int = 1, max_n: int = 6):
    """Acyclic mixed graphs with arbitrary labels (random order, then random edges respecting it)."""
    n = draw(st.integers(min_n, max_n))
    order = draw(st.permutations(range(1, n + 1)))
    pairs = [(order[i], order[j]) for i in range(n) for j in range(i + 1, n)]
    d = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    b = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    return MixedGraph(
        n,
        frozenset(e for e, keep in zip(pairs, d) if keep),
        frozenset(e for e, keep in zip(pairs, b) if keep),
    )


# -- independent oracles -------------------------------------------------------


def reach_matrix(G: MixedGraph) -> np.ndarray:
    """``R[u, w]`` is true iff a directed path (possibly empty) runs from u to w; 1-based."""
    n = G.n
    R = np.eye(n + 1, dtype=bool)
    for u, w in G.directed:
        R[u, w] = True
    for k in range(1, n + 1):
        R |= R[:, [k]] & R[[k], :]
    return R


def ancestors_oracle(G: MixedGraph, vs) -> set[int]:
    R = reach_matrix(G)
    return {u for u in range(1, G.n + 1) for v in vs if R[u, v]}


def half_trek_walks(G: MixedGraph, v: int):
    """All half-treks from v as vertex walks, by depth-first expansion of the definition."""
    children = {u: [w for x, w in G.directed if x == u] for u in range(1, G.n + 1)}
    sibs = {u: [w for x, w in G.bidirected if x == u] + [x for x, w in G.bidirected if w == u] for u in range(1, G.n + 1)}

    def extend(walk):
        yield walk
        for w in children[walk[-1]]:
            yield from extend(walk + (w,))

    yield from extend((v,))
    for u in sibs[v]:
        yield from extend((v, u))


# -- acceptance report ---------------------------------------------------------

ACCEPTANCE: dict[int, str] = {}


@pytest.fixture
def acceptance():
    def record(k: int, passed: bool, detail: str) -> bool:
        line = f"criterion {k:2d}: {'PASS' if passed else 'FAIL'}  {detail}"
        ACCEPTANCE[k] = line
        print(line)
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[k])
