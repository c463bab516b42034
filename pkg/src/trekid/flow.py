"""Half-trek systems via unit node-capacity max flow.

The auxiliary network for an allowed set ``A`` and a target vertex ``v`` has a
source ``s``, a sink ``t`` and two nodes ``L(w)``, ``R(w)`` per graph vertex::

    s -> L(a)        for a in A
    L(w) -> R(w)     for every vertex (half-trek whose top node is w)
    L(w) -> R(u)     for every bidirected edge {w, u}, both orientations
    R(w) -> R(u)     for every directed edge w -> u
    R(p) -> t        for p in pa(v)

Every ``L``/``R`` node has capacity one, so an integral flow of value ``k``
decomposes into ``k`` half-treks with distinct sources and pairwise disjoint
right sides.
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from itertools import combinations

from .errors import InstanceTooLargeError
from .graph import HalfTrek, MixedGraph

Node = str | tuple[str, int]

_INF = 1 << 30


def unit_max_flow(
    num_nodes: int,
    arcs: Sequence[tuple[int, int]],
    source: int,
    sink: int,
    uncapacitated: Iterable[int] = (),
    want_paths: bool = False,
) -> tuple[int, list[list[int]]]:
    """Max flow with unit arc capacities and unit node capacities.

    Nodes listed in ``uncapacitated`` (always including ``source`` and ``sink``)
    have unbounded throughput. Node capacities are realized by splitting each
    node ``x`` into ``2x -> 2x+1``. Augmenting paths are found by breadth-first
    search in arc insertion order, so the result is deterministic.

    Returns the flow value and, if requested, the flow decomposed into
    source-to-sink node sequences.
    """
    free = set(uncapacitated) | {source, sink}
    size = 2 * num_nodes
    head: list[int] = []
    cap: list[int] = []
    adj: list[list[int]] = [[] for _ in range(size)]
    for x in range(num_nodes):
        a = 2 * x
        adj[a].append(len(head))
        adj[a + 1].append(len(head) + 1)
        head += (a + 1, a)
        cap += (_INF if x in free else 1, 0)
    first_arc_edge = len(head)
    for x, y in arcs:
        a, b = 2 * x + 1, 2 * y
        adj[a].append(len(head))
        adj[b].append(len(head) + 1)
        head += (b, a)
        cap += (1, 0)

    s, t = 2 * source + 1, 2 * sink
    value = 0
    while True:
        pred = [-1] * size
        pred[s] = -2
        queue = [s]
        for a in queue:
            for e in adj[a]:
                if cap[e] and pred[head[e]] == -1:
                    b = head[e]
                    pred[b] = e
                    queue.append(b)
            if pred[t] != -1:
                break
        if pred[t] == -1:
            break
        b = t
        while b != s:
            e = pred[b]
            cap[e] -= 1
            cap[e ^ 1] += 1
            b = head[e ^ 1]
        value += 1

    paths: list[list[int]] = []
    if want_paths:
        flow = {e: 1 - cap[e] for e in range(first_arc_edge, len(head), 2) if cap[e] == 0}
        out: dict[int, list[int]] = {}
        for e in sorted(flow):
            out.setdefault(head[e ^ 1], []).append(e)
        for _ in range(value):
            path = [source]
            node = s
            while node != t:
                e = out[node].pop(0)
                node = head[e]
                path.append(node // 2)
                if node != t:
                    node += 1
            paths.append(path)
    return value, paths


@dataclass(frozen=True)
class FlowNetwork:
    """Auxiliary half-trek network for ``(graph, allowed, target)``.

    Node indices: ``s = 0``, ``L(w) = w``, ``R(w) = n + w``, ``t = 2n + 1``.
    """

    graph: MixedGraph
    allowed: frozenset[int]
    target: int
    arcs: tuple[tuple[int, int], ...]

    @property
    def num_nodes(self) -> int:
        return 2 * self.graph.n + 2

    @property
    def source(self) -> int:
        return 0

    @property
    def sink(self) -> int:
        return 2 * self.graph.n + 1

    def label(self, index: int) -> Node:
        n = self.graph.n
        if index == 0:
            return "s"
        if index == 2 * n + 1:
            return "t"
        if index <= n:
            return ("L", index)
        return ("R", index - n)

    def labeled_arcs(self) -> list[tuple[Node, Node]]:
        return [(self.label(x), self.label(y)) for x, y in self.arcs]

    def node_capacity(self, node: Node) -> float:
        return float("inf") if node in ("s", "t") else 1


def _static_arcs(G: MixedGraph) -> tuple[tuple[int, int], ...]:
    # arcs not depending on (A, v); cached on the immutable graph instance
    arcs = G.__dict__.get("_half_trek_arcs")
    if arcs is None:
        n = G.n
        out = []
        for w in G.vertices:
            out.append((w, n + w))
            out += [(w, n + u) for u in sorted(G._sib[w])]
        out += [(n + w, n + u) for w, u in sorted(G.directed)]
        arcs = G.__dict__["_half_trek_arcs"] = tuple(out)
    return arcs


def _network(G: MixedGraph, allowed: frozenset[int], v: int) -> FlowNetwork:
    n = G.n
    arcs = [(0, a) for a in sorted(allowed)]
    arcs += _static_arcs(G)
    arcs += [(n + p, 2 * n + 1) for p in sorted(G._pa[v])]
    return FlowNetwork(G, allowed, v, tuple(arcs))


def build_flow_network(G: MixedGraph, allowed: Iterable[int], v: int) -> FlowNetwork:
    return _network(G, G.check_vertices(allowed), G.check_vertex(v))


@dataclass(frozen=True)
class FlowResult:
    value: int
    paths: tuple[tuple[Node, ...], ...]


def max_flow(net: FlowNetwork) -> FlowResult:
    value, paths = unit_max_flow(net.num_nodes, net.arcs, net.source, net.sink, want_paths=True)
    return FlowResult(value, tuple(tuple(net.label(x) for x in path) for path in paths))


@dataclass(frozen=True)
class HalfTrekSystem:
    """Half-treks with distinct sources and targets and no sided intersection."""

    half_treks: tuple[HalfTrek, ...]

    @property
    def sources(self) -> frozenset[int]:
        return frozenset(h.source for h in self.half_treks)

    @property
    def targets(self) -> frozenset[int]:
        return frozenset(h.target for h in self.half_treks)

    def __len__(self) -> int:
        return len(self.half_treks)

    def __iter__(self):
        return iter(self.half_treks)

    def relabel(self, mapping) -> HalfTrekSystem:
        return HalfTrekSystem(tuple(h.relabel(mapping) for h in self.half_treks))


def _path_to_half_trek(path: Sequence[Node]) -> HalfTrek:
    # s, L(a), R(x0), ..., R(p), t
    _, a = path[1]
    right = tuple(w for _, w in path[2:-1])
    return HalfTrek(a, right, starts_bidirected=right[0] != a)


def _trivial_system(parents: Iterable[int]) -> HalfTrekSystem:
    return HalfTrekSystem(tuple(HalfTrek(p, (p,), False) for p in sorted(parents)))


def half_trek_system(G: MixedGraph, allowed: Iterable[int], v: int) -> HalfTrekSystem | None:
    """A half-trek system from some subset of ``allowed`` onto ``pa(v)``, or ``None``.

    When every parent is itself allowed the one-vertex half-treks are returned
    without solving a flow problem.
    """
    allowed = G.check_vertices(allowed)
    v = G.check_vertex(v)
    parents = G._pa[v]
    if parents <= allowed:
        return _trivial_system(parents)
    if len(allowed) < len(parents):
        return None
    result = max_flow(_network(G, allowed, v))
    if result.value < len(parents):
        return None
    treks = sorted((_path_to_half_trek(p) for p in result.paths), key=lambda h: h.target)
    return HalfTrekSystem(tuple(treks))


def flow_value(G: MixedGraph, allowed: Iterable[int], v: int) -> int:
    net = build_flow_network(G, allowed, v)
    return unit_max_flow(net.num_nodes, net.arcs, net.source, net.sink)[0]


def half_trek_system_exists(G: MixedGraph, allowed: Iterable[int], v: int) -> bool:
    allowed = G.check_vertices(allowed)
    v = G.check_vertex(v)
    parents = G._pa[v]
    if parents <= allowed:
        return True
    if len(allowed) < len(parents):
        return False
    return flow_value(G, allowed, v) == len(parents)


def satisfies_htc(G: MixedGraph, Y: Iterable[int], v: int) -> bool:
    """Whether ``Y`` satisfies the half-trek criterion with respect to ``v``."""
    Y = G.check_vertices(Y)
    v = G.check_vertex(v)
    if len(Y) != len(G._pa[v]):
        return False
    if Y & (G._sib[v] | {v}):
        return False
    return half_trek_system_exists(G, Y, v)


def is_half_trek(G: MixedGraph, h: HalfTrek) -> bool:
    """Check ``h`` against the half-trek definition in ``G``."""
    if not h.right:
        return False
    for w in (h.source, *h.right):
        if not 1 <= w <= G.n:
            return False
    if h.starts_bidirected:
        if (min(h.source, h.right[0]), max(h.source, h.right[0])) not in G.bidirected:
            return False
    elif h.right[0] != h.source:
        return False
    return all((x, y) in G.directed for x, y in zip(h.right, h.right[1:]))


def check_half_trek_system(
    G: MixedGraph, system: HalfTrekSystem, targets: Iterable[int]
) -> list[str]:
    """Problems with ``system`` as a half-trek system onto ``targets``; empty when valid."""
    problems = []
    members = list(system)
    for h in members:
        if not is_half_trek(G, h):
            problems.append(f"{h} is not a half-trek in the graph")
    sources = [h.source for h in members]
    ends = [h.target for h in members]
    if len(set(sources)) != len(sources):
        problems.append(f"sources not distinct: {sources}")
    if sorted(ends) != sorted(set(targets)):
        problems.append(f"targets {sorted(ends)} != {sorted(set(targets))}")
    for h1, h2 in combinations(members, 2):
        if h1.left & h2.left:
            problems.append(f"left sides of {h1} and {h2} intersect")
        if set(h1.right) & set(h2.right):
            problems.append(f"right sides of {h1} and {h2} intersect")
    return problems


def _directed_paths_from(G: MixedGraph, u: int) -> list[tuple[int, ...]]:
    out = []
    stack = [(u,)]
    while stack:
        path = stack.pop()
        out.append(path)
        for w in sorted(G._ch[path[-1]], reverse=True):
            stack.append((*path, w))
    return out


def enumerate_half_treks(G: MixedGraph, source: int) -> list[HalfTrek]:
    """All half-treks in ``G`` starting at ``source``."""
    out = [HalfTrek(source, p, False) for p in _directed_paths_from(G, source)]
    for u in sorted(G.siblings(source)):
        out += [HalfTrek(source, p, True) for p in _directed_paths_from(G, u)]
    return out


def brute_force_half_trek_system(
    G: MixedGraph, allowed: Iterable[int], v: int, max_vertices: int = 8
) -> bool:
    """Exhaustive search for a half-trek system from ``allowed`` onto ``pa(v)``."""
    if G.n > max_vertices:
        raise InstanceTooLargeError(f"brute force limited to {max_vertices} vertices, got {G.n}")
    allowed = G.check_vertices(allowed)
    targets = sorted(G.parents(v))
    if len(allowed) < len(targets):
        return False
    by_target: dict[int, list[HalfTrek]] = {p: [] for p in targets}
    for a in sorted(allowed):
        for h in enumerate_half_treks(G, a):
            if h.target in by_target:
                by_target[h.target].append(h)

    def search(i: int, used_src: set[int], used_right: set[int]) -> bool:
        if i == len(targets):
            return True
        for h in by_target[targets[i]]:
            if h.source in used_src or used_right.intersection(h.right):
                continue
            if search(i + 1, used_src | {h.source}, used_right | set(h.right)):
                return True
        return False

    return search(0, set(), set())
