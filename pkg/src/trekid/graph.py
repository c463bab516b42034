"""Acyclic mixed graphs and the structural queries used by the identification code.

Vertices are the integers ``1..n``. Directed edges are ordered pairs ``(v, w)``
meaning ``v -> w``; bidirected edges are stored as ``(min, max)`` pairs.
"""

from __future__ import annotations

import heapq
import numbers
from collections.abc import Iterable
from dataclasses import dataclass, field
from functools import cached_property

from .errors import DirectedCycleError, SelfLoopError, VertexOutOfRangeError


@dataclass(frozen=True)
class MixedGraph:
    """Immutable mixed graph ``G = (V, D, B)`` with an acyclic directed part.

    Edge inputs are canonicalized on construction: duplicates collapse and
    bidirected pairs are stored as ``(min, max)``.
    """

    n: int
    directed: frozenset[tuple[int, int]] = field(default_factory=frozenset)
    bidirected: frozenset[tuple[int, int]] = field(default_factory=frozenset)

    def __post_init__(self) -> None:
        if self.n < 0:
            raise ValueError(f"vertex count must be non-negative, got {self.n}")
        directed = set()
        for v, w in self.directed:
            v, w = int(v), int(w)
            self._check_vertex(v, (v, w))
            self._check_vertex(w, (v, w))
            if v == w:
                raise SelfLoopError(f"directed self-loop {v}->{w}")
            directed.add((v, w))
        bidirected = set()
        for v, w in self.bidirected:
            v, w = int(v), int(w)
            self._check_vertex(v, (v, w))
            self._check_vertex(w, (v, w))
            if v == w:
                raise SelfLoopError(f"bidirected self-loop {v}<->{w}")
            bidirected.add((min(v, w), max(v, w)))
        object.__setattr__(self, "directed", frozenset(directed))
        object.__setattr__(self, "bidirected", frozenset(bidirected))
        # raises on a directed cycle
        self.topological_order

    def _check_vertex(self, v: int, edge: tuple[int, int]) -> None:
        if not 1 <= v <= self.n:
            raise VertexOutOfRangeError(f"vertex {v} of edge {edge} outside 1..{self.n}")

    @property
    def vertices(self) -> range:
        return range(1, self.n + 1)

    @cached_property
    def _pa(self) -> tuple[frozenset[int], ...]:
        pa: list[set[int]] = [set() for _ in range(self.n + 1)]
        for v, w in self.directed:
            pa[w].add(v)
        return tuple(frozenset(s) for s in pa)

    @cached_property
    def _ch(self) -> tuple[frozenset[int], ...]:
        ch: list[set[int]] = [set() for _ in range(self.n + 1)]
        for v, w in self.directed:
            ch[v].add(w)
        return tuple(frozenset(s) for s in ch)

    @cached_property
    def _sib(self) -> tuple[frozenset[int], ...]:
        sib: list[set[int]] = [set() for _ in range(self.n + 1)]
        for v, w in self.bidirected:
            sib[v].add(w)
            sib[w].add(v)
        return tuple(frozenset(s) for s in sib)

    def parents(self, v: int) -> frozenset[int]:
        return self._pa[self.check_vertex(v)]

    def children(self, v: int) -> frozenset[int]:
        return self._ch[self.check_vertex(v)]

    def siblings(self, v: int) -> frozenset[int]:
        return self._sib[self.check_vertex(v)]

    def siblings_of_set(self, vs: Iterable[int]) -> frozenset[int]:
        out: set[int] = set()
        for v in vs:
            out |= self.siblings(v)
        return frozenset(out)

    def check_vertex(self, v: int) -> int:
        if not isinstance(v, numbers.Integral) or not 1 <= v <= self.n:
            raise VertexOutOfRangeError(f"vertex {v!r} outside 1..{self.n}")
        return int(v)

    def check_vertices(self, vs: Iterable[int]) -> frozenset[int]:
        vs = frozenset(vs)
        if vs and not (min(vs) >= 1 and max(vs) <= self.n and all(type(v) is int for v in vs)):
            return frozenset(self.check_vertex(v) for v in vs)
        return vs

    @cached_property
    def topological_order(self) -> tuple[int, ...]:
        """Kahn ordering with ascending-index tie breaks."""
        indeg = [0] * (self.n + 1)
        children: list[list[int]] = [[] for _ in range(self.n + 1)]
        for v, w in self.directed:
            indeg[w] += 1
            children[v].append(w)
        heap = [v for v in self.vertices if indeg[v] == 0]
        heapq.heapify(heap)
        order = []
        while heap:
            v = heapq.heappop(heap)
            order.append(v)
            for w in children[v]:
                indeg[w] -= 1
                if indeg[w] == 0:
                    heapq.heappush(heap, w)
        if len(order) != self.n:
            stuck = sorted(v for v in self.vertices if indeg[v] > 0)
            edge = next((v, w) for v, w in sorted(self.directed) if v in stuck and w in stuck)
            raise DirectedCycleError(f"directed part has a cycle through edge {edge[0]}->{edge[1]}")
        return tuple(order)

    def sources(self) -> frozenset[int]:
        """Vertices without parents."""
        return frozenset(v for v in self.vertices if not self._pa[v])

    def __repr__(self) -> str:
        d = ", ".join(f"{v}->{w}" for v, w in sorted(self.directed))
        b = ", ".join(f"{v}<->{w}" for v, w in sorted(self.bidirected))
        return f"MixedGraph(n={self.n}, D=[{d}], B=[{b}])"


def validate_graph(
    n: int, directed: Iterable[Iterable[int]] = (), bidirected: Iterable[Iterable[int]] = ()
) -> MixedGraph:
    """Build a :class:`MixedGraph`, raising on self-loops, bad vertices or directed cycles."""
    return MixedGraph(n, frozenset(tuple(e) for e in directed), frozenset(tuple(e) for e in bidirected))


@dataclass(frozen=True)
class LabeledGraph:
    """A graph on local vertices ``1..k`` together with the original vertex labels.

    Local vertex ``i`` corresponds to ``original_labels[i - 1]`` in the source graph.
    """

    graph: MixedGraph
    original_labels: tuple[int, ...]

    @cached_property
    def _local(self) -> dict[int, int]:
        return {orig: i for i, orig in enumerate(self.original_labels, start=1)}

    def to_original(self, v: int) -> int:
        return self.original_labels[v - 1]

    def to_local(self, v: int) -> int:
        return self._local[v]

    def originals(self, vs: Iterable[int]) -> frozenset[int]:
        return frozenset(self.original_labels[v - 1] for v in vs)

    def locals(self, vs: Iterable[int]) -> frozenset[int]:
        loc = self._local
        return frozenset(loc[v] for v in vs if v in loc)

    @property
    def vertex_set(self) -> frozenset[int]:
        return frozenset(self.original_labels)

    def original_edges(self) -> tuple[frozenset[tuple[int, int]], frozenset[tuple[int, int]]]:
        """Directed and bidirected edge sets expressed in original labels."""
        lab = self.original_labels
        d = frozenset((lab[v - 1], lab[w - 1]) for v, w in self.graph.directed)
        b = frozenset(
            (min(lab[v - 1], lab[w - 1]), max(lab[v - 1], lab[w - 1])) for v, w in self.graph.bidirected
        )
        return d, b


@dataclass(frozen=True)
class MixedComponent(LabeledGraph):
    """Mixed component ``G_i``: bidirected block ``c_set`` plus its parents.

    ``c_set`` is in original labels.
    """

    c_set: frozenset[int] = frozenset()


@dataclass(frozen=True)
class HalfTrek:
    """A half-trek from ``source`` ending at ``right[-1]``.

    With ``starts_bidirected`` the walk is ``source <-> right[0] -> ... -> right[-1]``;
    otherwise ``right[0] == source`` is the top node.
    """

    source: int
    right: tuple[int, ...]
    starts_bidirected: bool

    @property
    def left(self) -> frozenset[int]:
        return frozenset((self.source,))

    @property
    def target(self) -> int:
        return self.right[-1]

    def relabel(self, mapping) -> HalfTrek:
        return HalfTrek(mapping(self.source), tuple(mapping(w) for w in self.right), self.starts_bidirected)

    def walk(self) -> tuple[int, ...]:
        """The vertex sequence of the walk, source first."""
        if self.starts_bidirected:
            return (self.source, *self.right)
        return self.right

    def __str__(self) -> str:
        if self.starts_bidirected:
            return f"{self.source}<->" + "->".join(map(str, self.right))
        return "->".join(map(str, self.right))


def ancestors(G: MixedGraph, vs: Iterable[int]) -> frozenset[int]:
    """All vertices with a (possibly empty) directed path into ``vs``."""
    seen = set(G.check_vertices(vs))
    stack = list(seen)
    pa = G._pa
    while stack:
        w = stack.pop()
        for u in pa[w]:
            if u not in seen:
                seen.add(u)
                stack.append(u)
    return frozenset(seen)


def descendants(G: MixedGraph, vs: Iterable[int]) -> frozenset[int]:
    """All vertices reachable from ``vs`` along directed paths, ``vs`` included."""
    seen = set(G.check_vertices(vs))
    stack = list(seen)
    ch = G._ch
    while stack:
        w = stack.pop()
        for u in ch[w]:
            if u not in seen:
                seen.add(u)
                stack.append(u)
    return frozenset(seen)


def is_ancestral(G: MixedGraph, vs: Iterable[int]) -> bool:
    vs = G.check_vertices(vs)
    return ancestors(G, vs) == vs


def induced_subgraph(G: MixedGraph, vs: Iterable[int]) -> LabeledGraph:
    """Subgraph on ``vs`` keeping exactly the edges with both endpoints inside.

    Local labels follow the ascending order of the original labels.
    """
    keep = G.check_vertices(vs)
    labels = tuple(sorted(keep))
    local = {v: i for i, v in enumerate(labels, start=1)}
    d = frozenset((local[v], local[w]) for v, w in G.directed if v in keep and w in keep)
    b = frozenset((local[v], local[w]) for v, w in G.bidirected if v in keep and w in keep)
    return LabeledGraph(MixedGraph(len(labels), d, b), labels)


def _bidirected_block(G: MixedGraph, v: int, within: frozenset[int] | None = None) -> frozenset[int]:
    sib = G._sib
    block = {v}
    stack = [v]
    while stack:
        w = stack.pop()
        for u in sib[w]:
            if u not in block and (within is None or u in within):
                block.add(u)
                stack.append(u)
    return frozenset(block)


def _component_from_block(G: MixedGraph, block: frozenset[int]) -> MixedComponent:
    pa = G._pa
    members = set(block)
    for c in block:
        members |= pa[c]
    labels = tuple(sorted(members))
    local = {v: i for i, v in enumerate(labels, start=1)}
    d = frozenset((local[u], local[c]) for c in block for u in pa[c])
    b = frozenset((local[v], local[w]) for v, w in G.bidirected if v in block and w in block)
    return MixedComponent(MixedGraph(len(labels), d, b), labels, block)


def mixed_components(G: MixedGraph) -> list[MixedComponent]:
    """Tian decomposition of ``G``, ordered by the smallest member of each block."""
    seen: set[int] = set()
    out = []
    for v in G.vertices:
        if v in seen:
            continue
        block = _bidirected_block(G, v)
        seen |= block
        out.append(_component_from_block(G, block))
    return out


def mixed_component_of(G: MixedGraph, v: int) -> MixedComponent:
    """The mixed component of ``G`` whose bidirected block contains ``v``."""
    return _component_from_block(G, _bidirected_block(G, G.check_vertex(v)))


def half_trek_reachable(G: MixedGraph, v: int) -> frozenset[int]:
    """``htr(v)``: vertices outside ``{v} | sib(v)`` reached by a half-trek from ``v``."""
    sib = G.siblings(v)
    reach = descendants(G, sib | {v})
    return reach - sib - {v}


def topological_order(G: MixedGraph) -> tuple[int, ...]:
    return G.topological_order
