"""Identifiability classifiers built on half-trek systems.

Three tests are provided:

* :func:`htc_identifiable` -- the iterative half-trek criterion on the whole graph.
* :func:`htc_unidentifiable` -- the half-trek criterion's sufficient condition for
  generically infinite-to-one parametrizations, applied per mixed component.
* :func:`ancestral_identifiable` -- the iterative half-trek criterion run on mixed
  components of subgraphs induced by ancestral sets.

:func:`classify` runs all three and returns an :class:`IdReport` whose
certificates can be checked independently with :func:`check_certificate`.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import combinations

from .errors import GraphFormatError
from .flow import (
    HalfTrekSystem,
    check_half_trek_system,
    flow_value,
    half_trek_system,
    unit_max_flow,
)
from .formats import graph_from_dict, graph_to_dict
from .graph import (
    HalfTrek,
    LabeledGraph,
    MixedComponent,
    MixedGraph,
    _bidirected_block,
    _component_from_block,
    ancestors,
    half_trek_reachable,
    is_ancestral,
    mixed_components,
)

BASELINE = "baseline"
EXTENDED = "extended-ancestral"
PLAIN = "plain-ancestral"
PHASES = (BASELINE, EXTENDED, PLAIN)

IDENTIFIABLE = "generically_identifiable"
UNIDENTIFIABLE = "generically_unidentifiable"
INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class NodeSolution:
    """One solved vertex: the half-trek system used and the subgraph it lives in.

    For the baseline phase the context is the whole graph and ``c_set`` is
    ``None``. Otherwise the context is the mixed component with bidirected
    block ``c_set`` of the subgraph induced by ``ancestral_set``. All vertex
    labels are those of the input graph.
    """

    v: int
    phase: str
    ancestral_set: frozenset[int]
    c_set: frozenset[int] | None
    vertices: frozenset[int]
    allowed: frozenset[int]
    system: HalfTrekSystem


@dataclass(frozen=True)
class Certificate:
    """Solve order: parentless vertices first, then ``steps`` in order."""

    initial: tuple[int, ...]
    steps: tuple[NodeSolution, ...]

    @property
    def solved(self) -> frozenset[int]:
        return frozenset(self.initial) | {s.v for s in self.steps}

    @property
    def order(self) -> tuple[int, ...]:
        return self.initial + tuple(s.v for s in self.steps)


@dataclass(frozen=True)
class IdentificationResult:
    identified: bool
    certificate: Certificate

    def __bool__(self) -> bool:
        return self.identified


@dataclass(frozen=True)
class UnidentifiabilityResult:
    """Outcome of the HTC unidentifiability test.

    ``c_set`` names the bidirected block of the failing component and
    ``vertex`` a vertex of it whose parents could not all be reached.
    """

    unidentifiable: bool
    c_set: frozenset[int] | None = None
    vertex: int | None = None

    def __bool__(self) -> bool:
        return self.unidentifiable


def context_graph(G: MixedGraph, sol: NodeSolution) -> LabeledGraph:
    """Rebuild the subgraph a :class:`NodeSolution` was found in."""
    if sol.c_set is None:
        return LabeledGraph(G, tuple(G.vertices))
    block = _bidirected_block(G, sol.v, within=sol.ancestral_set)
    return _component_from_block(G, block)


def htc_identifiable(G: MixedGraph) -> IdentificationResult:
    """Iterative half-trek criterion on the whole graph.

    A vertex is solved once a half-trek system onto its parents exists from
    allowed vertices: solved vertices and vertices not half-trek reachable,
    never the vertex itself or its siblings.
    """
    V = frozenset(G.vertices)
    solved = set(G.sources())
    initial = tuple(sorted(solved))
    htr = {v: half_trek_reachable(G, v) for v in G.vertices}
    steps = []
    failed_with: dict[int, frozenset[int]] = {}
    changed = True
    while changed and len(solved) < G.n:
        changed = False
        for v in G.vertices:
            if v in solved:
                continue
            allowed = frozenset((solved | (V - htr[v])) - G._sib[v] - {v})
            if failed_with.get(v) == allowed:
                continue
            system = half_trek_system(G, allowed, v)
            failed_with[v] = allowed
            if system is not None:
                solved.add(v)
                changed = True
                steps.append(NodeSolution(v, BASELINE, V, None, V, allowed, system))
    return IdentificationResult(len(solved) == G.n, Certificate(initial, tuple(steps)))


def _try_component(
    G: MixedGraph, v: int, anc_set: frozenset[int], allowed: frozenset[int], phase: str
) -> NodeSolution | None:
    # anc_set is ancestral, so the component of G[anc_set] is read off G directly
    block = _bidirected_block(G, v, within=anc_set)
    comp = _component_from_block(G, block)
    sources = comp.originals(comp.graph.sources())
    allowed = ((allowed & comp.vertex_set) | sources) - G._sib[v] - {v}
    system = half_trek_system(comp.graph, comp.locals(allowed), comp.to_local(v))
    if system is None:
        return None
    return NodeSolution(
        v, phase, anc_set, block, comp.vertex_set, allowed, system.relabel(comp.to_original)
    )


def ancestral_identifiable(G: MixedGraph, second_phase: bool = True) -> IdentificationResult:
    """Half-trek identification through ancestral subgraphs and their mixed components.

    For an unsolved ``v`` the allowed set is first restricted to
    ``An(v) | sib(An(v))``. The half-trek system is then sought in the mixed
    component containing ``v`` of the subgraph induced by ``An({v} | A)``;
    failing that, in the component of the subgraph induced by ``An(v)``.
    Vertices without parents in the component count as solved there.
    ``second_phase=False`` drops the fallback.
    """
    V = frozenset(G.vertices)
    solved = set(G.sources())
    initial = tuple(sorted(solved))
    htr = {v: half_trek_reachable(G, v) for v in G.vertices}
    anc = {v: ancestors(G, (v,)) for v in G.vertices}
    steps = []
    failed_with: dict[int, frozenset[int]] = {}
    changed = True
    while changed and len(solved) < G.n:
        changed = False
        for v in G.vertices:
            if v in solved:
                continue
            S = anc[v] | G.siblings_of_set(anc[v])
            A = frozenset(S & (solved | (V - htr[v])) - G._sib[v] - {v})
            # both phases depend on the graph only through A
            if failed_with.get(v) == A:
                continue
            failed_with[v] = A
            sol = _try_component(G, v, ancestors(G, A | {v}), A, EXTENDED)
            if sol is None and second_phase:
                sol = _try_component(G, v, anc[v], A, PLAIN)
            if sol is not None:
                solved.add(v)
                changed = True
                steps.append(sol)
    return IdentificationResult(len(solved) == G.n, Certificate(initial, tuple(steps)))


def _component_family_flow(comp: MixedComponent) -> tuple[int, int, int | None]:
    """Max flow of the joint network asking for one HTC set per vertex.

    Every unordered pair ``{u, w}`` contributes at most one unit, either as
    ``u`` in ``Y_w`` or as ``w`` in ``Y_u``; each vertex with parents owns a
    copy of the half-trek network. Returns (flow, demand, first deficient
    local vertex).
    """
    g = comp.graph
    m = g.n
    pa, sib = g._pa, g._sib
    owners = [w for w in g.vertices if pa[w]]
    base = {}
    next_index = 2
    for w in owners:
        base[w] = next_index
        next_index += 2 * m
    arcs = []

    def L(w, x):
        return base[w] + x - 1

    def R(w, x):
        return base[w] + m + x - 1

    for u, w in combinations(g.vertices, 2):
        targets = []
        if pa[w] and u not in sib[w]:
            targets.append(L(w, u))
        if pa[u] and w not in sib[u]:
            targets.append(L(u, w))
        if targets:
            node = next_index
            next_index += 1
            arcs.append((0, node))
            arcs += [(node, x) for x in targets]
    for w in owners:
        for x in g.vertices:
            arcs.append((L(w, x), R(w, x)))
            arcs += [(L(w, x), R(w, y)) for y in sorted(sib[x])]
        arcs += [(R(w, x), R(w, y)) for x, y in sorted(g.directed)]
        arcs += [(R(w, p), 1) for p in sorted(pa[w])]
    demand = sum(len(pa[w]) for w in owners)
    value, paths = unit_max_flow(next_index, arcs, 0, 1, want_paths=True)
    deficient = None
    if value < demand:
        got = {w: 0 for w in owners}
        for path in paths:
            last = path[-2]
            w = next(w for w in reversed(owners) if base[w] <= last)
            got[w] += 1
        deficient = next(w for w in owners if got[w] < len(pa[w]))
    return value, demand, deficient


def htc_unidentifiable(G: MixedGraph, method: str = "family") -> UnidentifiabilityResult:
    """HTC test for a generically infinite-to-one parametrization.

    Each mixed component is tested separately. ``method="node"`` flags a
    component when some vertex has no HTC set even from the largest allowed
    set ``V_i - ({v} | sib(v))``. ``method="family"`` (default) also flags
    components where every family of per-vertex HTC sets contains a pair
    ``u in Y_w`` and ``w in Y_u``; it decides this with one joint max flow.
    """
    if method not in ("family", "node"):
        raise ValueError(f"unknown method {method!r}")
    for comp in mixed_components(G):
        g = comp.graph
        everything = frozenset(g.vertices)
        for v in sorted(comp.locals(comp.c_set)):
            need = len(g._pa[v])
            if need and flow_value(g, everything - g._sib[v] - {v}, v) < need:
                return UnidentifiabilityResult(True, comp.c_set, comp.to_original(v))
        if method == "family":
            value, demand, deficient = _component_family_flow(comp)
            if value < demand:
                return UnidentifiabilityResult(True, comp.c_set, comp.to_original(deficient))
    return UnidentifiabilityResult(False)


@dataclass(frozen=True)
class IdReport:
    graph: MixedGraph
    htci_plain: bool
    htcu: bool
    alg1: bool
    status: str
    htcu_witness: UnidentifiabilityResult | None = None
    certificate: Certificate | None = None
    htc_certificate: Certificate | None = field(default=None, repr=False)


def classify(G: MixedGraph, htcu_method: str = "family") -> IdReport:
    htc = htc_identifiable(G)
    htcu = htc_unidentifiable(G, method=htcu_method)
    alg1 = ancestral_identifiable(G)
    if alg1.identified:
        status = IDENTIFIABLE
    elif htcu.unidentifiable:
        status = UNIDENTIFIABLE
    else:
        status = INCONCLUSIVE
    return IdReport(
        G,
        htci_plain=htc.identified,
        htcu=htcu.unidentifiable,
        alg1=alg1.identified,
        status=status,
        htcu_witness=htcu if htcu.unidentifiable else None,
        certificate=alg1.certificate if alg1.identified else None,
        htc_certificate=htc.certificate if htc.identified else None,
    )


def check_certificate(G: MixedGraph, cert: Certificate, complete: bool = True) -> list[str]:
    """Independently re-check a certificate; returns a list of problems (empty if valid).

    Each half-trek system is re-validated from the definitions inside its
    context graph, and every source that is half-trek reachable from the
    solved vertex must have been solved earlier or be parentless in the
    context graph.
    """
    problems = []
    if set(cert.initial) != set(G.sources()):
        problems.append(f"initial {sorted(cert.initial)} != parentless vertices {sorted(G.sources())}")
    done = set(cert.initial)
    for sol in cert.steps:
        v = sol.v
        tag = f"vertex {v}"
        if v in done:
            problems.append(f"{tag}: solved twice")
        if sol.phase not in PHASES:
            problems.append(f"{tag}: unknown phase {sol.phase!r}")
        if sol.c_set is not None:
            if not is_ancestral(G, sol.ancestral_set):
                problems.append(f"{tag}: context set {sorted(sol.ancestral_set)} is not ancestral")
                continue
            if v not in sol.ancestral_set:
                problems.append(f"{tag}: not inside its context set")
                continue
        ctx = context_graph(G, sol)
        if ctx.vertex_set != sol.vertices:
            problems.append(f"{tag}: recorded vertices differ from the rebuilt context graph")
        if isinstance(ctx, MixedComponent) and ctx.c_set != sol.c_set:
            problems.append(f"{tag}: recorded component block differs from the rebuilt one")
        g = ctx.graph
        lv = ctx.to_local(v)
        if not sol.system.sources <= ctx.vertex_set or not set().union(
            *(h.right for h in sol.system)
        ) <= ctx.vertex_set:
            problems.append(f"{tag}: half-treks leave the context graph")
            continue
        local = sol.system.relabel(ctx.to_local)
        problems += [f"{tag}: {p}" for p in check_half_trek_system(g, local, g._pa[lv])]
        if local.sources & (g._sib[lv] | {lv}):
            problems.append(f"{tag}: a source is the vertex itself or one of its siblings")
        if sol.allowed & (G._sib[v] | {v}):
            problems.append(f"{tag}: allowed set contains the vertex or one of its siblings")
        if not sol.system.sources <= sol.allowed:
            problems.append(f"{tag}: sources outside the recorded allowed set")
        htr = half_trek_reachable(g, lv)
        ctx_sources = g.sources()
        for y in sorted(local.sources):
            if y in htr and y not in ctx_sources and ctx.to_original(y) not in done:
                problems.append(f"{tag}: source {ctx.to_original(y)} is half-trek reachable but unsolved")
        done.add(v)
    if complete and done != set(G.vertices):
        problems.append(f"unsolved vertices {sorted(set(G.vertices) - done)}")
    return problems


# -- JSON -------------------------------------------------------------------


def _half_trek_to_dict(h: HalfTrek) -> dict:
    return {
        "source": h.source,
        "target": h.target,
        "starts_bidirected": h.starts_bidirected,
        "walk": list(h.walk()),
    }


def _half_trek_from_dict(doc: dict) -> HalfTrek:
    walk = tuple(doc["walk"])
    bi = bool(doc["starts_bidirected"])
    right = walk[1:] if bi else walk
    h = HalfTrek(walk[0], right, bi)
    if h.source != doc["source"] or h.target != doc["target"]:
        raise GraphFormatError(f"half-trek {doc!r}: source/target disagree with walk")
    return h


def certificate_to_dict(cert: Certificate) -> dict:
    return {
        "initial": list(cert.initial),
        "steps": [
            {
                "vertex": s.v,
                "phase": s.phase,
                "ancestral_set": sorted(s.ancestral_set),
                "component": None if s.c_set is None else sorted(s.c_set),
                "vertices": sorted(s.vertices),
                "allowed": sorted(s.allowed),
                "half_treks": [_half_trek_to_dict(h) for h in s.system],
            }
            for s in cert.steps
        ],
    }


def certificate_from_dict(doc: dict) -> Certificate:
    try:
        steps = tuple(
            NodeSolution(
                v=s["vertex"],
                phase=s["phase"],
                ancestral_set=frozenset(s["ancestral_set"]),
                c_set=None if s["component"] is None else frozenset(s["component"]),
                vertices=frozenset(s["vertices"]),
                allowed=frozenset(s["allowed"]),
                system=HalfTrekSystem(tuple(_half_trek_from_dict(h) for h in s["half_treks"])),
            )
            for s in doc["steps"]
        )
        return Certificate(tuple(doc["initial"]), steps)
    except (KeyError, TypeError, IndexError) as exc:
        raise GraphFormatError(f"malformed certificate: {exc!r}") from None


def report_to_dict(report: IdReport, include_certificate: bool = True) -> dict:
    doc = {
        "status": report.status,
        "htci_plain": report.htci_plain,
        "htcu": report.htcu,
        "alg1": report.alg1,
        "htcu_witness": None,
        "graph": graph_to_dict(report.graph),
    }
    w = report.htcu_witness
    if w is not None:
        doc["htcu_witness"] = {"component": sorted(w.c_set), "vertex": w.vertex}
    if include_certificate:
        doc["certificate"] = None if report.certificate is None else certificate_to_dict(report.certificate)
        doc["htc_certificate"] = (
            None if report.htc_certificate is None else certificate_to_dict(report.htc_certificate)
        )
    return doc


def report_from_dict(doc: dict) -> IdReport:
    try:
        G = graph_from_dict(doc["graph"])
        w = doc.get("htcu_witness")
        witness = None if w is None else UnidentifiabilityResult(True, frozenset(w["component"]), w["vertex"])
        cert = doc.get("certificate")
        htc_cert = doc.get("htc_certificate")
        return IdReport(
            G,
            htci_plain=bool(doc["htci_plain"]),
            htcu=bool(doc["htcu"]),
            alg1=bool(doc["alg1"]),
            status=doc["status"],
            htcu_witness=witness,
            certificate=None if cert is None else certificate_from_dict(cert),
            htc_certificate=None if htc_cert is None else certificate_from_dict(htc_cert),
        )
    except (KeyError, TypeError) as exc:
        raise GraphFormatError(f"malformed report: {exc!r}") from None


def report_to_json(report: IdReport, include_certificate: bool = True) -> str:
    return json.dumps(report_to_dict(report, include_certificate), indent=2)


def report_from_json(text: str) -> IdReport:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GraphFormatError(f"line {exc.lineno}: invalid JSON ({exc.msg})") from None
    return report_from_dict(doc)
