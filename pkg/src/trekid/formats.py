"""Graph text and JSON formats.

Text format, one item per line, ``#`` starts a comment::

    graph 3
    d 1 2      # directed edge 1 -> 2
    b 2 3      # bidirected edge 2 <-> 3

JSON format: ``{"n": 3, "directed": [[1, 2]], "bidirected": [[2, 3]]}``.
"""

from __future__ import annotations

import json
from pathlib import Path

from .errors import GraphError, GraphFormatError
from .graph import MixedGraph


def parse_graph_text(text: str) -> MixedGraph:
    n = None
    directed = []
    bidirected = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        kind = tokens[0]
        try:
            values = [int(t) for t in tokens[1:]]
        except ValueError:
            raise GraphFormatError(f"line {lineno}: non-integer field in {raw.strip()!r}") from None
        if kind == "graph":
            if n is not None:
                raise GraphFormatError(f"line {lineno}: duplicate 'graph' header")
            if len(values) != 1 or values[0] < 0:
                raise GraphFormatError(f"line {lineno}: expected 'graph <n>'")
            n = values[0]
        elif kind in ("d", "b"):
            if n is None:
                raise GraphFormatError(f"line {lineno}: edge before 'graph <n>' header")
            if len(values) != 2:
                raise GraphFormatError(f"line {lineno}: expected '{kind} <i> <j>'")
            (directed if kind == "d" else bidirected).append(tuple(values))
        else:
            raise GraphFormatError(f"line {lineno}: unknown record type {kind!r}")
    if n is None:
        raise GraphFormatError("missing 'graph <n>' header")
    try:
        return MixedGraph(n, frozenset(directed), frozenset(bidirected))
    except GraphError as exc:
        raise type(exc)(f"{exc}") from None


def format_graph_text(G: MixedGraph) -> str:
    lines = [f"graph {G.n}"]
    lines += [f"d {v} {w}" for v, w in sorted(G.directed)]
    lines += [f"b {v} {w}" for v, w in sorted(G.bidirected)]
    return "\n".join(lines) + "\n"


def graph_to_dict(G: MixedGraph) -> dict:
    return {
        "n": G.n,
        "directed": [list(e) for e in sorted(G.directed)],
        "bidirected": [list(e) for e in sorted(G.bidirected)],
    }


def graph_from_dict(doc: dict) -> MixedGraph:
    if not isinstance(doc, dict) or "n" not in doc:
        raise GraphFormatError("graph document must be an object with key 'n'")
    n = doc["n"]
    if not isinstance(n, int) or isinstance(n, bool) or n < 0:
        raise GraphFormatError(f"'n' must be a non-negative integer, got {n!r}")
    edges = {}
    for key in ("directed", "bidirected"):
        items = doc.get(key, [])
        if not isinstance(items, list):
            raise GraphFormatError(f"'{key}' must be a list of pairs")
        pairs = []
        for i, e in enumerate(items):
            if (
                not isinstance(e, (list, tuple))
                or len(e) != 2
                or not all(isinstance(x, int) and not isinstance(x, bool) for x in e)
            ):
                raise GraphFormatError(f"'{key}'[{i}]: expected a pair of integers, got {e!r}")
            pairs.append(tuple(e))
        edges[key] = frozenset(pairs)
    return MixedGraph(n, edges["directed"], edges["bidirected"])


def parse_graph_json(text: str) -> MixedGraph:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GraphFormatError(f"line {exc.lineno}: invalid JSON ({exc.msg})") from None
    return graph_from_dict(doc)


def format_graph_json(G: MixedGraph) -> str:
    return json.dumps(graph_to_dict(G))


def read_graph(path: str | Path) -> MixedGraph:
    """Read a graph file, picking the parser from the first non-blank character."""
    text = Path(path).read_text()
    if text.lstrip().startswith("{"):
        return parse_graph_json(text)
    return parse_graph_text(text)


def write_graph(G: MixedGraph, path: str | Path) -> None:
    path = Path(path)
    if path.suffix == ".json":
        path.write_text(format_graph_json(G) + "\n")
    else:
        path.write_text(format_graph_text(G))
