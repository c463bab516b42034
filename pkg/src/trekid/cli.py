"""``trekid`` command line.

Exit status is 0 on success, 2 on bad input and 3 on a numeric failure. A
classification verdict is printed, never encoded in the exit status.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from .errors import GraphError, NumericFailure, TrekidError
from .formats import format_graph_json, format_graph_text, read_graph
from .graph import ancestors, mixed_components
from .graphgen import GenConfig, random_mixed_graph
from .identify import classify, report_to_dict, report_to_json
from .sim import SimConfig, run_experiment, write_outputs
from .verify import verify_graph

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NUMERIC = 3


class InputError(TrekidError):
    pass


def _default_seed() -> int:
    raw = os.environ.get("TREKID_SEED")
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise InputError(f"TREKID_SEED must be an integer, got {raw!r}") from None


def _seed(args) -> int:
    return args.seed if args.seed is not None else _default_seed()


def _fmt_set(vs) -> str:
    return "{" + ",".join(str(v) for v in sorted(vs)) + "}"


def _edges_text(d, b) -> str:
    parts = [f"{u}->{w}" for u, w in sorted(d)] + [f"{u}<->{w}" for u, w in sorted(b)]
    return " ".join(parts) if parts else "(no edges)"


def cmd_classify(args, out) -> int:
    report = classify(read_graph(args.file))
    if args.json:
        out.write(report_to_json(report, include_certificate=args.certificate) + "\n")
        return EXIT_OK
    doc = report_to_dict(report, include_certificate=False)
    for key in ("status", "htci_plain", "htcu", "alg1"):
        value = doc[key]
        out.write(f"{key}: {str(value).lower() if isinstance(value, bool) else value}\n")
    if report.htcu_witness is not None:
        w = report.htcu_witness
        out.write(f"htcu_witness: component {_fmt_set(w.c_set)}, vertex {w.vertex}\n")
    if args.certificate and report.certificate is not None:
        cert = report.certificate
        out.write(f"certificate: parentless {_fmt_set(cert.initial)}\n")
        for s in cert.steps:
            where = "" if s.c_set is None else f" in component {_fmt_set(s.c_set)} of An={_fmt_set(s.ancestral_set)}"
            treks = ", ".join(str(h) for h in s.system) or "(no parents)"
            out.write(f"  solve {s.v} [{s.phase}]{where}: {treks}\n")
    return EXIT_OK


def cmd_decompose(args, out) -> int:
    comps = mixed_components(read_graph(args.file))
    if args.json:
        docs = []
        for c in comps:
            d, b = c.original_edges()
            docs.append({
                "vertices": sorted(c.vertex_set),
                "c_set": sorted(c.c_set),
                "directed": [list(e) for e in sorted(d)],
                "bidirected": [list(e) for e in sorted(b)],
            })
        out.write(json.dumps(docs) + "\n")
        return EXIT_OK
    for i, c in enumerate(comps, start=1):
        d, b = c.original_edges()
        out.write(f"component {i}: V={_fmt_set(c.vertex_set)} C={_fmt_set(c.c_set)}\n")
        out.write(f"  {_edges_text(d, b)}\n")
    return EXIT_OK


def cmd_ancestors(args, out) -> int:
    G = read_graph(args.file)
    anc = ancestors(G, args.of)
    if args.json:
        out.write(json.dumps(sorted(anc)) + "\n")
    else:
        out.write(" ".join(str(v) for v in sorted(anc)) + "\n")
    return EXIT_OK


def cmd_generate(args, out) -> int:
    config = GenConfig(args.n, args.p, args.q, _seed(args))
    if args.count < 0:
        raise InputError(f"--count must be non-negative, got {args.count}")
    for i in range(args.count):
        rng = np.random.default_rng(np.random.SeedSequence([config.seed, i]))
        G = random_mixed_graph(config, rng)
        if args.json:
            out.write(format_graph_json(G) + "\n")
        else:
            if i:
                out.write("\n")
            out.write(format_graph_text(G))
    return EXIT_OK


def cmd_simulate(args, out) -> int:
    try:
        doc = json.loads(open(args.config).read())
    except json.JSONDecodeError as exc:
        raise InputError(f"{args.config}: line {exc.lineno}: invalid JSON ({exc.msg})") from None
    if not isinstance(doc, dict):
        raise InputError(f"{args.config}: expected a JSON object")
    if args.workers is not None:
        doc["workers"] = args.workers
    try:
        config = SimConfig.from_dict(doc)
    except TypeError as exc:
        raise InputError(f"{args.config}: {exc}") from None
    result = run_experiment(config)
    paths = write_outputs(result, args.out)
    for name in ("cells", "aggregate", "gnuplot"):
        out.write(f"{name}: {paths[name]}\n")
    for failure in result.failures:
        out.write(f"budget exhausted: {failure}\n")
    return EXIT_OK


def cmd_verify(args, out) -> int:
    G = read_graph(args.file)
    if args.trials < 1:
        raise InputError(f"--trials must be at least 1, got {args.trials}")
    report = verify_graph(G, np.random.default_rng(_seed(args)), args.trials)
    if args.json:
        out.write(json.dumps(report.to_dict()) + "\n")
        return EXIT_OK
    for c in report.checks:
        out.write(f"{c.status.upper():4} {c.name}: {c.detail}\n")
    out.write(f"overall: {'pass' if report.ok else 'fail'}\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="trekid", description="Generic identifiability of linear SEMs on mixed graphs.")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("classify", help="classify a graph file")
    p.add_argument("file")
    p.add_argument("--json", action="store_true", help="print the report as JSON")
    p.add_argument("--certificate", action="store_true", help="include the identification certificate")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("decompose", help="print the mixed components of a graph")
    p.add_argument("file")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("ancestors", help="print An({v})")
    p.add_argument("file")
    p.add_argument("--of", type=int, nargs="+", required=True, metavar="V")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_ancestors)

    p = sub.add_parser("generate", help="emit random mixed graphs")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=float, required=True, help="extra bidirected edge probability")
    p.add_argument("--q", type=float, required=True, help="directed edge probability")
    p.add_argument("--seed", type=int, help="defaults to $TREKID_SEED, else 0")
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--json", action="store_true", help="one JSON graph per line")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("simulate", help="run the inconclusive-graph experiment")
    p.add_argument("--config", required=True, help="JSON file with SimConfig fields")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--workers", type=int, help="overrides the config")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("verify", help="run numeric oracle checks on a graph")
    p.add_argument("file")
    p.add_argument("--seed", type=int, help="defaults to $TREKID_SEED, else 0")
    p.add_argument("--trials", type=int, default=3)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None, out=None, err=None) -> int:
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args, out)
    except NumericFailure as exc:
        err.write(f"trekid: numeric failure: {exc}\n")
        return EXIT_NUMERIC
    except (GraphError, InputError, OSError, ValueError) as exc:
        err.write(f"trekid: error: {exc}\n")
        return EXIT_INPUT


def main_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
