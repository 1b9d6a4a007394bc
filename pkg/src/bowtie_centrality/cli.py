"""Command-line interface.

Exit codes: 0 success, 1 failed validation or bad input data, 2 usage error.
All delimited outputs start with the schema comment line and are
deterministic for fixed inputs and seed.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import __version__
from .bowtie import bowtie_decompose, component_size_report
from .centrality import (
    OperatorCache,
    SolverConfig,
    access_centrality,
    alpha_centrality,
    bonacich_centrality,
    bowtie_centrality,
    corrected_centrality,
    direct_portfolio,
    eigenvector_centrality,
    hubbell_centrality,
    total_portfolio_series,
)
from .compare import rank_nodes, ranked_value_table, truncated_jaccard_curve
from .errors import BowtieError, ValidationError
from .graph import (
    NodeValues,
    _schema_line,
    load_csv,
    validate,
    write_edges_csv,
    write_values_csv,
)
from .influence import influence_index
from .reduce import coverage_report, reduce_network
from .report import CORE_SIZE_WARNING, REPORT_MEASURES, run_report
from .synth import BowTieSpec, demo_network, generate

CENTRALITY_CHOICES = (
    "access", "corrected", "bowtie", "influence", "direct", "total",
    "eigenvector", "alpha", "hubbell", "bonacich",
)


def _out_stream(path: str):
    if path == "-":
        return sys.stdout, False
    return open(path, "w", encoding="utf-8", newline=""), True


def _write_csv(path: str, header, rows):
    f, close = _out_stream(path)
    try:
        f.write(_schema_line() + "\n")
        f.write(",".join(header) + "\n")
        for row in rows:
            f.write(",".join(str(cell) for cell in row) + "\n")
    finally:
        if close:
            f.close()


def _fmt(x) -> str:
    return repr(float(x))


def _load_inputs(args, parser):
    if getattr(args, "demo", False):
        if args.edges or args.values:
            parser.error("--demo replaces --edges/--values")
        return demo_network()
    if not args.edges:
        parser.error("--edges is required (or pass --demo)")
    graph, values = load_csv(args.edges, args.values,
                             allow_invalid=args.allow_invalid)
    if args.values is None:
        values = NodeValues.uniform(graph.n)
    return graph, values


def _config(args) -> SolverConfig:
    return SolverConfig(
        tolerance=args.tol,
        threads=args.threads,
        allow_invalid=args.allow_invalid,
    )


def _measures_list(text: str, parser) -> list[str]:
    measures = [m.strip() for m in text.split(",") if m.strip()]
    for m in measures:
        if m not in REPORT_MEASURES:
            parser.error(f"unknown measure {m!r}; choose from "
                         f"{', '.join(REPORT_MEASURES)}")
    if len(measures) < 2:
        parser.error("need at least two measures to compare")
    return measures


# -- subcommand handlers --------------------------------------------------------


def _cmd_validate(args, parser) -> int:
    graph, _ = _load_inputs(args, parser)
    report = validate(graph)
    print(report.summary(graph.labels))
    return 0 if report.ok else 1


def _cmd_decompose(args, parser) -> int:
    graph, _ = _load_inputs(args, parser)
    decomp = bowtie_decompose(graph)
    if args.summary:
        _write_csv(args.out, ("class", "size"), component_size_report(decomp))
    else:
        _write_csv(args.out, ("node", "class"),
                   ((graph.labels[i], decomp.classes[i]) for i in range(graph.n)))
    return 0


def _cmd_centrality(args, parser) -> int:
    graph, values = _load_inputs(args, parser)
    config = _config(args)
    measure = args.measure
    if measure == "access":
        vec = access_centrality(graph, values, config)
    elif measure == "corrected":
        vec = corrected_centrality(graph, values, config=config)
    elif measure == "bowtie":
        vec = bowtie_centrality(graph, values, config=config, formula=args.formula)
    elif measure == "influence":
        core = bowtie_decompose(graph, allow_trivial_core=True).sizes.get("SCC", 0)
        if core > CORE_SIZE_WARNING:
            print(f"warning: core has {core} nodes; path enumeration may be very "
                  "slow, consider --influence-timeout", file=sys.stderr)
        vec = influence_index(graph, values, timeout=args.influence_timeout,
                              max_path_length=args.max_path_length,
                              threads=args.threads)
    elif measure == "direct":
        vec = direct_portfolio(graph, values)
    elif measure == "total":
        vec = total_portfolio_series(graph, values, config)
    elif measure == "eigenvector":
        vec = eigenvector_centrality(graph, config, weighted=args.weighted,
                                     undirected=args.undirected)
    elif measure == "alpha":
        vec = alpha_centrality(graph, args.alpha, config=config,
                               weighted=args.weighted)
    elif measure == "hubbell":
        vec = hubbell_centrality(graph, values, config)
    else:
        vec = bonacich_centrality(graph, args.alpha, args.beta, config=config,
                                  weighted=args.weighted, transpose=args.transpose)
    _write_csv(args.out, ("node", "score"),
               ((graph.labels[i], _fmt(vec.values[i])) for i in range(graph.n)))
    return 0


def _cmd_compare(args, parser) -> int:
    graph, values = _load_inputs(args, parser)
    config = _config(args)
    measures = _measures_list(args.measures, parser)
    cache = OperatorCache(graph, config)
    vectors = {}
    for name in measures:
        if name == "access":
            vectors[name] = access_centrality(graph, values, cache=cache)
        elif name == "corrected":
            vectors[name] = corrected_centrality(graph, values, cache=cache)
        elif name == "bowtie":
            vectors[name] = bowtie_centrality(graph, values, cache=cache)
        else:
            vectors[name] = influence_index(graph, values,
                                            timeout=args.influence_timeout,
                                            threads=args.threads)
    rankings = {name: rank_nodes(vec) for name, vec in vectors.items()}
    if args.top is not None:
        table = ranked_value_table([rankings[m] for m in measures],
                                   labels=graph.labels, top=args.top)
        _write_csv(args.out, ("measure", "rank", "node", "score"),
                   ((m.lower(), r, node, _fmt(s)) for m, r, node, s in table))
        return 0
    rows = []
    for i, a in enumerate(measures):
        for b in measures[i + 1:]:
            curve = truncated_jaccard_curve(rankings[a], rankings[b])
            rows.extend((a, b, n + 1, _fmt(j)) for n, j in enumerate(curve))
    _write_csv(args.out, ("measure_a", "measure_b", "n", "jaccard"), rows)
    return 0


def _cmd_reduce(args, parser) -> int:
    graph, values = _load_inputs(args, parser)
    decomp = bowtie_decompose(graph)
    result = reduce_network(graph, values, decomp, args.threshold)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_edges_csv(result.graph, out / "reduced_edges.csv")
    write_values_csv(result.graph, result.values, out / "reduced_values.csv")
    coverage = coverage_report(values, result.values)
    print(f"kept {result.graph.n} of {graph.n} nodes; {coverage.summary()}")
    return 0


def _cmd_generate(args, parser) -> int:
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if args.demo:
        if args.spec:
            parser.error("--demo replaces --spec")
        graph, values = demo_network()
        spec_text = None
    else:
        if not args.spec:
            parser.error("--spec FILE is required (or pass --demo)")
        spec = BowTieSpec.from_json(Path(args.spec).read_text(encoding="utf-8"))
        graph, values = generate(spec, seed=args.seed)
        spec_text = spec.to_json()
    write_edges_csv(graph, out / "edges.csv")
    write_values_csv(graph, values, out / "values.csv")
    if spec_text is not None:
        (out / "spec.json").write_text(spec_text + "\n", encoding="utf-8")
    print(f"wrote {graph.n} nodes / {graph.n_edges} edges to {out}")
    return 0


def _cmd_report(args, parser) -> int:
    cfg = {}
    if args.config:
        with open(args.config, "r", encoding="utf-8") as f:
            cfg = json.load(f)
    edges = args.edges or cfg.get("edges")
    values_path = args.values or cfg.get("values")
    out_dir = args.out_dir or cfg.get("output_dir")
    if args.demo:
        graph, values = demo_network()
    elif edges:
        graph, values = load_csv(edges, values_path,
                                 allow_invalid=args.allow_invalid)
        if values_path is None:
            values = NodeValues.uniform(graph.n)
    else:
        parser.error("need --edges, --demo, or an 'edges' key in --config")
    if not out_dir:
        parser.error("need --out-dir or an 'output_dir' key in --config")

    measures = cfg.get("measures", list(REPORT_MEASURES))
    if args.measures:
        measures = _measures_list(args.measures, parser)
    threshold = args.threshold if args.threshold is not None else cfg.get("threshold", 0.0)
    top = args.top if args.top is not None else cfg.get("top", 20)
    timeout = (args.influence_timeout if args.influence_timeout is not None
               else cfg.get("influence_timeout"))
    manifest = run_report(
        graph, values, out_dir,
        threshold=float(threshold),
        measures=measures,
        top=int(top),
        config=_config(args),
        figures=not args.no_figures and cfg.get("figures", True),
        influence_timeout=timeout,
    )
    print(f"report written to {out_dir} ({len(manifest['files'])} files)")
    return 0


# -- parser construction ----------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bowtie",
        description="Bow-tie decomposition and value-flow centrality for "
                    "directed weighted networks.",
    )
    parser.add_argument("--version", action="version",
                        version=f"%(prog)s {__version__}")

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=1e-10,
                        help="relative residual tolerance for linear solves")
    common.add_argument("--threads", type=int, default=os.cpu_count() or 1,
                        help="worker threads for per-component and per-node work")
    common.add_argument("--seed", type=int, default=0,
                        help="random seed (generation)")
    common.add_argument("--allow-invalid", action="store_true",
                        help="downgrade validation failure to a warning")

    inputs = argparse.ArgumentParser(add_help=False)
    inputs.add_argument("--edges", help="edge CSV (source,target,weight)")
    inputs.add_argument("--values", help="node value CSV (node,value); "
                                         "defaults to 1 per node")
    inputs.add_argument("--demo", action="store_true",
                        help="use the built-in six-node example")

    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", parents=[common, inputs],
                       help="check the invertibility preconditions")
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("decompose", parents=[common, inputs],
                       help="classify nodes into bow-tie components")
    p.add_argument("--out", default="-", help="output CSV path ('-' = stdout)")
    p.add_argument("--summary", action="store_true",
                   help="emit component sizes instead of per-node classes")
    p.set_defaults(func=_cmd_decompose)

    p = sub.add_parser("centrality", parents=[common, inputs],
                       help="compute one centrality measure")
    p.add_argument("--measure", choices=CENTRALITY_CHOICES, default="access")
    p.add_argument("--out", default="-", help="output CSV path ('-' = stdout)")
    p.add_argument("--formula", choices=("resolvent", "product"),
                   default="resolvent", help="bow-tie centrality evaluation route")
    p.add_argument("--alpha", type=float, default=1.0,
                   help="attenuation (alpha/bonacich measures)")
    p.add_argument("--beta", type=float, default=0.0,
                   help="second parameter of the two-parameter measure")
    p.add_argument("--weighted", action="store_true",
                   help="use edge weights in the classical baselines")
    p.add_argument("--undirected", action="store_true",
                   help="symmetrize the adjacency (eigenvector only)")
    p.add_argument("--transpose", action="store_true",
                   help="transpose the adjacency (bonacich only)")
    p.add_argument("--influence-timeout", type=float, default=None,
                   help="wall-clock budget in seconds for path enumeration")
    p.add_argument("--max-path-length", type=int, default=None,
                   help="cap path length in edges (influence only)")
    p.set_defaults(func=_cmd_centrality)

    p = sub.add_parser("compare", parents=[common, inputs],
                       help="rank nodes under several measures and compare")
    p.add_argument("--measures", default="access,corrected,bowtie,influence",
                   help="comma-separated measures to compare")
    p.add_argument("--top", type=int, default=None,
                   help="emit the top-K ranked-value table instead of curves")
    p.add_argument("--out", default="-", help="output CSV path ('-' = stdout)")
    p.add_argument("--influence-timeout", type=float, default=None)
    p.set_defaults(func=_cmd_compare)

    p = sub.add_parser("reduce", parents=[common, inputs],
                       help="drop nodes that cannot carry access value")
    p.add_argument("--threshold", type=float, default=0.0,
                   help="keep output-side nodes with value >= threshold")
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=_cmd_reduce)

    p = sub.add_parser("generate", parents=[common],
                       help="write a synthetic bow-tie network")
    p.add_argument("--spec", help="JSON file with the shape parameters")
    p.add_argument("--demo", action="store_true",
                   help="write the built-in six-node example")
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=_cmd_generate)

    p = sub.add_parser("report", parents=[common, inputs],
                       help="full pipeline: decompose, reduce, measure, render")
    p.add_argument("--config", help="JSON config (flags override file keys)")
    p.add_argument("--out-dir", help="directory for all artifacts")
    p.add_argument("--threshold", type=float, default=None)
    p.add_argument("--measures", default=None)
    p.add_argument("--top", type=int, default=None)
    p.add_argument("--no-figures", action="store_true",
                   help="skip PNG rendering, write delimited outputs only")
    p.add_argument("--influence-timeout", type=float, default=None)
    p.set_defaults(func=_cmd_report)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, parser)
    except ValidationError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    except BowtieError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
