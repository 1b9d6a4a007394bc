"""End-to-end report: decompose, reduce, measure, compare, render.

Writes delimited outputs plus figures into one directory and returns a JSON
manifest.  Every output is a pure function of the inputs (no timestamps, no
machine identifiers), so rerunning on the same data reproduces every
delimited file byte for byte.
"""

from __future__ import annotations

import csv
import json
import warnings
from itertools import combinations
from pathlib import Path

import numpy as np

from . import __version__
from .bowtie import bowtie_decompose, component_size_report
from .centrality import (
    OperatorCache,
    SolverConfig,
    access_centrality,
    bowtie_centrality,
    corrected_centrality,
)
from .compare import rank_nodes, ranked_value_table, truncated_jaccard_curve
from .graph import (
    NodeValues,
    WeightedDigraph,
    _schema_line,
    ensure_valid,
    validate,
    write_edges_csv,
    write_values_csv,
)
from .influence import influence_index
from .reduce import coverage_report, reduce_network

REPORT_MEASURES = ("access", "corrected", "bowtie", "influence")

#: Above this core size the path-enumeration measure may take impractically
#: long, so requesting it emits a warning (a timeout remains the hard stop).
CORE_SIZE_WARNING = 30


def _write_rows(path: Path, header, rows):
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write(_schema_line() + "\n")
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _fmt(x) -> str:
    return repr(float(x))


def run_report(graph: WeightedDigraph, values: NodeValues, out_dir,
               *, threshold: float = 0.0, measures=REPORT_MEASURES,
               top: int = 20, config: SolverConfig | None = None,
               figures: bool = True, influence_timeout: float | None = None) -> dict:
    """Run the full pipeline and write all artifacts under ``out_dir``.

    Centralities are computed on the reduced network (input side, core, and
    output nodes whose value clears ``threshold``); rankings, truncated
    overlap curves for every measure pair, and the ranked-value table follow
    from those.  Returns the manifest that is also written to report.json.
    """
    config = config or SolverConfig()
    for m in measures:
        if m not in REPORT_MEASURES:
            raise ValueError(f"unknown report measure {m!r}; "
                             f"choose from {', '.join(REPORT_MEASURES)}")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    files: list[str] = []

    report = validate(graph)
    ensure_valid(graph, report, config.allow_invalid)

    decomp = bowtie_decompose(graph)
    _write_rows(out / "node_classes.csv", ("node", "class"),
                ((graph.labels[i], decomp.classes[i]) for i in range(graph.n)))
    _write_rows(out / "component_sizes.csv", ("class", "size"),
                component_size_report(decomp))
    files += ["node_classes.csv", "component_sizes.csv"]

    reduction = reduce_network(graph, values, decomp, threshold)
    coverage = coverage_report(values, reduction.values)
    write_edges_csv(reduction.graph, out / "reduced_edges.csv")
    write_values_csv(reduction.graph, reduction.values, out / "reduced_values.csv")
    files += ["reduced_edges.csv", "reduced_values.csv"]

    core_size = decomp.sizes.get("SCC", 0)
    if "influence" in measures and core_size > CORE_SIZE_WARNING:
        warnings.warn(
            f"influence index requested with a core of {core_size} nodes; "
            "path enumeration may be very slow (set a timeout)",
            RuntimeWarning,
            stacklevel=2,
        )

    cache = OperatorCache(reduction.graph, config)
    rgraph, rvalues = reduction.graph, reduction.values
    vectors = {}
    for name in measures:
        if name == "access":
            vec = access_centrality(rgraph, rvalues, cache=cache)
        elif name == "corrected":
            vec = corrected_centrality(rgraph, rvalues, cache=cache)
        elif name == "bowtie":
            vec = bowtie_centrality(rgraph, rvalues, cache=cache)
        else:
            vec = influence_index(rgraph, rvalues, timeout=influence_timeout,
                                  threads=config.threads)
        vectors[name] = vec
        fname = f"centrality_{name}.csv"
        _write_rows(out / fname, ("node", "score"),
                    ((rgraph.labels[i], _fmt(vec.values[i])) for i in range(rgraph.n)))
        files.append(fname)

    rankings = {name: rank_nodes(vec) for name, vec in vectors.items()}

    curve_rows = []
    pairs = list(combinations(measures, 2))
    curves = {}
    for a, b in pairs:
        curve = truncated_jaccard_curve(rankings[a], rankings[b])
        curves[(a, b)] = curve
        curve_rows.extend(
            (a, b, n + 1, _fmt(j)) for n, j in enumerate(curve)
        )
    _write_rows(out / "jaccard_curves.csv",
                ("measure_a", "measure_b", "n", "jaccard"), curve_rows)
    files.append("jaccard_curves.csv")

    table = ranked_value_table(
        [rankings[name] for name in measures],
        labels=rgraph.labels, top=top,
    )
    _write_rows(out / "ranked_values.csv", ("measure", "rank", "node", "score"),
                ((m.lower(), r, node, _fmt(s)) for m, r, node, s in table))
    files.append("ranked_values.csv")

    figure_files = []
    if figures:
        figure_files = _render_figures(out, curves, measures, rankings)
        files += figure_files

    manifest = {
        "schema": 1,
        "version": __version__,
        "input": {"nodes": graph.n, "edges": graph.n_edges},
        "validation": {
            "ok": report.ok,
            "spectral_radius_estimate": report.spectral_radius_estimate,
        },
        "decomposition": {k: int(v) for k, v in decomp.sizes.items()},
        "reduction": {
            "threshold": threshold,
            "kept_nodes": int(len(reduction.kept)),
            "kept_edges": reduction.graph.n_edges,
            "total_value": coverage.total_value,
            "retained_value": coverage.retained_value,
            "value_fraction": coverage.fraction,
        },
        "measures": {
            name: {
                "file": f"centrality_{name}.csv",
                "positive_support": int(np.sum(vec.values > 0)),
                "max": float(vec.values.max(initial=0.0)),
            }
            for name, vec in vectors.items()
        },
        "figures": figure_files,
        "files": sorted(files),
    }
    with open(out / "report.json", "w", encoding="utf-8") as f:
        json.dump(manifest, f, indent=2, sort_keys=True)
        f.write("\n")
    return manifest


def _render_figures(out: Path, curves, measures, rankings) -> list[str]:
    """Overlap curves and ranked score profiles as PNG files."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    made = []
    if curves:
        fig, ax = plt.subplots(figsize=(7.0, 4.5))
        for (a, b), curve in curves.items():
            ax.semilogx(np.arange(1, len(curve) + 1), curve, label=f"{a} vs {b}")
        ax.set_xlabel("ranking depth n")
        ax.set_ylabel("top-n overlap (jaccard)")
        ax.set_ylim(-0.02, 1.05)
        ax.grid(alpha=0.3)
        ax.legend(fontsize=8)
        fig.tight_layout()
        fig.savefig(out / "jaccard_curves.png", dpi=150,
                    metadata={"Software": None})
        plt.close(fig)
        made.append("jaccard_curves.png")

    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    drew = False
    for name in measures:
        scores = rankings[name].scores
        positive = scores[scores > 0]
        if len(positive):
            ax.semilogy(np.arange(1, len(positive) + 1), positive, label=name)
            drew = True
    if drew:
        ax.set_xlabel("rank")
        ax.set_ylabel("score")
        ax.grid(alpha=0.3)
        ax.legend(fontsize=8)
        fig.tight_layout()
        fig.savefig(out / "ranked_values.png", dpi=150,
                    metadata={"Software": None})
        made.append("ranked_values.png")
    plt.close(fig)
    return made
