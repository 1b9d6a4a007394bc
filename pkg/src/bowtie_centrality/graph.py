"""Sparse directed weighted graph, CSV ingestion, and validation.

The graph stores an n x n weight matrix W in both CSR (out-edges) and CSC
(in-edges) form.  An edge ``i -> j`` with weight ``W[i, j]`` means "i holds
the fraction W[i, j] of j"; value conceptually flows from j to i, so all
row-times-vector products ``W @ v`` aggregate over out-neighbors.  Weights
live in (0, 1] and, for every node j, the in-weights sum to at most 1.
"""

from __future__ import annotations

import csv
import io
import logging
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .errors import GraphInputError, ValidationError

logger = logging.getLogger(__name__)

#: Tolerance used for all column-sum and ownership-fraction comparisons.
#: Absorbs float ingestion noise without masking real violations.
EPS_STOCHASTIC = 1e-9

EDGE_COLUMNS = ("source", "target", "weight")
VALUE_COLUMNS = ("node", "value")

SCHEMA_HEADER = "# bowtie-centrality v{version} schema=1"


def _freeze(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


class WeightedDigraph:
    """Immutable sparse directed graph with weights in (0, 1].

    Nodes are dense integer indices ``0..n-1``; the opaque input labels are
    preserved in :attr:`labels` and round-trip through export unchanged.
    Safe to share across threads after construction.
    """

    __slots__ = ("n", "labels", "csr", "csc", "_index")

    def __init__(self, labels, csr):
        self.labels: tuple[str, ...] = tuple(str(x) for x in labels)
        self.n: int = len(self.labels)
        for lab in self.labels:
            # leading '#' would read back as a comment; padding would not
            # survive the whitespace-stripping CSV reader
            if not lab or lab != lab.strip() or lab.startswith("#"):
                raise GraphInputError(
                    f"node label {lab!r} is empty, padded, or starts with '#'"
                )
        if csr.shape != (self.n, self.n):
            raise ValueError(f"matrix shape {csr.shape} does not match {self.n} labels")
        csr = sp.csr_array(csr)
        csr.sum_duplicates()
        csr.eliminate_zeros()
        csr.sort_indices()
        self.csr = csr
        self.csc = sp.csc_array(csr)
        self.csc.sort_indices()
        for m in (self.csr, self.csc):
            _freeze(m.data)
            _freeze(m.indices)
            _freeze(m.indptr)
        self._index = {lab: i for i, lab in enumerate(self.labels)}
        if len(self._index) != self.n:
            raise GraphInputError("duplicate node labels in input")

    @classmethod
    def from_edges(cls, labels, sources, targets, weights) -> "WeightedDigraph":
        """Build from parallel index arrays; duplicate (i, j) pairs are summed."""
        n = len(labels)
        coo = sp.coo_array(
            (np.asarray(weights, dtype=float), (np.asarray(sources), np.asarray(targets))),
            shape=(n, n),
        )
        return cls(labels, coo.tocsr())

    # -- basic accessors ----------------------------------------------------

    def index_of(self, label: str) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise GraphInputError(f"unknown node label {label!r}") from None

    def label_of(self, i: int) -> str:
        return self.labels[i]

    @property
    def n_edges(self) -> int:
        return int(self.csr.nnz)

    def neighbors_out(self, i) -> list[tuple[int, float]]:
        """Out-edge slice of node i as (target, weight), ascending target."""
        self._check_node(i)
        lo, hi = self.csr.indptr[i], self.csr.indptr[i + 1]
        return [(int(j), float(w)) for j, w in zip(self.csr.indices[lo:hi], self.csr.data[lo:hi])]

    def neighbors_in(self, j) -> list[tuple[int, float]]:
        """In-edge slice of node j as (source, weight), ascending source."""
        self._check_node(j)
        lo, hi = self.csc.indptr[j], self.csc.indptr[j + 1]
        return [(int(i), float(w)) for i, w in zip(self.csc.indices[lo:hi], self.csc.data[lo:hi])]

    def _check_node(self, i) -> None:
        if not 0 <= i < self.n:
            raise IndexError(f"node index {i} out of range for {self.n} nodes")

    def edges(self):
        """Yield (source, target, weight) in ascending (source, target) order."""
        indptr, indices, data = self.csr.indptr, self.csr.indices, self.csr.data
        for i in range(self.n):
            for k in range(indptr[i], indptr[i + 1]):
                yield i, int(indices[k]), float(data[k])

    def column_sums(self) -> np.ndarray:
        """Total in-weight per node (ownership fraction accounted for)."""
        return np.asarray(self.csc.sum(axis=0)).ravel() if self.n else np.zeros(0)

    def self_loop_weights(self) -> np.ndarray:
        return self.csr.diagonal() if self.n else np.zeros(0)

    def subgraph(self, nodes) -> "WeightedDigraph":
        """Induced subgraph on `nodes` (ascending old index order expected)."""
        nodes = np.asarray(nodes, dtype=int)
        sub = self.csr[nodes][:, nodes]
        return WeightedDigraph([self.labels[i] for i in nodes], sub.tocsr())

    def __repr__(self):
        return f"WeightedDigraph(n={self.n}, edges={self.n_edges})"


@dataclass(frozen=True)
class NodeValues:
    """Intrinsic non-topological node values (one nonnegative real per node)."""

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 1:
            raise GraphInputError("node values must be a 1-D vector")
        if np.any(v < 0) or not np.all(np.isfinite(v)):
            raise GraphInputError("node values must be finite and nonnegative")
        object.__setattr__(self, "values", _freeze(v))

    @classmethod
    def uniform(cls, n: int, value: float = 1.0) -> "NodeValues":
        return cls(np.full(n, float(value)))

    def __len__(self):
        return len(self.values)

    def check_length(self, graph: WeightedDigraph) -> None:
        if len(self.values) != graph.n:
            raise GraphInputError(
                f"value vector has length {len(self.values)}, graph has {graph.n} nodes"
            )


# -- validation ---------------------------------------------------------------


@dataclass(frozen=True)
class PerronCheck:
    """Result of the per-component invertibility condition.

    ``satisfied`` is true iff some member node has an in-component weight
    sum strictly below ``1 - EPS_STOCHASTIC``; that node is the witness.
    """

    scc_id: int
    size: int
    satisfied: bool
    witness: int | None


@dataclass(frozen=True)
class ValidationReport:
    """Preconditions on (W, v) required by the analytical measures.

    A passing report guarantees the spectral radius of W is below one, so
    (I - W) is invertible and every resolvent-based measure is finite.
    """

    n: int
    column_sum_violations: list[tuple[int, float]]
    weight_range_violations: list[tuple[int, int, float]]
    perron_condition: list[PerronCheck]
    spectral_radius_estimate: float
    spectral_radius_converged: bool
    self_loops: list[int] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return (
            not self.column_sum_violations
            and not self.weight_range_violations
            and all(p.satisfied for p in self.perron_condition)
        )

    def summary(self, labels=None) -> str:
        name = (lambda i: labels[i]) if labels is not None else str
        lines = [f"nodes: {self.n}"]
        lines.append(
            "spectral radius estimate: "
            f"{self.spectral_radius_estimate:.6g}"
            + ("" if self.spectral_radius_converged else " (not converged)")
        )
        if self.self_loops:
            lines.append(f"self-loops on: {', '.join(name(i) for i in self.self_loops)}")
        for node, excess in self.column_sum_violations:
            lines.append(f"column sum violation: node {name(node)} exceeds 1 by {excess:.3g}")
        for i, j, w in self.weight_range_violations:
            lines.append(f"weight out of (0, 1]: {name(i)} -> {name(j)} = {w!r}")
        for p in self.perron_condition:
            if not p.satisfied:
                lines.append(
                    f"invertibility condition failed: component {p.scc_id} "
                    f"(size {p.size}) has no node with in-component weight sum < 1"
                )
        lines.append("status: " + ("ok" if self.ok else "FAILED"))
        return "\n".join(lines)


def _range_violations(graph: WeightedDigraph) -> list[tuple[int, int, float]]:
    """Edges whose post-summation weight leaves (0, 1]."""
    coo = graph.csr.tocoo()
    bad = np.flatnonzero((coo.data <= 0.0) | (coo.data > 1.0 + EPS_STOCHASTIC))
    return [(int(coo.row[k]), int(coo.col[k]), float(coo.data[k])) for k in bad]


def spectral_radius(matrix, tol: float = 1e-6, max_iter: int = 5000) -> tuple[float, bool]:
    """Power-iteration estimate of the spectral radius of a nonnegative matrix.

    Iterates on (M + I), whose dominant modulus is unique for nonnegative M,
    so periodic structures (pure cycles) converge too; the shift is
    subtracted from the estimate.  Returns (estimate, converged).  Matrices
    that collapse an iterate to zero (nilpotent) report an exact 0.
    """
    n = matrix.shape[0]
    if n == 0 or matrix.nnz == 0:
        return 0.0, True
    x = np.full(n, 1.0 / n)
    for _ in range(min(n + 1, 64)):
        y = matrix @ x
        s = float(y.sum())  # 1-norm of a nonnegative iterate
        if s == 0.0:
            return 0.0, True
        x = y / s
    lam = 0.0
    for _ in range(max_iter):
        y = matrix @ x + x
        s = float(y.sum())
        if s == 0.0:
            return 0.0, True
        x = y / s
        if abs(s - 1.0 - lam) <= tol * max(abs(s - 1.0), 1e-300):
            return max(s - 1.0, 0.0), True
        lam = s - 1.0
    return max(lam, 0.0), False


def validate(graph: WeightedDigraph) -> ValidationReport:
    """Check the preconditions that make (I - W) safely invertible.

    Never raises: violations are carried in the report, and resolvent-based
    operations refuse graphs whose report fails.
    """
    from .bowtie import strongly_connected_components  # deferred; bowtie imports graph

    col = graph.column_sums()
    col_viol = [(int(j), float(col[j] - 1.0)) for j in np.nonzero(col > 1.0 + EPS_STOCHASTIC)[0]]
    range_viol = _range_violations(graph)
    loops = [int(i) for i in np.nonzero(graph.self_loop_weights())[0]]

    partition = strongly_connected_components(graph)
    # in-weight per node counting only edges from the node's own component
    comp = partition.component_of
    coo = graph.csr.tocoo()
    within = comp[coo.row] == comp[coo.col]
    in_comp_sum = np.bincount(
        coo.col[within], weights=coo.data[within], minlength=graph.n
    ) if graph.n else np.zeros(0)
    checks = []
    for scc_id, members in enumerate(partition.members):
        below = members[in_comp_sum[members] < 1.0 - EPS_STOCHASTIC]
        witness = int(below[0]) if len(below) else None
        checks.append(PerronCheck(scc_id, len(members), witness is not None, witness))

    lam, converged = spectral_radius(graph.csr)
    return ValidationReport(
        n=graph.n,
        column_sum_violations=col_viol,
        weight_range_violations=range_viol,
        perron_condition=checks,
        spectral_radius_estimate=lam,
        spectral_radius_converged=converged,
        self_loops=loops,
    )


def ensure_valid(graph: WeightedDigraph, report: ValidationReport | None = None,
                 allow_invalid: bool = False) -> ValidationReport:
    """Validate (or reuse a report) and raise unless the graph passes.

    With ``allow_invalid`` the failure is downgraded to a logged warning so
    incomplete-data scenarios can still be explored; solves may then diverge.
    """
    if report is None:
        report = validate(graph)
    if not report.ok:
        if not allow_invalid:
            raise ValidationError(
                "graph failed validation; rerun with allow_invalid to force\n"
                + report.summary(graph.labels),
                report=report,
            )
        logger.warning("proceeding on a graph that failed validation")
    return report


# -- ingestion ----------------------------------------------------------------


def load_edge_list(edge_rows, value_rows=(), *, allow_invalid: bool = False):
    """Build (WeightedDigraph, NodeValues) from parsed rows.

    ``edge_rows`` holds (source_label, target_label, weight) and
    ``value_rows`` holds (node_label, value); weights/values may still be
    strings.  Node ids are assigned densely in first-appearance order (edge
    rows first).  Duplicate edges are summed; zero-weight edges are dropped;
    nodes seen only in one stream are kept (with no edges / value 0).
    """
    labels: list[str] = []
    index: dict[str, int] = {}

    def node_id(label: str) -> int:
        label = str(label)
        if not label:
            raise GraphInputError("empty node label")
        if label not in index:
            index[label] = len(labels)
            labels.append(label)
        return index[label]

    sources, targets, weights = [], [], []
    for row_no, (src, dst, w) in enumerate(edge_rows, start=1):
        try:
            w = float(w)
        except (TypeError, ValueError):
            raise GraphInputError(f"weight {w!r} is not a number", line=row_no) from None
        if not np.isfinite(w):
            raise GraphInputError(f"weight {w!r} is not finite", line=row_no)
        sources.append(node_id(src))
        targets.append(node_id(dst))
        weights.append(w)

    values_by_label: dict[str, float] = {}
    for row_no, (label, value) in enumerate(value_rows, start=1):
        try:
            value = float(value)
        except (TypeError, ValueError):
            raise GraphInputError(f"value {value!r} is not a number", line=row_no) from None
        if not np.isfinite(value) or value < 0:
            raise GraphInputError(
                f"node {label!r} has negative or non-finite value {value!r}", line=row_no
            )
        values_by_label[str(label)] = values_by_label.get(str(label), 0.0) + value
        node_id(label)

    graph = WeightedDigraph.from_edges(labels, sources, targets, weights)

    offenders = _range_violations(graph)
    if offenders:
        listing = "; ".join(f"{labels[i]} -> {labels[j]}: {w!r}" for i, j, w in offenders)
        if allow_invalid:
            logger.warning("weights outside [0, 1] after summation: %s", listing)
        else:
            raise GraphInputError(f"weights outside [0, 1] after summation: {listing}")

    vec = np.zeros(graph.n)
    for label, value in values_by_label.items():
        vec[index[label]] = value
    return graph, NodeValues(vec)


def _read_rows(source, columns, kind):
    """Parse a CSV stream: required header, '#' comment lines ignored."""

    def rows_from(f):
        out = []
        header_seen = False
        for line_no, row in enumerate(csv.reader(f), start=1):
            if not row or (row[0].lstrip().startswith("#")):
                continue
            row = [cell.strip() for cell in row]
            if not any(row):
                continue
            if not header_seen:
                if tuple(c.lower() for c in row) != columns:
                    raise GraphInputError(
                        f"expected header {','.join(columns)!r} in {kind} file, got {','.join(row)!r}",
                        line=line_no,
                    )
                header_seen = True
                continue
            if len(row) != len(columns):
                raise GraphInputError(
                    f"expected {len(columns)} fields, got {len(row)}", line=line_no
                )
            out.append((line_no, tuple(row)))
        if not header_seen:
            raise GraphInputError(f"missing header row {','.join(columns)!r} in {kind} file")
        return out

    if hasattr(source, "read"):
        return rows_from(source)
    with open(source, "r", encoding="utf-8", newline="") as f:
        return rows_from(f)


def load_csv(edges, values=None, *, allow_invalid: bool = False):
    """Load a graph (and optional node values) from CSV files or file objects.

    Edge schema is ``source,target,weight``; value schema is ``node,value``.
    Malformed rows raise :class:`GraphInputError` carrying the line number.
    """
    edge_rows = _read_rows(edges, EDGE_COLUMNS, "edge")
    parsed_edges = []
    for line_no, (src, dst, w) in edge_rows:
        try:
            parsed_edges.append((src, dst, float(w)))
        except ValueError:
            raise GraphInputError(f"weight {w!r} is not a number", line=line_no) from None

    parsed_values = []
    if values is not None:
        for line_no, (label, val) in _read_rows(values, VALUE_COLUMNS, "value"):
            try:
                v = float(val)
            except ValueError:
                raise GraphInputError(f"value {val!r} is not a number", line=line_no) from None
            if v < 0:
                raise GraphInputError(f"node {label!r} has negative value {val!r}", line=line_no)
            parsed_values.append((label, v))

    return load_edge_list(parsed_edges, parsed_values, allow_invalid=allow_invalid)


def _open_out(path_or_file):
    if hasattr(path_or_file, "write"):
        return path_or_file, False
    return open(path_or_file, "w", encoding="utf-8", newline=""), True


def _schema_line() -> str:
    from . import __version__

    return SCHEMA_HEADER.format(version=__version__)


def write_edges_csv(graph: WeightedDigraph, path_or_file) -> None:
    """Export edges in the ingestion schema (round-trips exactly)."""
    f, close = _open_out(path_or_file)
    try:
        f.write(_schema_line() + "\n")
        w = csv.writer(f, lineterminator="\n")
        w.writerow(EDGE_COLUMNS)
        for i, j, weight in graph.edges():
            w.writerow([graph.labels[i], graph.labels[j], repr(weight)])
    finally:
        if close:
            f.close()


def write_values_csv(graph: WeightedDigraph, values: NodeValues, path_or_file) -> None:
    values.check_length(graph)
    f, close = _open_out(path_or_file)
    try:
        f.write(_schema_line() + "\n")
        w = csv.writer(f, lineterminator="\n")
        w.writerow(VALUE_COLUMNS)
        for i, label in enumerate(graph.labels):
            w.writerow([label, repr(float(values.values[i]))])
    finally:
        if close:
            f.close()


def edges_csv_text(graph: WeightedDigraph) -> str:
    buf = io.StringIO()
    write_edges_csv(graph, buf)
    return buf.getvalue()
