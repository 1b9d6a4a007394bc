"""Network reduction: keep the part that carries access value.

Nodes outside the weak component of the core, and tube/tendril nodes, never
contribute to the centrality of core or upstream nodes; output-side nodes
contribute only their own value, so dropping low-value ones changes results
by at most the dropped value.  The reduction keeps the input side, the core,
and the output nodes at or above a value threshold.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bowtie import CLASS_IN, CLASS_OUT, CLASS_SCC, BowTieDecomposition
from .errors import BowtieError
from .graph import NodeValues, WeightedDigraph


@dataclass(frozen=True)
class ReductionResult:
    """Induced subgraph plus the id bookkeeping to map results back."""

    graph: WeightedDigraph
    values: NodeValues
    kept: np.ndarray  # old node ids, ascending
    node_map: dict  # old id -> new id

    def __post_init__(self):
        kept = np.asarray(self.kept, dtype=int)
        kept.setflags(write=False)
        object.__setattr__(self, "kept", kept)


def reduce_network(graph: WeightedDigraph, values: NodeValues,
                   decomposition: BowTieDecomposition,
                   out_threshold: float = 0.0) -> ReductionResult:
    """Induced subgraph on IN, SCC, and OUT nodes with value >= threshold.

    Labels are preserved, so reduced results can be joined back by label as
    well as through ``node_map``.  An empty survivor set is refused rather
    than returned as a degenerate graph.
    """
    values.check_length(graph)
    classes = decomposition.classes
    keep = (classes == CLASS_IN) | (classes == CLASS_SCC)
    keep |= (classes == CLASS_OUT) & (values.values >= out_threshold)
    kept = np.flatnonzero(keep)
    if len(kept) == 0:
        raise BowtieError("reduction kept no nodes; lower the threshold")
    sub = graph.subgraph(kept)
    node_map = {int(old): new for new, old in enumerate(kept)}
    return ReductionResult(sub, NodeValues(values.values[kept]), kept, node_map)


@dataclass(frozen=True)
class CoverageReport:
    """How much intrinsic value the reduced network retains."""

    total_value: float
    retained_value: float
    fraction: float | None  # None when the full network carries no value

    def summary(self) -> str:
        if self.fraction is None:
            return "retained 0 of 0 total value (fraction undefined)"
        return (f"retained {self.retained_value!r} of {self.total_value!r} "
                f"total value ({100.0 * self.fraction:.2f}%)")


def coverage_report(full_values: NodeValues, reduced_values: NodeValues) -> CoverageReport:
    total = math.fsum(full_values.values.tolist())
    retained = math.fsum(reduced_values.values.tolist())
    fraction = retained / total if total > 0 else None
    return CoverageReport(total, retained, fraction)
