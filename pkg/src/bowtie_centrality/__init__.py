"""Bow-tie decomposition and value-flow centrality for directed networks.

Nodes hold intrinsic values and weighted directed edges express fractional
claims on other nodes; the package classifies nodes into bow-tie components,
computes the access / corrected / bow-tie / influence family of centrality
measures plus classical baselines, compares the resulting rankings, and
reduces networks to the subgraph that can carry value.
"""

__version__ = "0.1.0"

from .bowtie import (
    CLASS_IN,
    CLASS_OTHER,
    CLASS_OUT,
    CLASS_SCC,
    CLASS_TT,
    BowTieDecomposition,
    SccPartition,
    bowtie_decompose,
    component_size_report,
    condensation_edges,
    strongly_connected_components,
)
from .centrality import (
    CentralityVector,
    OperatorCache,
    SolverConfig,
    access_centrality,
    alpha_centrality,
    bonacich_centrality,
    bowtie_centrality,
    correction_diagonal,
    corrected_centrality,
    direct_portfolio,
    eigenvector_centrality,
    hubbell_centrality,
    solve_resolvent,
    total_portfolio_series,
)
from .compare import (
    Ranking,
    jaccard,
    rank_nodes,
    ranked_value_table,
    truncated_jaccard_curve,
)
from .errors import (
    BowtieError,
    GraphInputError,
    InfluenceTimeoutError,
    PathExplosionError,
    SolverError,
    ValidationError,
)
from .graph import (
    EPS_STOCHASTIC,
    NodeValues,
    ValidationReport,
    WeightedDigraph,
    ensure_valid,
    load_csv,
    load_edge_list,
    spectral_radius,
    validate,
    write_edges_csv,
    write_values_csv,
)
from .influence import TrailState, enumerate_simple_paths, influence_index
from .reduce import (
    CoverageReport,
    ReductionResult,
    coverage_report,
    reduce_network,
)
from .report import run_report
from .synth import BowTieSpec, demo_network, generate

__all__ = [name for name in dir() if not name.startswith("_")]
