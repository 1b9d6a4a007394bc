"""Value-flow centrality measures built on sparse resolvent solves.

All analytical measures are linear operators applied to the node values v,
derived from the resolvent V = inv(I - W) (the walk-sum I + W + W^2 + ...):

* access centrality       chi     = V W v        (all downstream value, cycles
                                                   counted every pass)
* corrected centrality    chi_hat = D V W v      componentwise D[k] * chi[k]
* bow-tie centrality      zeta    = W D V v      the correction applied on the
                                                   other side of the product
* direct portfolio        p_dir   = W v
* total portfolio         p_tot   = sum_{m>=1} W^m v  (truncated series; the
                                                   independent oracle for chi)

where D is the diagonal correction D[k] = 1 / V[k, k] that cancels the value
multiplication a cycle through k would otherwise cause.  Classical baselines
(eigenvector, attenuated/exogenous variants, and the Hubbell and two-parameter
forms) are included for ranking comparisons.
"""

from __future__ import annotations

import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .bowtie import SccPartition, strongly_connected_components
from .errors import SolverError
from .graph import NodeValues, WeightedDigraph, ensure_valid, spectral_radius

MEASURE_ACCESS = "ACCESS"
MEASURE_CORRECTED = "CORRECTED"
MEASURE_BOWTIE = "BOWTIE"
MEASURE_INFLUENCE = "INFLUENCE"
MEASURE_EIGENVECTOR = "EIGENVECTOR"
MEASURE_ALPHA = "ALPHA"
MEASURE_HUBBELL = "HUBBELL"
MEASURE_BONACICH = "BONACICH_AB"
MEASURE_PORTFOLIO_DIR = "PORTFOLIO_DIR"
MEASURE_PORTFOLIO_TOT = "PORTFOLIO_TOT"


@dataclass(frozen=True)
class CentralityVector:
    """One measure evaluated over all nodes, in the units of v."""

    measure: str
    values: np.ndarray
    params: dict | None = None

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        v.setflags(write=False)
        object.__setattr__(self, "values", v)


@dataclass(frozen=True)
class SolverConfig:
    """Linear-solve policy shared by all resolvent-based measures.

    ``method`` "auto" picks a sparse LU factorization up to
    ``direct_threshold`` nodes and the stationary iteration
    x <- W x + b (convergent because the spectral radius of W is below 1)
    beyond it; both meet the same relative-residual contract.
    """

    method: str = "auto"  # "auto" | "direct" | "iterative"
    tolerance: float = 1e-10
    max_iterations: int | None = None  # None -> 10 * n
    series_max_terms: int = 10_000
    series_tol: float = 1e-14
    direct_threshold: int = 10_000
    allow_invalid: bool = False
    threads: int = 1

    def __post_init__(self):
        if self.tolerance <= 0:
            raise ValueError("tolerance must be positive")
        if self.method not in ("auto", "direct", "iterative"):
            raise ValueError(f"unknown solver method {self.method!r}")

    def with_(self, **kw) -> "SolverConfig":
        return replace(self, **kw)


def as_value_vector(v, graph: WeightedDigraph) -> np.ndarray:
    if isinstance(v, NodeValues):
        v.check_length(graph)
        return v.values
    v = np.asarray(v, dtype=float)
    if v.shape != (graph.n,):
        raise ValueError(f"value vector has shape {v.shape}, expected ({graph.n},)")
    return v


# -- linear solves ------------------------------------------------------------


def _factorize(m_csr):
    """LU of (I - M) for a sparse M with spectral radius below one."""
    n = m_csr.shape[0]
    a = (sp.eye_array(n, format="csc") - m_csr.tocsc()).tocsc()
    try:
        return spla.splu(a)
    except RuntimeError as err:
        raise SolverError(f"matrix I - M is numerically singular: {err}") from None


def _solve_i_minus(m_csr, rhs: np.ndarray, config: SolverConfig, lu=None) -> np.ndarray:
    """Solve (I - M) x = rhs to the configured relative residual."""
    n = m_csr.shape[0]
    rhs = np.asarray(rhs, dtype=float)
    if n == 0:
        return np.zeros(0)
    bnorm = float(np.linalg.norm(rhs))
    if bnorm == 0.0:
        return np.zeros(n)

    method = config.method
    if method == "auto":
        method = "direct" if n <= config.direct_threshold else "iterative"

    if method == "direct":
        if lu is None:
            lu = _factorize(m_csr)
        x = lu.solve(rhs)
        residual = float(np.linalg.norm(rhs - x + m_csr @ x))
        if not np.isfinite(residual) or residual > config.tolerance * bnorm:
            raise SolverError(
                f"direct solve residual {residual:.3e} exceeds "
                f"{config.tolerance:.1e} * |rhs|",
                residual=residual,
            )
        return x

    max_iter = config.max_iterations if config.max_iterations is not None else 10 * n
    x = rhs.copy()
    residual = np.inf
    for _ in range(max_iter):
        mx = m_csr @ x
        r = rhs - x + mx
        residual = float(np.linalg.norm(r))
        if residual <= config.tolerance * bnorm:
            return x
        x = mx + rhs  # x + r: one matrix-vector product per sweep
    raise SolverError(
        f"stationary iteration did not reach residual {config.tolerance:.1e} * |rhs| "
        f"within {max_iter} iterations (last residual {residual:.3e})",
        residual=residual,
    )


class OperatorCache:
    """Derived operators for one (graph, config) pair, computed lazily.

    Shares the validation report, the component partition, the diagonal
    correction, and the LU factorization across repeated measure calls.
    Reads are safe from multiple threads; lazy inserts are serialized.
    """

    def __init__(self, graph: WeightedDigraph, config: SolverConfig | None = None):
        self.graph = graph
        self.config = config or SolverConfig()
        self._lock = threading.Lock()
        self._report = None
        self._partition = None
        self._correction = None  # (diag, computed-mask)
        self._lu = None

    @property
    def report(self):
        with self._lock:
            if self._report is None:
                from .graph import validate

                self._report = validate(self.graph)
            return self._report

    @property
    def partition(self) -> SccPartition:
        with self._lock:
            if self._partition is None:
                self._partition = strongly_connected_components(self.graph)
            return self._partition

    def ensure_valid(self):
        return ensure_valid(self.graph, self.report, self.config.allow_invalid)

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        """Resolvent solve (I - W) x = rhs reusing the cached factorization."""
        n = self.graph.n
        method = self.config.method
        use_direct = method == "direct" or (
            method == "auto" and n <= self.config.direct_threshold
        )
        lu = None
        if use_direct and n > 0:
            with self._lock:
                if self._lu is None:
                    self._lu = _factorize(self.graph.csr)
                lu = self._lu
        return _solve_i_minus(self.graph.csr, rhs, self.config, lu=lu)

    def correction(self) -> tuple[np.ndarray, np.ndarray]:
        """(D, computed) where computed marks entries obtained by solves."""
        with self._lock:
            if self._correction is None:
                self._correction = _correction_diagonal(
                    self.graph, self.partition_nolock(), self.config
                )
            return self._correction

    def partition_nolock(self) -> SccPartition:
        if self._partition is None:
            self._partition = strongly_connected_components(self.graph)
        return self._partition


def solve_resolvent(graph: WeightedDigraph, rhs, config: SolverConfig | None = None,
                    cache: OperatorCache | None = None) -> np.ndarray:
    """Solve (I - W) x = rhs for a validated graph.

    Refuses graphs whose validation report fails (the report guarantees the
    spectral radius of W is below one, hence a unique finite solution),
    unless the config carries ``allow_invalid``.
    """
    config = config or (cache.config if cache else SolverConfig())
    rhs = np.asarray(rhs, dtype=float)
    if rhs.shape != (graph.n,):
        raise ValueError(f"rhs has shape {rhs.shape}, expected ({graph.n},)")
    if cache is not None:
        cache.ensure_valid()
        return cache.solve(rhs)
    ensure_valid(graph, allow_invalid=config.allow_invalid)
    return _solve_i_minus(graph.csr, rhs, config)


# -- diagonal correction --------------------------------------------------------


def _scc_diagonal_entries(graph: WeightedDigraph, members: np.ndarray,
                          loops: np.ndarray) -> np.ndarray:
    """V[k, k] for the member nodes of one nontrivial component.

    Closed walks through k never leave k's component, so the diagonal of the
    full resolvent equals the diagonal of the component-restricted resolvent;
    solving the small system per component is the decisive optimization for
    bow-tie graphs, whose cores are tiny next to n.
    """
    size = len(members)
    if size == 1:
        w = float(loops[members[0]])
        if w >= 1.0:
            raise SolverError(f"self-loop weight {w!r} makes the resolvent singular")
        return np.array([1.0 / (1.0 - w)])

    sub = graph.csr[members][:, members].tocsc()
    a = (sp.eye_array(size, format="csc") - sub).tocsc()
    try:
        lu = spla.splu(a)
    except RuntimeError as err:
        raise SolverError(
            f"component of size {size} yields a singular system: {err}"
        ) from None
    diag = np.empty(size)
    chunk = 1024
    for lo in range(0, size, chunk):
        hi = min(lo + chunk, size)
        block = np.zeros((size, hi - lo))
        block[np.arange(lo, hi), np.arange(hi - lo)] = 1.0
        sol = lu.solve(block)
        diag[lo:hi] = sol[np.arange(lo, hi), np.arange(hi - lo)]
    return diag


def _correction_diagonal(graph, partition, config):
    n = graph.n
    diag = np.ones(n)
    computed = np.zeros(n, dtype=bool)
    jobs = [partition.members[c] for c in partition.nontrivial()]
    loops = graph.self_loop_weights() if jobs else None

    def run(members):
        vkk = _scc_diagonal_entries(graph, members, loops)
        if np.any(vkk < 1.0 - 1e-9) or not np.all(np.isfinite(vkk)):
            raise SolverError("resolvent diagonal fell below 1; graph is not valid")
        diag[members] = 1.0 / vkk
        computed[members] = True

    if config.threads > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=config.threads) as pool:
            list(pool.map(run, jobs))
    else:
        for members in jobs:
            run(members)
    return diag, computed


def correction_diagonal(graph: WeightedDigraph, partition: SccPartition | None = None,
                        config: SolverConfig | None = None,
                        cache: OperatorCache | None = None) -> np.ndarray:
    """Diagonal correction D with D[k] = 1 / V[k, k], V = inv(I - W).

    Entries are solved only for nodes that lie on a cycle (nontrivial
    components, self-loops included); every other node has V[k, k] = 1
    exactly and keeps D[k] = 1 without a solve.
    """
    if cache is not None:
        cache.ensure_valid()
        return cache.correction()[0]
    config = config or SolverConfig()
    ensure_valid(graph, allow_invalid=config.allow_invalid)
    if partition is None:
        partition = strongly_connected_components(graph)
    return _correction_diagonal(graph, partition, config)[0]


# -- the measure family ---------------------------------------------------------


def _finish(tag: str, x: np.ndarray, params: dict | None = None) -> CentralityVector:
    if not np.all(np.isfinite(x)):
        raise SolverError(f"{tag} produced non-finite entries")
    return CentralityVector(tag, x, params)


def access_centrality(graph: WeightedDigraph, v, config: SolverConfig | None = None,
                      cache: OperatorCache | None = None) -> CentralityVector:
    """chi = V W v: the fixed point of chi = W chi + W v.

    chi[i] totals the value a node can reach downstream over all direct and
    indirect weighted links, counting cycle flow on every pass.
    """
    vv = as_value_vector(v, graph)
    x = solve_resolvent(graph, graph.csr @ vv, config, cache)
    return _finish(MEASURE_ACCESS, x)


def corrected_centrality(graph: WeightedDigraph, v, partition: SccPartition | None = None,
                         config: SolverConfig | None = None,
                         cache: OperatorCache | None = None) -> CentralityVector:
    """chi_hat[k] = D[k] * chi[k]: access centrality with cycle flow cancelled."""
    chi = access_centrality(graph, v, config, cache)
    d = correction_diagonal(graph, partition, config, cache)
    return _finish(MEASURE_CORRECTED, d * chi.values)


def bowtie_centrality(graph: WeightedDigraph, v, partition: SccPartition | None = None,
                      config: SolverConfig | None = None,
                      cache: OperatorCache | None = None,
                      formula: str = "resolvent") -> CentralityVector:
    """zeta = W D V v: the correction applied inside the walk sum.

    Because D and W do not commute, this differs from chi_hat = D W V v; it
    suppresses cycle overcounting without handing all value to root nodes.
    Two algebraically equal forms are exposed for cross-checking:

    * ``formula="resolvent"``: W applied to D * (V v) - one solve on v.
    * ``formula="product"``:   W applied to (chi_hat + D * v), using
      W (D W V + D) v, which routes through the corrected centrality.
    """
    vv = as_value_vector(v, graph)
    d = correction_diagonal(graph, partition, config, cache)
    if formula == "resolvent":
        x = solve_resolvent(graph, vv, config, cache)
        zeta = graph.csr @ (d * x)
    elif formula == "product":
        chi_hat = corrected_centrality(graph, v, partition, config, cache)
        zeta = graph.csr @ (chi_hat.values + d * vv)
    else:
        raise ValueError(f"unknown bow-tie formula {formula!r}")
    return _finish(MEASURE_BOWTIE, zeta, {"formula": formula})


def direct_portfolio(graph: WeightedDigraph, v) -> CentralityVector:
    """p_dir = W v: value held one hop away (no validation required)."""
    vv = as_value_vector(v, graph)
    return _finish(MEASURE_PORTFOLIO_DIR, graph.csr @ vv if graph.n else np.zeros(0))


def total_portfolio_series(graph: WeightedDigraph, v,
                           config: SolverConfig | None = None) -> CentralityVector:
    """Truncated series sum_{m>=1} W^m v; converges because lambda(W) < 1.

    This equals the access centrality, providing the independent series
    oracle for the resolvent path.  Terms are added until the infinity norm
    of a term drops below ``series_tol`` (scaled by max(1, |v|_inf)) or
    ``series_max_terms`` is hit, which raises.
    """
    config = config or SolverConfig()
    ensure_valid(graph, allow_invalid=config.allow_invalid)
    vv = as_value_vector(v, graph)
    if graph.n == 0:
        return _finish(MEASURE_PORTFOLIO_TOT, np.zeros(0))
    scale = max(1.0, float(np.max(np.abs(vv))) if len(vv) else 1.0)
    term = graph.csr @ vv
    total = term.copy()
    for _ in range(config.series_max_terms - 1):
        if float(np.max(np.abs(term), initial=0.0)) < config.series_tol * scale:
            return _finish(MEASURE_PORTFOLIO_TOT, total)
        term = graph.csr @ term
        total += term
    last = float(np.max(np.abs(term), initial=0.0))
    if last < config.series_tol * scale:
        return _finish(MEASURE_PORTFOLIO_TOT, total)
    raise SolverError(
        f"series did not converge within {config.series_max_terms} terms "
        f"(last term norm {last:.3e})",
        residual=last,
    )


# -- classical baselines ---------------------------------------------------------


def _adjacency(graph: WeightedDigraph, weighted: bool, undirected: bool = False,
               transpose: bool = False):
    """Adjacency operand for the baselines: binary by default, W on request."""
    a = graph.csr.copy()
    if undirected:
        a = (a + a.T).tocsr()
    if transpose:
        a = a.T.tocsr()
    if not weighted:
        a.data = np.ones_like(a.data)
    return a


#: Below this size the dominant eigenpair comes from a dense solve, which is
#: exact and immune to small spectral gaps; above it ARPACK takes over.
_DENSE_EIG_LIMIT = 500


def eigenvector_centrality(graph: WeightedDigraph, config: SolverConfig | None = None,
                           weighted: bool = False, undirected: bool = False,
                           tol: float = 1e-8) -> CentralityVector:
    """Dominant right eigenvector of the adjacency, normalized to unit 1-norm.

    For a nonnegative adjacency the dominant eigenvalue is real, so ties in
    modulus (periodic structures) are broken toward the largest real part.
    The sparse path shifts by the identity for the same reason: A + I has a
    unique dominant modulus whenever A is nonnegative.
    """
    if graph.n == 0:
        raise SolverError("eigenvector centrality is undefined on an empty graph")
    a = _adjacency(graph, weighted, undirected)
    if a.nnz == 0:
        raise SolverError("adjacency matrix is zero")
    n = graph.n
    config = config or SolverConfig()

    if n <= _DENSE_EIG_LIMIT:
        lams, vecs = np.linalg.eig(a.toarray())
        mod = np.abs(lams)
        near = np.flatnonzero(mod >= mod.max() * (1.0 - 1e-12))
        k = near[int(np.argmax(np.real(lams[near])))]
        lam = float(np.real(lams[k]))
        x = np.abs(np.real(vecs[:, k]))
    else:
        shifted = (a + sp.eye_array(n, format="csr")).tocsr()
        v0 = np.full(n, 1.0 / n)  # fixed start keeps results deterministic
        try:
            vals, vecs = spla.eigs(shifted, k=1, which="LM", v0=v0, tol=tol,
                                   maxiter=config.max_iterations)
        except spla.ArpackNoConvergence as err:
            raise SolverError(f"eigenpair iteration did not converge: {err}") from None
        lam = float(np.real(vals[0])) - 1.0
        x = np.abs(np.real(vecs[:, 0]))

    total = float(x.sum())
    if total == 0.0:
        raise SolverError("dominant eigenvector collapsed to zero")
    return _finish(MEASURE_EIGENVECTOR, x / total, {"eigenvalue": lam})


def _spectral_guard(matrix, what: str):
    lam, converged = spectral_radius(matrix)
    if lam >= 1.0 - 1e-9:
        raise SolverError(
            f"{what}: scaled spectral radius estimate {lam:.6g} >= 1, series diverges"
        )
    # an unconverged estimate far below 1 is still safely convergent; only
    # refuse when it sits close enough to the boundary to be in doubt
    if not converged and lam >= 0.9:
        raise SolverError(
            f"{what}: spectral radius estimate {lam:.6g} did not converge; "
            "cannot certify the series converges"
        )
    return lam


def alpha_centrality(graph: WeightedDigraph, alpha: float, e=None,
                     config: SolverConfig | None = None,
                     weighted: bool = False) -> CentralityVector:
    """c = inv(I - alpha A) e: eigenvector centrality with an exogenous source.

    With e = ones this is the classical attenuated walk-count index.
    Refuses when alpha * lambda(A) is not safely below one.
    """
    config = config or SolverConfig()
    a = _adjacency(graph, weighted)
    ee = np.ones(graph.n) if e is None else as_value_vector(e, graph)
    scaled = a * float(alpha)
    if alpha != 0.0:
        _spectral_guard(scaled, "alpha centrality")
    x = _solve_i_minus(scaled, ee, config)
    return _finish(MEASURE_ALPHA, x, {"alpha": float(alpha)})


def hubbell_centrality(graph: WeightedDigraph, v0, config: SolverConfig | None = None,
                       cache: OperatorCache | None = None) -> CentralityVector:
    """c = inv(I - W) c0: intrinsic importance c0 plus inherited importance."""
    x = solve_resolvent(graph, as_value_vector(v0, graph), config, cache)
    return _finish(MEASURE_HUBBELL, x)


def bonacich_centrality(graph: WeightedDigraph, alpha: float = 1.0, beta: float = 0.0,
                        e=None, config: SolverConfig | None = None,
                        weighted: bool = False,
                        transpose: bool = False) -> CentralityVector:
    """c = alpha inv(I - beta A) A e: the two-parameter power/dependence index.

    ``transpose`` swaps the edge orientation (A -> A.T) for the in-edge
    reading of the directed variant.  With alpha = beta = 1 on the weight
    matrix and e replaced by node values, this reduces to the access
    centrality.
    """
    config = config or SolverConfig()
    a = _adjacency(graph, weighted, transpose=transpose)
    ee = np.ones(graph.n) if e is None else as_value_vector(e, graph)
    scaled = a * float(beta)
    if beta != 0.0:
        _spectral_guard(scaled, "bonacich centrality")
    x = _solve_i_minus(scaled, a @ ee, config)
    return _finish(MEASURE_BONACICH, float(alpha) * x,
                   {"alpha": float(alpha), "beta": float(beta)})
