"""Shared fixtures and independent oracles.

The oracles here deliberately avoid the package's own machinery: dense
numpy inverses instead of sparse solves, and a recursive set-based path
enumeration instead of the iterative stack walker.  Agreement between the
two routes is what the tests certify.
"""

import numpy as np
import pytest

from bowtie_centrality import NodeValues, WeightedDigraph, demo_network

# -- dense linear-algebra oracles ------------------------------------------------


def dense_matrix(graph: WeightedDigraph) -> np.ndarray:
    return graph.csr.toarray()


def oracle_resolvent(w: np.ndarray) -> np.ndarray:
    n = w.shape[0]
    return np.linalg.inv(np.eye(n) - w)


def oracle_access(w: np.ndarray, v: np.ndarray) -> np.ndarray:
    n = w.shape[0]
    return np.linalg.solve(np.eye(n) - w, w @ v)


def oracle_correction(w: np.ndarray) -> np.ndarray:
    return 1.0 / np.diag(oracle_resolvent(w))


def oracle_corrected(w: np.ndarray, v: np.ndarray) -> np.ndarray:
    return oracle_correction(w) * oracle_access(w, v)


def oracle_bowtie(w: np.ndarray, v: np.ndarray) -> np.ndarray:
    n = w.shape[0]
    resolved = np.linalg.solve(np.eye(n) - w, v)
    return w @ (oracle_correction(w) * resolved)


def oracle_influence(w: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Recursive node-simple path sum; independent of the package walker."""
    n = w.shape[0]

    def explore(u: int, visited: frozenset, acc: float) -> float:
        total = 0.0
        for t in range(n):
            wt = w[u, t]
            if wt != 0.0 and t not in visited:
                total += acc * wt * v[t]
                total += explore(t, visited | {t}, acc * wt)
        return total

    return np.array([explore(s, frozenset([s]), 1.0) for s in range(n)])


def oracle_simple_path_count(w: np.ndarray, start: int, max_edges=None) -> int:
    n = w.shape[0]
    cap = n if max_edges is None else max_edges

    def count(u: int, visited: frozenset, depth: int) -> int:
        if depth >= cap:
            return 0
        c = 0
        for t in range(n):
            if w[u, t] != 0.0 and t not in visited:
                c += 1 + count(t, visited | {t}, depth + 1)
        return c

    return count(start, frozenset([start]), 0)


# -- random instance builders -----------------------------------------------------


def random_valid_dense(rng: np.random.Generator, n_max: int = 10,
                       p: float | None = None,
                       self_loops: bool = True) -> np.ndarray:
    """Dense weight matrix that passes validation by construction.

    Every column sum ends up at most ~0.97, which bounds the spectral
    radius below one and satisfies the per-component strictness check.
    """
    n = int(rng.integers(2, n_max + 1))
    prob = p if p is not None else min(0.5, 2.0 / n)
    mask = rng.random((n, n)) < prob
    np.fill_diagonal(mask, (rng.random(n) < prob / 4) if self_loops else False)
    w = np.where(mask, rng.uniform(0.05, 1.0, (n, n)), 0.0)
    col = w.sum(axis=0)
    for j in range(n):
        if col[j] > 0.97:
            w[:, j] *= rng.uniform(0.3, 0.95) / col[j]
    return w


def random_dag_dense(rng: np.random.Generator, n_max: int = 10,
                     p: float | None = None) -> np.ndarray:
    """Upper-triangular (hence acyclic) weight matrix, then shuffled."""
    n = int(rng.integers(2, n_max + 1))
    prob = p if p is not None else min(0.6, 2.5 / n)
    w = np.where(np.triu(rng.random((n, n)) < prob, k=1),
                 rng.uniform(0.05, 1.0, (n, n)), 0.0)
    col = w.sum(axis=0)
    for j in range(n):
        if col[j] > 0.97:
            w[:, j] *= rng.uniform(0.3, 0.95) / col[j]
    perm = rng.permutation(n)
    return w[np.ix_(perm, perm)]


def graph_from_dense(w: np.ndarray) -> WeightedDigraph:
    n = w.shape[0]
    rows, cols = np.nonzero(w)
    return WeightedDigraph.from_edges([str(i) for i in range(n)],
                                      rows, cols, w[rows, cols])


def random_values(rng: np.random.Generator, n: int) -> np.ndarray:
    return rng.uniform(0.0, 2.0, n)


# -- fixtures ----------------------------------------------------------------------


@pytest.fixture
def demo():
    return demo_network()


@pytest.fixture
def demo_graph():
    return demo_network()[0]


@pytest.fixture
def demo_values():
    return demo_network()[1]


@pytest.fixture
def unit_values():
    def make(graph):
        return NodeValues.uniform(graph.n)

    return make
