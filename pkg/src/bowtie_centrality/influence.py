"""Influence index: value reached along node-simple paths.

Where the analytical measures price every walk (cycles included, then
corrected), the influence index counts each downstream node at most once per
path by forbidding node revisits outright.  That makes it exact by
construction but exponential in the worst case, so it is intended for the
reduced network with a small core.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .centrality import MEASURE_INFLUENCE, CentralityVector, as_value_vector
from .errors import InfluenceTimeoutError, PathExplosionError
from .graph import WeightedDigraph


class TrailState:
    """Mutable frontier of one depth-first traversal.

    ``current_path`` holds node ids from the start node to the tip;
    ``on_path`` mirrors membership for O(1) revisit checks; ``accumulated``
    holds weight products so ``accumulated[d]`` is the product over the first
    d edges (1.0 for the bare start).  Kept as an explicit object so tests
    can recompute the product from the path and compare.
    """

    __slots__ = ("current_path", "on_path", "accumulated")

    def __init__(self, n: int, start: int):
        self.current_path = [start]
        self.on_path = np.zeros(n, dtype=bool)
        self.on_path[start] = True
        self.accumulated = [1.0]

    @property
    def weight(self) -> float:
        return self.accumulated[-1]

    def depth(self) -> int:
        """Edges walked so far."""
        return len(self.current_path) - 1

    def push(self, node: int, edge_weight: float):
        self.current_path.append(node)
        self.on_path[node] = True
        self.accumulated.append(self.accumulated[-1] * edge_weight)

    def pop(self) -> int:
        node = self.current_path.pop()
        self.on_path[node] = False
        self.accumulated.pop()
        return node


def _walk_from(graph: WeightedDigraph, start: int, max_edges: int,
               deadline: float | None, on_edge):
    """Depth-first over node-simple paths from ``start``, ascending child order.

    Calls ``on_edge(state, node, weight)`` once per simple path that ends by
    traversing an edge onto ``node``; edges closing back onto the current
    path are skipped (they end no simple path).  Returns the number of edge
    traversals.
    """
    csr = graph.csr
    indptr, indices, data = csr.indptr, csr.indices, csr.data
    state = TrailState(graph.n, start)
    ptrs = [int(indptr[start])]
    steps = 0
    while ptrs:
        p = ptrs[-1]
        u = state.current_path[-1]
        if p >= indptr[u + 1]:
            ptrs.pop()
            state.pop()
            continue
        ptrs[-1] = p + 1
        w = int(indices[p])
        if state.on_path[w]:
            continue
        if state.depth() + 1 > max_edges:
            continue
        steps += 1
        if deadline is not None and steps % 8192 == 0 and time.monotonic() > deadline:
            raise InfluenceTimeoutError(
                f"path traversal from node {start} exceeded the time budget"
            )
        wgt = float(data[p])
        on_edge(state, w, wgt)
        if state.depth() + 1 < max_edges:
            state.push(w, wgt)
            ptrs.append(int(indptr[w]))
    return steps


def influence_index(graph: WeightedDigraph, v, *, max_path_length: int | None = None,
                    timeout: float | None = None, threads: int = 1) -> CentralityVector:
    """xi[i] = sum over node-simple paths i -> k of (weight product) * v[k].

    Equal to the access centrality on forests and never above it elsewhere;
    a finite sum for any weights, so no validation gate applies.
    ``max_path_length`` bounds path length in edges (default n, which no
    node-simple path can reach, so it only binds when set lower).
    ``timeout`` is seconds of wall clock for the whole call.
    """
    vv = as_value_vector(v, graph)
    n = graph.n
    max_edges = n if max_path_length is None else int(max_path_length)
    deadline = None if timeout is None else time.monotonic() + timeout
    xi = np.zeros(n)

    def run(start: int):
        total = 0.0

        def on_edge(state, node, wgt):
            nonlocal total
            total += state.weight * wgt * vv[node]

        _walk_from(graph, start, max_edges, deadline, on_edge)
        xi[start] = total

    if threads > 1 and n > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(run, range(n)))
    else:
        for start in range(n):
            run(start)
    return CentralityVector(MEASURE_INFLUENCE, xi)


def enumerate_simple_paths(graph: WeightedDigraph, start: int, *,
                           max_path_length: int | None = None,
                           max_paths: int = 10_000_000):
    """All node-simple paths from ``start`` with at least one edge.

    Returns a list of (node tuple, weight product) pairs in depth-first
    order.  Raises when more than ``max_paths`` paths exist; this is the
    brute-force oracle and scales exponentially.
    """
    if not 0 <= start < graph.n:
        raise ValueError(f"start node {start} out of range")
    max_edges = graph.n if max_path_length is None else int(max_path_length)
    out: list[tuple[tuple[int, ...], float]] = []

    def on_edge(state: TrailState, node: int, wgt: float):
        if len(out) >= max_paths:
            raise PathExplosionError(
                f"more than {max_paths} simple paths from node {start}"
            )
        out.append((tuple(state.current_path) + (node,), state.weight * wgt))

    _walk_from(graph, start, max_edges, None, on_edge)
    return out
