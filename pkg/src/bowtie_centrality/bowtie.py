"""Strongly connected components and bow-tie classification.

A connected component of a directed network organizes itself around a core
SCC into an in-section (nodes that reach the core), an out-section (nodes
the core reaches), and tubes-and-tendrils (weakly attached leftovers).
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .errors import BowtieError
from .graph import WeightedDigraph

CLASS_IN = "IN"
CLASS_SCC = "SCC"
CLASS_OUT = "OUT"
CLASS_TT = "TT"
CLASS_OTHER = "OTHER"

CLASS_ORDER = (CLASS_IN, CLASS_SCC, CLASS_OUT, CLASS_TT, CLASS_OTHER)


@dataclass(frozen=True)
class SccPartition:
    """Partition of the nodes into strongly connected components.

    Component ids are assigned deterministically by the smallest member
    index.  ``is_trivial[c]`` is true for size-1 components without a
    self-loop; only non-trivial components can carry cycle flow.
    """

    component_of: np.ndarray
    members: list[np.ndarray]
    is_trivial: np.ndarray

    @property
    def n_components(self) -> int:
        return len(self.members)

    def nontrivial(self) -> list[int]:
        return [c for c in range(self.n_components) if not self.is_trivial[c]]

    def largest(self) -> int:
        """Largest component by node count; ties break to the smallest id."""
        sizes = [len(m) for m in self.members]
        return int(np.argmax(sizes))  # argmax returns the first (smallest id) maximum


def strongly_connected_components(graph: WeightedDigraph) -> SccPartition:
    """Tarjan's algorithm, iterative to cope with deep recursion at scale."""
    n = graph.n
    indptr, indices = graph.csr.indptr, graph.csr.indices

    order = np.full(n, -1, dtype=np.int64)  # visitation index
    low = np.zeros(n, dtype=np.int64)
    on_stack = np.zeros(n, dtype=bool)
    stack: list[int] = []
    components: list[list[int]] = []
    counter = 0

    for root in range(n):
        if order[root] != -1:
            continue
        # each frame is [node, next-edge-offset]
        work = [[root, indptr[root]]]
        order[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack[root] = True
        while work:
            v, ptr = work[-1]
            if ptr < indptr[v + 1]:
                work[-1][1] += 1
                w = indices[ptr]
                if order[w] == -1:
                    order[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack[w] = True
                    work.append([w, indptr[w]])
                elif on_stack[w]:
                    if low[w] < low[v]:
                        low[v] = low[w]
            else:
                work.pop()
                if work and low[v] < low[work[-1][0]]:
                    low[work[-1][0]] = low[v]
                if low[v] == order[v]:
                    comp = []
                    while True:
                        w = stack.pop()
                        on_stack[w] = False
                        comp.append(w)
                        if w == v:
                            break
                    components.append(comp)

    components = [np.array(sorted(c), dtype=int) for c in components]
    components.sort(key=lambda c: int(c[0]))
    component_of = np.empty(n, dtype=int)
    for cid, comp in enumerate(components):
        component_of[comp] = cid

    loops = graph.self_loop_weights() if n else np.zeros(0)
    trivial = np.array(
        [len(c) == 1 and loops[c[0]] == 0.0 for c in components], dtype=bool
    )
    return SccPartition(component_of=component_of, members=components, is_trivial=trivial)


def condensation_edges(graph: WeightedDigraph, partition: SccPartition) -> set[tuple[int, int]]:
    """Directed edges between distinct components (the condensation DAG)."""
    comp = partition.component_of
    return {
        (int(comp[i]), int(comp[j]))
        for i, j, _ in graph.edges()
        if comp[i] != comp[j]
    }


@dataclass(frozen=True)
class BowTieDecomposition:
    """Node classes relative to a selected core component.

    IN reaches the core without being reached by it, OUT is the mirror
    image, TT shares the core's weak component but is in none of the three,
    and OTHER lies outside the weak component entirely.
    """

    core: int
    classes: np.ndarray  # array of class strings, length n
    sizes: dict = field(default_factory=dict)

    def nodes_in(self, cls: str) -> np.ndarray:
        return np.nonzero(self.classes == cls)[0]


def _reach(graph_indptr, graph_indices, seed: np.ndarray, n: int) -> np.ndarray:
    seen = np.zeros(n, dtype=bool)
    seen[seed] = True
    queue = deque(int(s) for s in seed)
    while queue:
        u = queue.popleft()
        for k in range(graph_indptr[u], graph_indptr[u + 1]):
            w = int(graph_indices[k])
            if not seen[w]:
                seen[w] = True
                queue.append(w)
    return seen


def bowtie_decompose(
    graph: WeightedDigraph,
    partition: SccPartition | None = None,
    core: int | str = "largest",
    allow_trivial_core: bool = False,
) -> BowTieDecomposition:
    """Classify every node as IN / SCC / OUT / TT / OTHER around a core.

    ``core`` is either an explicit component id or ``"largest"`` (node
    count, ties to the smallest id).  Selecting the largest core on a graph
    whose components are all trivial is refused unless
    ``allow_trivial_core`` permits a size-1 core.
    """
    if partition is None:
        partition = strongly_connected_components(graph)
    if graph.n == 0:
        raise BowtieError("cannot decompose an empty graph")

    if core == "largest":
        if not partition.nontrivial() and not allow_trivial_core:
            raise BowtieError(
                "no nontrivial core: every component is a single acyclic node "
                "(pass allow_trivial_core to force a size-1 core)"
            )
        if partition.nontrivial():
            sizes = [len(partition.members[c]) for c in partition.nontrivial()]
            core_id = partition.nontrivial()[int(np.argmax(sizes))]
        else:
            core_id = partition.largest()
    else:
        core_id = int(core)
        if not 0 <= core_id < partition.n_components:
            raise BowtieError(f"no such component id {core_id}")

    n = graph.n
    seed = partition.members[core_id]
    fwd = _reach(graph.csr.indptr, graph.csr.indices, seed, n)
    # backward reachability = forward over in-edges (CSC plays the transpose)
    bwd = _reach(graph.csc.indptr, graph.csc.indices, seed, n)

    classes = np.full(n, CLASS_OTHER, dtype=object)
    in_core = np.zeros(n, dtype=bool)
    in_core[seed] = True
    classes[in_core] = CLASS_SCC
    classes[bwd & ~fwd & ~in_core] = CLASS_IN
    classes[fwd & ~bwd & ~in_core] = CLASS_OUT

    # weak connectivity over the union of both edge directions
    weak = np.zeros(n, dtype=bool)
    weak[seed] = True
    queue = deque(int(s) for s in seed)
    csr, csc = graph.csr, graph.csc
    while queue:
        u = queue.popleft()
        for indptr, indices in ((csr.indptr, csr.indices), (csc.indptr, csc.indices)):
            for k in range(indptr[u], indptr[u + 1]):
                w = int(indices[k])
                if not weak[w]:
                    weak[w] = True
                    queue.append(w)
    undecided = ~(in_core | (bwd & ~fwd) | (fwd & ~bwd))
    classes[undecided & weak & ~in_core] = CLASS_TT

    sizes = {cls: int(np.sum(classes == cls)) for cls in CLASS_ORDER}
    sizes["Total"] = n
    return BowTieDecomposition(core=core_id, classes=classes, sizes=sizes)


def component_size_report(decomposition: BowTieDecomposition) -> list[tuple[str, int]]:
    """Size table rows (class, count); OTHER appears only when populated."""
    sizes = decomposition.sizes
    rows = [(cls, sizes.get(cls, 0)) for cls in (CLASS_IN, CLASS_SCC, CLASS_OUT, CLASS_TT)]
    if sizes.get(CLASS_OTHER, 0):
        rows.append((CLASS_OTHER, sizes[CLASS_OTHER]))
    rows.append(("Total", sizes.get("Total", sum(c for _, c in rows))))
    return rows
