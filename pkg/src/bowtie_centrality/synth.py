"""Synthetic networks with a planted bow-tie shape.

The generator plants each class directly: a Hamiltonian cycle plus random
extra edges over the core, input-side nodes chained forward into the core,
output-side nodes fed from the core or earlier output nodes, and tendrils or
tubes hanging off the sides.  Every draw comes from one seeded generator in
a fixed order, so a (spec, seed) pair reproduces the network byte for byte.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass

import numpy as np

from .bowtie import CLASS_IN, CLASS_OUT, CLASS_SCC, CLASS_TT, bowtie_decompose
from .errors import BowtieError
from .graph import NodeValues, WeightedDigraph


@dataclass(frozen=True)
class BowTieSpec:
    """Target shape and density of a planted bow-tie network.

    Degrees are means of Poisson draws (floored at one where a link is
    required to keep the planted class reachable).  Incoming weight per node
    is normalized to a uniform draw from [tau_low, tau_high], which keeps
    column sums strictly below one and the network valid by construction.
    """

    n_in: int
    n_scc: int
    n_out: int
    n_tt: int = 0
    in_degree: float = 2.0
    scc_extra_degree: float = 2.0
    out_degree: float = 2.0
    tau_low: float = 0.4
    tau_high: float = 0.95
    value_distribution: str = "pareto"  # "pareto" | "uniform"
    pareto_alpha: float = 1.5
    value_scale: float = 1.0

    def __post_init__(self):
        if self.n_scc < 2:
            raise ValueError("the planted core needs at least 2 nodes")
        if min(self.n_in, self.n_out, self.n_tt) < 0:
            raise ValueError("class sizes must be nonnegative")
        if self.n_tt > 0 and self.n_in == 0 and self.n_out == 0:
            raise ValueError("tendrils need an input or output side to hang from")
        if not (0.0 < self.tau_low <= self.tau_high < 1.0):
            raise ValueError("tau bounds must satisfy 0 < low <= high < 1")
        if min(self.in_degree, self.scc_extra_degree, self.out_degree) < 0:
            raise ValueError("degrees must be nonnegative")
        if self.value_distribution not in ("pareto", "uniform"):
            raise ValueError(f"unknown value distribution {self.value_distribution!r}")

    @property
    def n_total(self) -> int:
        return self.n_in + self.n_scc + self.n_out + self.n_tt

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "BowTieSpec":
        return cls(**json.loads(text))


def _planted_classes(spec: BowTieSpec) -> np.ndarray:
    classes = np.empty(spec.n_total, dtype=object)
    pos = 0
    for cls, count in ((CLASS_IN, spec.n_in), (CLASS_SCC, spec.n_scc),
                       (CLASS_OUT, spec.n_out), (CLASS_TT, spec.n_tt)):
        classes[pos:pos + count] = cls
        pos += count
    return classes


def generate(spec: BowTieSpec, seed: int = 0,
             verify: bool = True) -> tuple[WeightedDigraph, NodeValues]:
    """Build a network matching ``spec``; deterministic in (spec, seed).

    With ``verify`` the planted classes are checked against an actual
    decomposition of the result and a mismatch raises, so callers never
    receive a network whose shape silently drifted from the request.
    """
    rng = np.random.default_rng(seed)
    n_in, n_scc, n_out, n_tt = spec.n_in, spec.n_scc, spec.n_out, spec.n_tt
    core_base = n_in
    out_base = n_in + n_scc
    tt_base = out_base + n_out

    src_parts: list[np.ndarray] = []
    dst_parts: list[np.ndarray] = []

    # core: one cycle through every core node, then extra in-core edges
    perm = rng.permutation(n_scc) + core_base
    src_parts.append(perm)
    dst_parts.append(np.roll(perm, -1))
    extra = rng.poisson(spec.scc_extra_degree, n_scc)
    total = int(extra.sum())
    if total:
        srcs = np.repeat(np.arange(n_scc) + core_base, extra)
        dsts = rng.integers(0, n_scc, total) + core_base
        keep = srcs != dsts  # self-loops would flatter the node they sit on
        src_parts.append(srcs[keep])
        dst_parts.append(dsts[keep])

    # input side: node i links forward, to later input nodes or the core,
    # with at least one link, so every input node reaches the core
    if n_in:
        counts = 1 + rng.poisson(max(spec.in_degree - 1.0, 0.0), n_in)
        srcs = np.repeat(np.arange(n_in), counts)
        pool = (n_in - 1 - srcs) + n_scc  # later input nodes, then core
        pick = rng.integers(0, pool)
        later = pick < (n_in - 1 - srcs)
        dsts = np.where(later, srcs + 1 + pick,
                        core_base + pick - (n_in - 1 - srcs))
        src_parts.append(srcs)
        dst_parts.append(dsts)

    # output side: node j is fed by the core or earlier output nodes, with
    # at least one link, so the core reaches every output node
    if n_out:
        counts = 1 + rng.poisson(max(spec.out_degree - 1.0, 0.0), n_out)
        dsts = np.repeat(np.arange(n_out) + out_base, counts)
        pool = n_scc + (dsts - out_base)  # the core, then earlier output nodes
        pick = rng.integers(0, pool)
        from_core = pick < n_scc
        srcs = np.where(from_core, core_base + pick, out_base + pick - n_scc)
        src_parts.append(srcs)
        dst_parts.append(dsts)

    # tendrils and tubes: fed from the input side, feeding the output side,
    # or both; never touching the core
    if n_tt:
        modes = []
        if n_in:
            modes.append("in_fed")
        if n_out:
            modes.append("out_feeder")
        if n_in and n_out:
            modes.append("tube")
        choice = rng.integers(0, len(modes), n_tt)
        tt_ids = np.arange(n_tt) + tt_base
        feeders = rng.integers(0, n_in, n_tt) if n_in else None
        sinks = rng.integers(0, n_out, n_tt) + out_base if n_out else None
        for t in range(n_tt):
            mode = modes[choice[t]]
            if mode in ("in_fed", "tube"):
                src_parts.append(np.array([feeders[t]]))
                dst_parts.append(np.array([tt_ids[t]]))
            if mode in ("out_feeder", "tube"):
                src_parts.append(np.array([tt_ids[t]]))
                dst_parts.append(np.array([sinks[t]]))

    sources = np.concatenate(src_parts)
    targets = np.concatenate(dst_parts)
    raw = rng.uniform(0.2, 1.0, len(sources))

    # normalize incoming weight per node to a draw strictly below one
    n = spec.n_total
    tau = rng.uniform(spec.tau_low, spec.tau_high, n)
    col_sums = np.zeros(n)
    np.add.at(col_sums, targets, raw)
    scale = np.where(col_sums > 0, tau / np.where(col_sums > 0, col_sums, 1.0), 1.0)
    weights = raw * scale[targets]

    if spec.value_distribution == "pareto":
        values = spec.value_scale * (1.0 + rng.pareto(spec.pareto_alpha, n))
    else:
        values = rng.uniform(0.0, spec.value_scale, n)

    widths = {CLASS_IN: ("in", n_in), CLASS_SCC: ("c", n_scc),
              CLASS_OUT: ("out", n_out), CLASS_TT: ("tt", n_tt)}
    labels = []
    for prefix, count in widths.values():
        labels.extend(f"{prefix}{i}" for i in range(count))

    graph = WeightedDigraph.from_edges(labels, sources, targets, weights)
    node_values = NodeValues(values)

    if verify:
        planted = _planted_classes(spec)
        found = bowtie_decompose(graph).classes
        if not np.array_equal(found, planted):
            bad = int(np.flatnonzero(found != planted)[0])
            raise BowtieError(
                f"planted classes not recovered (first mismatch at node {bad}: "
                f"planted {planted[bad]}, found {found[bad]})"
            )
    return graph, node_values


def demo_network() -> tuple[WeightedDigraph, NodeValues]:
    """Six-node worked example: one input node, a four-node core, one output.

    Unit values everywhere; incoming weight sums to one for every node with
    holders, so this sits exactly on the validity boundary that the strict
    in-core check still admits.
    """
    edges = [
        ("1", "2", 0.1),
        ("2", "3", 0.5), ("2", "4", 0.5), ("2", "5", 0.2),
        ("3", "2", 0.3), ("3", "5", 0.2),
        ("4", "2", 0.3), ("4", "5", 0.6),
        ("5", "2", 0.3), ("5", "3", 0.5), ("5", "4", 0.5), ("5", "6", 1.0),
    ]
    labels = [str(i) for i in range(1, 7)]
    index = {lab: i for i, lab in enumerate(labels)}
    sources = np.array([index[s] for s, _, _ in edges])
    targets = np.array([index[t] for _, t, _ in edges])
    weights = np.array([w for _, _, w in edges])
    graph = WeightedDigraph.from_edges(labels, sources, targets, weights)
    return graph, NodeValues(np.ones(6))
