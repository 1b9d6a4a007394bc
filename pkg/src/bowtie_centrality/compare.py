"""Rankings and truncated-overlap comparison between measures."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .centrality import CentralityVector


@dataclass(frozen=True)
class Ranking:
    """Nodes ordered best-first with their scores.

    Ties are broken by ascending node id so rankings are total orders and
    byte-reproducible.
    """

    measure: str
    order: np.ndarray
    scores: np.ndarray

    def __post_init__(self):
        order = np.asarray(self.order, dtype=int)
        scores = np.asarray(self.scores, dtype=float)
        if order.shape != scores.shape or order.ndim != 1:
            raise ValueError("order and scores must be aligned 1-D arrays")
        order.setflags(write=False)
        scores.setflags(write=False)
        object.__setattr__(self, "order", order)
        object.__setattr__(self, "scores", scores)

    def __len__(self) -> int:
        return len(self.order)

    def top(self, k: int) -> np.ndarray:
        return self.order[:k]


def rank_nodes(centrality: CentralityVector, positive_only: bool = False) -> Ranking:
    """Sort nodes by descending score, ties by ascending node id.

    ``positive_only`` drops zero and negative scores, which is how support
    sizes are compared across measures.  NaN scores are refused because no
    total order exists for them.
    """
    scores = np.asarray(centrality.values, dtype=float)
    if np.any(np.isnan(scores)):
        raise ValueError(f"{centrality.measure} scores contain NaN")
    n = len(scores)
    # last lexsort key is primary: descending score, then ascending id
    order = np.lexsort((np.arange(n), -scores))
    ranked = scores[order]
    if positive_only:
        keep = ranked > 0
        order, ranked = order[keep], ranked[keep]
    return Ranking(centrality.measure, order, ranked)


def jaccard(a, b) -> float:
    """|a & b| / |a | b| over node-id sets; 1.0 when both are empty."""
    sa, sb = set(map(int, a)), set(map(int, b))
    if not sa and not sb:
        return 1.0
    return len(sa & sb) / len(sa | sb)


def truncated_jaccard_curve(ra: Ranking, rb: Ranking) -> np.ndarray:
    """Jaccard overlap of the top-n prefixes for every n, in O(N).

    out[n-1] compares the best n nodes of each ranking.  Both rankings must
    cover the same node set (prefixes of different universes are not
    comparable), so build them without ``positive_only`` filtering.
    """
    if len(ra) != len(rb) or not np.array_equal(np.sort(ra.order), np.sort(rb.order)):
        raise ValueError("rankings cover different node sets")
    n_total = len(ra)
    out = np.empty(n_total)
    if n_total == 0:
        return out
    top = int(max(ra.order.max(), rb.order.max())) + 1
    in_a = np.zeros(top, dtype=bool)
    in_b = np.zeros(top, dtype=bool)
    inter = 0
    for i in range(n_total):
        a_i, b_i = ra.order[i], rb.order[i]
        in_a[a_i] = True
        in_b[b_i] = True
        # a_i can only have entered the intersection now, b's prefix already
        # holds everything it will hold at this n (and vice versa)
        if in_b[a_i]:
            inter += 1
        if b_i != a_i and in_a[b_i]:
            inter += 1
        out[i] = inter / (2 * (i + 1) - inter)
    return out


def ranked_value_table(rankings, labels=None, top: int | None = None):
    """Rows (measure, rank, node, score) for tabular export.

    ``labels`` maps node ids to display labels; ids are used verbatim when
    omitted.  ``top`` truncates each ranking.
    """
    rows = []
    for ranking in rankings:
        limit = len(ranking) if top is None else min(top, len(ranking))
        for position in range(limit):
            node = int(ranking.order[position])
            name = labels[node] if labels is not None else node
            rows.append((ranking.measure, position + 1, name,
                         float(ranking.scores[position])))
    return rows
