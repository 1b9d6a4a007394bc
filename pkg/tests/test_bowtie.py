"""Strongly connected components and bow-tie classification."""

import networkx as nx
import numpy as np
import pytest

from bowtie_centrality import (
    CLASS_IN,
    CLASS_OTHER,
    CLASS_OUT,
    CLASS_SCC,
    CLASS_TT,
    BowtieError,
    bowtie_decompose,
    component_size_report,
    condensation_edges,
    strongly_connected_components,
)
from conftest import graph_from_dense, random_valid_dense
from test_graph import graph_of


def to_nx(graph):
    g = nx.DiGraph()
    g.add_nodes_from(range(graph.n))
    g.add_weighted_edges_from(graph.edges())
    return g


class TestScc:
    def test_matches_networkx_on_random_graphs(self):
        rng = np.random.default_rng(11)
        for _ in range(100):
            graph = graph_from_dense(random_valid_dense(rng, n_max=12, p=0.25))
            partition = strongly_connected_components(graph)
            ours = {frozenset(map(int, m)) for m in partition.members}
            theirs = {frozenset(c) for c in nx.strongly_connected_components(to_nx(graph))}
            assert ours == theirs

    def test_component_ids_ordered_by_smallest_member(self):
        g = graph_of([("d", "e", 0.3), ("e", "d", 0.3), ("a", "b", 0.3),
                      ("b", "a", 0.3), ("b", "d", 0.2)])
        partition = strongly_connected_components(g)
        smallest = [int(m[0]) for m in partition.members]
        assert smallest == sorted(smallest)

    def test_members_sorted_and_consistent(self):
        rng = np.random.default_rng(5)
        graph = graph_from_dense(random_valid_dense(rng, n_max=10, p=0.3))
        partition = strongly_connected_components(graph)
        for cid, members in enumerate(partition.members):
            assert list(members) == sorted(members)
            assert all(partition.component_of[m] == cid for m in members)
        assert sum(len(m) for m in partition.members) == graph.n

    def test_trivial_vs_self_loop(self):
        g = graph_of([("a", "a", 0.5), ("a", "b", 0.2)])
        partition = strongly_connected_components(g)
        loop_component = partition.component_of[g.index_of("a")]
        bare_component = partition.component_of[g.index_of("b")]
        assert not partition.is_trivial[loop_component]
        assert partition.is_trivial[bare_component]

    def test_deep_chain_does_not_overflow(self):
        n = 5000
        sources = list(range(n - 1)) + [n - 1]
        targets = list(range(1, n)) + [0]  # one giant cycle
        g_labels = [f"v{i}" for i in range(n)]
        from bowtie_centrality import WeightedDigraph

        graph = WeightedDigraph.from_edges(
            g_labels, sources, targets, np.full(n, 0.5)
        )
        partition = strongly_connected_components(graph)
        assert partition.n_components == 1
        assert len(partition.members[0]) == n

    def test_condensation_is_acyclic_and_matches_networkx(self):
        rng = np.random.default_rng(23)
        for _ in range(30):
            graph = graph_from_dense(random_valid_dense(rng, n_max=10, p=0.3))
            partition = strongly_connected_components(graph)
            edges = condensation_edges(graph, partition)
            assert all(a != b for a, b in edges)
            assert len(set(edges)) == len(edges)
            cond = nx.DiGraph(edges)
            cond.add_nodes_from(range(partition.n_components))
            assert nx.is_directed_acyclic_graph(cond)
            # same component-level reachability as the networkx condensation
            ours = nx.DiGraph(edges)
            ours.add_nodes_from(range(partition.n_components))
            theirs = nx.condensation(to_nx(graph))
            matching = {
                theirs.nodes[c]["members"]
                and min(theirs.nodes[c]["members"]): c
                for c in theirs.nodes
            }
            relabeled = {
                (partition.members[a][0], partition.members[b][0])
                for a, b in ours.edges
            }
            theirs_edges = {
                (min(theirs.nodes[a]["members"]), min(theirs.nodes[b]["members"]))
                for a, b in theirs.edges
            }
            assert relabeled == theirs_edges


class TestBowTie:
    def test_demo_classes(self, demo_graph):
        decomp = bowtie_decompose(demo_graph)
        assert list(decomp.classes) == [
            CLASS_IN, CLASS_SCC, CLASS_SCC, CLASS_SCC, CLASS_SCC, CLASS_OUT
        ]
        assert decomp.sizes["IN"] == 1
        assert decomp.sizes["SCC"] == 4
        assert decomp.sizes["OUT"] == 1
        assert decomp.sizes["TT"] == 0
        assert decomp.sizes["Total"] == 6

    def test_size_report_rows(self, demo_graph):
        rows = component_size_report(bowtie_decompose(demo_graph))
        assert rows == [("IN", 1), ("SCC", 4), ("OUT", 1), ("TT", 0), ("Total", 6)]

    def test_size_report_includes_other_only_when_present(self):
        g = graph_of([("a", "b", 0.4), ("b", "a", 0.4), ("x", "y", 0.2)])
        rows = component_size_report(bowtie_decompose(g))
        assert ("OTHER", 2) in rows
        assert rows[-1] == ("Total", 4)

    def test_tube_and_tendril_classification(self):
        # in -> core(a<->b) -> out, plus a tendril t fed by in,
        # a feeder f into out, and a tube in -> m -> out
        g = graph_of([
            ("in", "a", 0.5), ("a", "b", 0.5), ("b", "a", 0.5), ("b", "out", 0.5),
            ("in", "t", 0.5),
            ("f", "out", 0.2),
            ("in", "m", 0.5), ("m", "out", 0.2),
        ])
        decomp = bowtie_decompose(g)
        get = lambda lab: decomp.classes[g.index_of(lab)]
        assert get("in") == CLASS_IN
        assert get("a") == get("b") == CLASS_SCC
        assert get("out") == CLASS_OUT
        assert get("t") == CLASS_TT
        assert get("f") == CLASS_TT
        assert get("m") == CLASS_TT

    def test_disconnected_piece_is_other(self):
        g = graph_of([("a", "b", 0.4), ("b", "a", 0.4), ("x", "y", 0.2)])
        decomp = bowtie_decompose(g)
        assert decomp.classes[g.index_of("x")] == CLASS_OTHER
        assert decomp.classes[g.index_of("y")] == CLASS_OTHER

    def test_nodes_in_matches_classes(self, demo_graph):
        decomp = bowtie_decompose(demo_graph)
        assert list(decomp.nodes_in(CLASS_SCC)) == [1, 2, 3, 4]
        assert list(decomp.nodes_in(CLASS_IN)) == [0]

    def test_dag_has_no_core(self):
        g = graph_of([("a", "b", 0.5), ("b", "c", 0.5)])
        with pytest.raises(BowtieError, match="core"):
            bowtie_decompose(g)

    def test_dag_with_trivial_core_allowed(self):
        g = graph_of([("a", "b", 0.5), ("b", "c", 0.5)])
        decomp = bowtie_decompose(g, allow_trivial_core=True)
        assert decomp.sizes["SCC"] == 1

    def test_largest_core_wins(self):
        g = graph_of([
            ("a", "b", 0.4), ("b", "a", 0.4),  # 2-cycle
            ("c", "d", 0.4), ("d", "e", 0.4), ("e", "c", 0.4),  # 3-cycle
            ("b", "c", 0.1),
        ])
        decomp = bowtie_decompose(g)
        assert sorted(g.labels[i] for i in decomp.nodes_in(CLASS_SCC)) == ["c", "d", "e"]
        # the 2-cycle feeds the chosen core, so it lands in IN
        assert decomp.classes[g.index_of("a")] == CLASS_IN

    def test_size_tie_prefers_smallest_id(self):
        g = graph_of([
            ("a", "b", 0.4), ("b", "a", 0.4),
            ("x", "y", 0.4), ("y", "x", 0.4),
        ])
        decomp = bowtie_decompose(g)
        assert sorted(g.labels[i] for i in decomp.nodes_in(CLASS_SCC)) == ["a", "b"]

    def test_self_loop_core_beats_plain_singletons(self):
        g = graph_of([("a", "b", 0.5), ("b", "c", 0.5), ("c", "c", 0.5)])
        decomp = bowtie_decompose(g)
        assert [g.labels[i] for i in decomp.nodes_in(CLASS_SCC)] == ["c"]

    def test_classification_properties_on_random_graphs(self):
        rng = np.random.default_rng(31)
        checked = 0
        for _ in range(200):
            graph = graph_from_dense(random_valid_dense(rng, n_max=12, p=0.3))
            try:
                decomp = bowtie_decompose(graph)
            except BowtieError:
                continue  # no cycle anywhere; nothing to classify
            checked += 1
            nxg = to_nx(graph)
            core = set(map(int, decomp.nodes_in(CLASS_SCC)))
            fwd = set().union(core, *(nx.descendants(nxg, c) for c in core))
            bwd = set().union(core, *(nx.ancestors(nxg, c) for c in core))
            weak = set().union(
                *(c for c in nx.weakly_connected_components(nxg) if c & core)
            )
            for i in range(graph.n):
                cls = decomp.classes[i]
                if i in core:
                    assert cls == CLASS_SCC
                elif i in bwd and i not in fwd:
                    assert cls == CLASS_IN
                elif i in fwd and i not in bwd:
                    assert cls == CLASS_OUT
                elif i in weak:
                    assert cls == CLASS_TT
                else:
                    assert cls == CLASS_OTHER
        assert checked > 100
