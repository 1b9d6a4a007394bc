"""Synthetic generator: planted shape, validity, determinism."""

import numpy as np
import pytest

from bowtie_centrality import (
    bowtie_decompose,
    validate,
)
from bowtie_centrality.graph import edges_csv_text
from bowtie_centrality.synth import BowTieSpec, demo_network, generate


class TestSpec:
    def test_json_round_trip(self):
        spec = BowTieSpec(n_in=3, n_scc=4, n_out=5, n_tt=2, in_degree=1.5,
                          value_distribution="uniform")
        assert BowTieSpec.from_json(spec.to_json()) == spec

    def test_rejects_tiny_core(self):
        with pytest.raises(ValueError, match="core"):
            BowTieSpec(n_in=1, n_scc=1, n_out=1)

    def test_rejects_negative_sizes(self):
        with pytest.raises(ValueError):
            BowTieSpec(n_in=-1, n_scc=2, n_out=0)

    def test_rejects_unanchored_tendrils(self):
        with pytest.raises(ValueError, match="tendrils"):
            BowTieSpec(n_in=0, n_scc=2, n_out=0, n_tt=1)

    def test_rejects_bad_tau(self):
        with pytest.raises(ValueError, match="tau"):
            BowTieSpec(n_in=1, n_scc=2, n_out=1, tau_low=0.5, tau_high=1.0)

    def test_rejects_unknown_distribution(self):
        with pytest.raises(ValueError, match="distribution"):
            BowTieSpec(n_in=1, n_scc=2, n_out=1, value_distribution="cauchy")

    def test_total(self):
        assert BowTieSpec(n_in=3, n_scc=4, n_out=5, n_tt=2).n_total == 14


class TestGenerate:
    CASES = [
        BowTieSpec(n_in=5, n_scc=4, n_out=6, n_tt=0),
        BowTieSpec(n_in=8, n_scc=3, n_out=2, n_tt=4),
        BowTieSpec(n_in=0, n_scc=5, n_out=7, n_tt=3),
        BowTieSpec(n_in=6, n_scc=2, n_out=0, n_tt=2),
        BowTieSpec(n_in=0, n_scc=3, n_out=0, n_tt=0),
        BowTieSpec(n_in=10, n_scc=6, n_out=12, n_tt=5, in_degree=3.0,
                   out_degree=3.0, value_distribution="uniform"),
    ]

    @pytest.mark.parametrize("spec", CASES, ids=range(len(CASES)))
    def test_planted_shape_recovered(self, spec):
        graph, values = generate(spec, seed=11)
        decomp = bowtie_decompose(graph)
        assert decomp.sizes["IN"] == spec.n_in
        assert decomp.sizes["SCC"] == spec.n_scc
        assert decomp.sizes["OUT"] == spec.n_out
        assert decomp.sizes["TT"] == spec.n_tt
        assert decomp.sizes["Total"] == spec.n_total

    @pytest.mark.parametrize("spec", CASES, ids=range(len(CASES)))
    def test_generated_graphs_are_valid(self, spec):
        graph, values = generate(spec, seed=13)
        report = validate(graph)
        assert report.ok
        assert np.all(values.values >= 0)
        assert len(values) == graph.n

    def test_byte_determinism(self):
        spec = BowTieSpec(n_in=4, n_scc=3, n_out=5, n_tt=2)
        g1, v1 = generate(spec, seed=21)
        g2, v2 = generate(spec, seed=21)
        assert edges_csv_text(g1) == edges_csv_text(g2)
        assert np.array_equal(v1.values, v2.values)

    def test_seeds_differ(self):
        spec = BowTieSpec(n_in=4, n_scc=3, n_out=5)
        g1, _ = generate(spec, seed=1)
        g2, _ = generate(spec, seed=2)
        assert edges_csv_text(g1) != edges_csv_text(g2)

    def test_column_sums_land_in_tau_band(self):
        spec = BowTieSpec(n_in=5, n_scc=4, n_out=5, tau_low=0.5, tau_high=0.8)
        graph, _ = generate(spec, seed=5)
        sums = graph.column_sums()
        fed = sums > 0
        assert np.all(sums[fed] >= 0.5 - 1e-12)
        assert np.all(sums[fed] <= 0.8 + 1e-12)

    def test_labels_carry_class_prefixes(self):
        graph, _ = generate(BowTieSpec(n_in=2, n_scc=2, n_out=2, n_tt=1), seed=1)
        assert graph.labels[0].startswith("in")
        assert graph.labels[2].startswith("c")
        assert graph.labels[4].startswith("out")
        assert graph.labels[6].startswith("tt")


class TestDemoNetwork:
    def test_exact_edges(self):
        graph, values = demo_network()
        expected = {
            ("1", "2"): 0.1,
            ("2", "3"): 0.5, ("2", "4"): 0.5, ("2", "5"): 0.2,
            ("3", "2"): 0.3, ("3", "5"): 0.2,
            ("4", "2"): 0.3, ("4", "5"): 0.6,
            ("5", "2"): 0.3, ("5", "3"): 0.5, ("5", "4"): 0.5, ("5", "6"): 1.0,
        }
        got = {(graph.labels[i], graph.labels[j]): w for i, j, w in graph.edges()}
        assert got == expected
        assert np.array_equal(values.values, np.ones(6))

    def test_is_valid(self):
        graph, _ = demo_network()
        assert validate(graph).ok
