import pytest

from teamsim.errors import InvalidConfig
from teamsim.generate import GenConfig, gen_pattern, gen_planted
from teamsim.graphs import connected_components
from teamsim.simulation import pattern_satisfiable


class TestGenPlanted:
    def test_zero_inter_gives_disjoint_communities(self):
        cfg = GenConfig(n=10, d=4, l=4, communities=2, inter_prob=0.0, seed=7)
        g = gen_planted(cfg)
        assert len(connected_components(g.adj)) == 2

    def test_deterministic(self):
        cfg = GenConfig(n=200, d=6, l=10, communities=4, seed=42)
        assert gen_planted(cfg) == gen_planted(cfg)

    def test_different_seeds_differ(self):
        base = GenConfig(n=200, d=6, l=10, communities=4, seed=1)
        other = GenConfig(n=200, d=6, l=10, communities=4, seed=2)
        assert gen_planted(base) != gen_planted(other)

    @pytest.mark.perf
    def test_average_degree_within_tolerance_large(self):
        cfg = GenConfig(n=10_000, d=10, l=50, communities=20, seed=3)
        g = gen_planted(cfg)
        avg = 2 * g.edge_count / g.node_count
        assert 9 <= avg <= 11

    def test_average_degree_small(self):
        cfg = GenConfig(n=500, d=8, l=10, communities=5, seed=3)
        g = gen_planted(cfg)
        avg = 2 * g.edge_count / g.node_count
        assert 0.9 * 8 <= avg <= 1.1 * 8

    def test_every_node_labeled(self):
        cfg = GenConfig(n=300, d=4, l=10, communities=3, seed=9)
        g = gen_planted(cfg)
        assert all(g.labels[v] for v in g.adj)
        g.validate()

    def test_invalid_configs(self):
        with pytest.raises(InvalidConfig):
            GenConfig(n=0, d=1, l=1).validate()
        with pytest.raises(InvalidConfig):
            GenConfig(n=5, d=1, l=1, communities=9).validate()
        with pytest.raises(InvalidConfig):
            GenConfig(n=5, d=1, l=1, intra_prob=1.5).validate()
        with pytest.raises(InvalidConfig):
            GenConfig(n=5, d=1, l=1, intra_prob=0.0, inter_prob=0.0).validate()


class TestGenPattern:
    def test_connected_and_satisfiable(self):
        cfg = GenConfig(n=100, d=5, l=20, communities=4, seed=0)
        for seed in range(5):
            p = gen_pattern(cfg, n_nodes=8, n_edges=10, seed=seed)
            assert p.is_connected()
            assert p.node_count == 8
            assert pattern_satisfiable(p)

    def test_deterministic(self):
        cfg = GenConfig(n=100, d=5, l=20, communities=4, seed=0)
        assert gen_pattern(cfg, 6, 7, seed=4) == gen_pattern(cfg, 6, 7, seed=4)
