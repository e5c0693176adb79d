import random
from fractions import Fraction

from conftest import A, B, C, g_of, p_of
from oracles import random_data_graph, random_pattern, random_update_set

from teamsim.batch import batch_topk
from teamsim.engine import Session
from teamsim.graphs import Subgraph, ball_extract
from teamsim.quality import (
    edge_satisfiability,
    node_satisfiability,
    relation_over_subgraph,
    team_quality,
)
from teamsim.simulation import MatchRelation, match_ball


class TestNodeSatisfiability:
    def test_perfect_subgraph_scores_one(self):
        p = p_of([("A", A, (1, 1)), ("B", B, (1, 2))], [("A", "B")])
        g = g_of([(1, A), (2, B), (3, B)], [(1, 2), (1, 3)])
        ps = match_ball(p, ball_extract(g, 1, 1))
        assert node_satisfiability(ps.relation, p) == 1

    def test_half_when_one_of_two_nodes_matches(self):
        p = p_of([("A", A, (1, 1)), ("B", B, (1, 1))], [("A", "B")])
        m = MatchRelation({"A": {1}, "B": set()})
        assert node_satisfiability(m, p) == Fraction(1, 2)

    def test_empty_relation_scores_zero(self):
        p = p_of([("A", A, (1, 1)), ("B", B, (1, 1))], [("A", "B")])
        m = MatchRelation({"A": set(), "B": set()})
        assert node_satisfiability(m, p) == 0

    def test_capacity_violation_not_satisfied(self):
        p = p_of([("A", A, (1, 1)), ("B", B, (2, 2))], [("A", "B")])
        m = MatchRelation({"A": {1}, "B": {2}})
        assert node_satisfiability(m, p) == Fraction(1, 2)


class TestEdgeSatisfiability:
    def test_perfect_subgraph_scores_one(self):
        p = p_of([("A", A, (1, 1)), ("B", B, (1, 2))], [("A", "B")])
        g = g_of([(1, A), (2, B), (3, B)], [(1, 2), (1, 3)])
        ps = match_ball(p, ball_extract(g, 1, 1))
        assert edge_satisfiability(ps.team, ps.relation, p) == 1

    def test_one_sided_edge_scores_half(self):
        # two pattern edges; (A,B) holds both ways, (B,C) fails B->C
        p = p_of(
            [("A", A, (1, 1)), ("B", B, (1, 2)), ("C", C, (1, 1))],
            [("A", "B"), ("B", "C")],
        )
        team = Subgraph(
            frozenset({1, 2, 3, 4}), frozenset({(1, 2), (1, 3), (2, 4)})
        )
        m = MatchRelation({"A": {1}, "B": {2, 3}, "C": {4}})
        # node 3 (a B-match) has no C-neighbor: edge (B,C) unsatisfied
        assert edge_satisfiability(team, m, p) == Fraction(1, 2)

    def test_zero_when_nothing_satisfied(self):
        p = p_of([("A", A, (1, 1)), ("B", B, (1, 1))], [("A", "B")])
        team = Subgraph(frozenset({1, 2}), frozenset())
        m = MatchRelation({"A": {1}, "B": {2}})
        assert edge_satisfiability(team, m, p) == 0

    def test_empty_relation_scores_zero(self):
        p = p_of([("A", A, (1, 1)), ("B", B, (1, 1))], [("A", "B")])
        team = Subgraph(frozenset({1, 2}), frozenset({(1, 2)}))
        m = MatchRelation({"A": set(), "B": set()})
        assert edge_satisfiability(team, m, p) == 0


class TestTeamQuality:
    def test_engine_teams_score_perfectly(self):
        rng = random.Random(71)
        scored = 0
        for _ in range(30):
            g = random_data_graph(rng, n_max=20)
            p = random_pattern(rng, n_max=4)
            res = batch_topk(p, g, 2, 3)
            if not res.satisfiable:
                continue
            for t in res.teams:
                q = team_quality(t, p, g)
                assert q.node_sat == 1 and q.edge_sat == 1, (t, q)
                scored += 1
        assert scored > 10

    def test_engine_teams_after_updates_score_perfectly(self):
        rng = random.Random(72)
        scored = 0
        for _ in range(10):
            g = random_data_graph(rng, n_max=18)
            p = random_pattern(rng, n_max=4)
            s = Session(g, p, r=2, k=3, h=min(2, p.node_count))
            for _ in range(3):
                dp, dg = random_update_set(rng, s.g, s.p, rng.choice(["p", "g", "both"]))
                res = s.apply(dp, dg)
                for t in res.teams:
                    q = team_quality(t, s.p, s.g)
                    assert q.node_sat == 1 and q.edge_sat == 1
                    scored += 1
        assert scored > 5

    def test_arbitrary_node_set_uses_induced_relation(self):
        p = p_of([("A", A, (1, 1)), ("B", B, (1, 1))], [("A", "B")])
        g = g_of([(1, A), (2, B), (3, C)], [(1, 2), (2, 3)])
        sub = Subgraph.induced(g.adj, {1, 2, 3})
        q = team_quality(sub, p, g)
        assert q.node_sat == 1 and q.edge_sat == 1
        assert q.diameter == 2 and not q.diameter_warning

    def test_disconnected_team_flags_diameter(self):
        p = p_of([("A", A, (1, None)), ("B", B, (1, None))], [("A", "B")])
        g = g_of([(1, A), (2, B), (10, A), (11, B)], [(1, 2), (10, 11)])
        sub = Subgraph.induced(g.adj, {1, 2, 10, 11})
        q = team_quality(sub, p, g)
        assert q.diameter_warning
        assert q.diameter == 1

    def test_relation_over_subgraph_is_maximal(self):
        p = p_of([("A", A, (1, None)), ("B", B, (1, None))], [("A", "B")])
        g = g_of([(1, A), (2, B), (3, A)], [(1, 2), (2, 3)])
        sub = Subgraph.induced(g.adj, {1, 2, 3})
        m = relation_over_subgraph(p, sub, g)
        assert m.r == {"A": {1, 3}, "B": {2}}
