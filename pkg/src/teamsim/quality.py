"""Team quality measures: diameter, density, node/edge satisfiability.

The satisfiability ratios grade how well a node set meets the pattern's
capacity intervals and structural constraints; engine-produced teams
score 1.0 on both by construction, but the measures also accept
arbitrary node sets (the relation is then the pattern's maximum relation
over the induced subgraph).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .graphs import DataGraph, Density, Subgraph, diameter_report
from .pattern import PatternGraph
from .simulation import MatchRelation, max_simulation
from .topk import Team


@dataclass(frozen=True)
class QualityReport:
    diameter: int
    diameter_warning: bool  # set when measured on the largest component
    density: Density
    node_sat: Fraction
    edge_sat: Fraction

    def as_dict(self) -> dict:
        return {
            "diameter": self.diameter,
            "diameterWarning": self.diameter_warning,
            "density": {"e": self.density.edge_count, "n": self.density.node_count},
            "nodeSat": float(self.node_sat),
            "edgeSat": float(self.edge_sat),
        }


def node_satisfiability(m: MatchRelation, p: PatternGraph) -> Fraction:
    """Fraction of pattern nodes whose matched set exists and fits the
    capacity interval."""
    sat = 0
    for u in p.adj:
        matched = m.r.get(u, set())
        if matched and len(matched) in p.capacity[u]:
            sat += 1
    return Fraction(sat, len(p.adj))


def edge_satisfiability(team: Subgraph, m: MatchRelation, p: PatternGraph) -> Fraction:
    """Fraction of pattern edges honored in both directions: every match
    of one endpoint has a team edge to some match of the other."""
    edges = p.edges()
    if not edges:
        return Fraction(1, 1)
    adj = team.adjacency()
    sat = 0
    for u1, u2 in edges:
        r1 = m.r.get(u1, set())
        r2 = m.r.get(u2, set())
        if not r1 or not r2:
            continue
        fwd = all(not adj[v].isdisjoint(r2) for v in r1)
        bwd = all(not adj[v].isdisjoint(r1) for v in r2)
        if fwd and bwd:
            sat += 1
    return Fraction(sat, len(edges))


def relation_over_subgraph(p: PatternGraph, team: Subgraph, g: DataGraph) -> MatchRelation:
    """Maximum relation of the pattern over a team's induced subgraph."""
    adj = team.adjacency()
    labels = {v: g.labels[v] for v in team.nodes}
    return max_simulation(p, adj, labels)


def team_quality(
    team: Team | Subgraph,
    p: PatternGraph,
    g: DataGraph,
    m: MatchRelation | None = None,
) -> QualityReport:
    """Full quality report; computes the relation when none is supplied."""
    sub = (
        team
        if isinstance(team, Subgraph)
        else Subgraph(frozenset(team.nodes), team.edges)
    )
    if m is None:
        m = relation_over_subgraph(p, sub, g)
    diam, warned = diameter_report(sub)
    return QualityReport(
        diameter=diam,
        diameter_warning=warned,
        density=Density(len(sub.edges), len(sub.nodes)),
        node_sat=node_satisfiability(m, p),
        edge_sat=edge_satisfiability(sub, m, p),
    )
