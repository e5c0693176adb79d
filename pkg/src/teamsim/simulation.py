"""Graph simulation on undirected labeled graphs, plus capacity checks.

All relation-producing functions return the unique maximum match
relation, canonicalized so that "no match" is the relation with every
candidate set empty.  Everything here is a pure function over immutable
inputs and safe to call from per-ball workers.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

from .graphs import Ball, LabelId, NodeId, Subgraph
from .pattern import Interval, PatternGraph, PNodeId

Adjacency = Mapping[NodeId, set[NodeId]]
Labels = Mapping[NodeId, frozenset[LabelId]]


@dataclass
class MatchRelation:
    """Pattern-node -> data-node-set map R(.)."""

    r: dict[PNodeId, set[NodeId]]

    @classmethod
    def empty(cls, pattern_nodes: Iterable[PNodeId]) -> "MatchRelation":
        return cls({u: set() for u in pattern_nodes})

    @property
    def is_empty(self) -> bool:
        return all(not s for s in self.r.values())

    def __getitem__(self, u: PNodeId) -> set[NodeId]:
        return self.r[u]

    def matched_nodes(self) -> set[NodeId]:
        out: set[NodeId] = set()
        for s in self.r.values():
            out |= s
        return out

    def copy(self) -> "MatchRelation":
        return MatchRelation({u: set(s) for u, s in self.r.items()})

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MatchRelation):
            return NotImplemented
        return self.r == other.r

    def canonical(self) -> "MatchRelation":
        if any(not s for s in self.r.values()):
            return MatchRelation.empty(self.r)
        return self


@dataclass(frozen=True)
class PerfectSubgraph:
    """A capacity-satisfying match graph together with its provenance."""

    team: Subgraph
    relation: MatchRelation
    source_ball: tuple[NodeId, int]  # (center, radius it was found at)


def _refine_to_fixpoint(
    r: dict[PNodeId, set[NodeId]],
    p_adj: Mapping[PNodeId, set[PNodeId]],
    adj: Adjacency,
) -> dict[PNodeId, set[NodeId]] | None:
    """Remove candidates violating the neighbor condition until stable.

    Starting from any superset of the maximum relation this converges to
    the maximum relation itself; returns None as soon as any candidate
    set empties.
    """
    changed = True
    while changed:
        changed = False
        for u, pnbrs in p_adj.items():
            ru = r[u]
            for up in pnbrs:
                rup = r[up]
                dead = [v for v in ru if adj[v].isdisjoint(rup)]
                if dead:
                    ru.difference_update(dead)
                    if not ru:
                        return None
                    changed = True
    return r


def max_simulation(p: PatternGraph, adj: Adjacency, labels: Labels) -> MatchRelation:
    """Maximum match relation of a pattern (or fragment) over a scope.

    The scope is any adjacency map with a label map; fragments may be
    disconnected or even empty (an empty fragment matches vacuously with
    an empty candidate map).
    """
    r: dict[PNodeId, set[NodeId]] = {}
    for u in p.adj:
        lu = p.label[u]
        cand = {v for v in adj if lu in labels[v]}
        if not cand:
            return MatchRelation.empty(p.adj)
        r[u] = cand
    refined = _refine_to_fixpoint(r, p.adj, adj)
    if refined is None:
        return MatchRelation.empty(p.adj)
    return MatchRelation(refined)


def simulate_ball(p: PatternGraph, b: Ball) -> MatchRelation:
    return max_simulation(p, b.adj, b.labels)


def capacities_ok(p: PatternGraph, m: MatchRelation) -> bool:
    """True iff every candidate-set size falls into its capacity interval."""
    for u, cap in p.capacity.items():
        if len(m.r[u]) not in cap:
            return False
    return True


def build_perfect_subgraph(
    b: Ball, m: MatchRelation, radius: int
) -> PerfectSubgraph:
    team = b.subgraph(m.matched_nodes())
    return PerfectSubgraph(team=team, relation=m, source_ball=(b.center, radius))


def match_ball(p: PatternGraph, b: Ball) -> PerfectSubgraph | None:
    """Team match of a pattern in one ball: simulate, then check capacities."""
    m = simulate_ball(p, b)
    if m.is_empty or not capacities_ok(p, m):
        return None
    return build_perfect_subgraph(b, m, b.radius)


def shrink_relation(
    outer: MatchRelation, p: PatternGraph, b: Ball, t: int
) -> MatchRelation:
    """Maximum relation on the inner ball of radius t < the outer radius.

    Derived incrementally: drop members beyond hop t, then propagate
    removals.  Candidate sets stay inside the inner member set, so the
    neighbor checks need no restricted adjacency.
    """
    inner = {v for v, h in b.hops.items() if h <= t}
    r = {u: s & inner for u, s in outer.r.items()}
    if any(not s for s in r.values()):
        return MatchRelation.empty(p.adj)
    refined = _refine_to_fixpoint(r, p.adj, b.adj)
    if refined is None:
        return MatchRelation.empty(p.adj)
    return MatchRelation(refined)


def refine_edge_insertion(
    m: MatchRelation,
    adj: Adjacency,
    e: tuple[PNodeId, PNodeId],
    propagation_adj: Mapping[PNodeId, set[PNodeId]],
) -> MatchRelation:
    """Update a maximum relation after a pattern edge insertion.

    Seeds removal with candidates that lack a neighbor across the new
    edge, then cascades removals over ``propagation_adj`` (the edge set
    of the updated pattern; for cross-fragment enforcement pass the full
    pattern's edges).  Equals a from-scratch simulation of the pattern
    with the edge added.
    """
    u, up = e
    r = {x: set(s) for x, s in m.r.items()}
    stack: list[tuple[PNodeId, NodeId]] = []
    for w in r[u]:
        if adj[w].isdisjoint(r[up]):
            stack.append((u, w))
    for w in r[up]:
        if adj[w].isdisjoint(r[u]):
            stack.append((up, w))
    while stack:
        x, w = stack.pop()
        rx = r[x]
        if w not in rx:
            continue
        rx.remove(w)
        if not rx:
            return MatchRelation.empty(r)
        for x2 in propagation_adj[x]:
            rx2 = r.get(x2)
            if rx2 is None:
                # propagation edge into a pattern node whose insertion has
                # not been replayed yet; its constraints come later
                continue
            for w2 in adj[w] & rx2:
                if adj[w2].isdisjoint(rx):
                    stack.append((x2, w2))
    return MatchRelation(r)


def self_simulation(p: PatternGraph) -> dict[PNodeId, set[PNodeId]]:
    """Maximum relation of the pattern over itself (labels as singletons,
    capacities ignored)."""
    labels = {v: frozenset((p.label[v],)) for v in p.adj}
    rel = max_simulation(p, p.adj, labels)
    return rel.r


def simulation_classes(m: dict[PNodeId, set[PNodeId]]) -> list[set[PNodeId]]:
    """Mutual-simulation equivalence classes of the self-simulation."""
    seen: set[PNodeId] = set()
    classes = []
    for u in m:
        if u in seen:
            continue
        cls = {v for v in m[u] if u in m[v]} | {u}
        seen |= cls
        classes.append(cls)
    return classes


def class_floor(p: PatternGraph, cls: set[PNodeId]) -> int:
    """Smallest candidate-set size a mutual-simulation class can have in
    any matching graph: at least every member's lower bound, and at
    least two when the class contains a pattern edge (those candidates
    then need neighbors inside the shared set; self-loops are excluded).
    """
    lo = max(max(1, p.capacity[u].lo) for u in cls)
    internal_edge = any(p.adj[u] & cls for u in cls)
    return max(lo, 2) if internal_edge else lo


def pattern_satisfiable(p: PatternGraph) -> bool:
    """Decide whether any data graph can match the pattern.

    Because simulations compose, v standing in for u forces
    R(v) <= R(u) in every graph, and mutually-simulating nodes share one
    candidate set.  So for each pair (u, v) of the self-simulation, u's
    upper bound must cover the smallest size v's whole equivalence class
    can take (its members' lower bounds, and 2 when the class carries a
    pattern edge).  The pairwise bound check lower(f(v)) <= upper(f(u))
    is the special case of a free class.

    This is necessary by the containment argument; its exactness on
    small patterns is validated against an exhaustive witness search in
    the test suite.
    """
    m = self_simulation(p)
    if any(not s for s in m.values()):
        # Cannot happen for well-formed patterns (identity simulates),
        # kept as a guard for degenerate inputs.
        return False
    floor_of: dict[PNodeId, int] = {}
    for cls in simulation_classes(m):
        f = class_floor(p, cls)
        for u in cls:
            floor_of[u] = f
    for u, sims in m.items():
        hi = p.capacity[u].hi
        if hi is None:
            continue
        for v in sims:
            if floor_of[v] > hi:
                return False
    return True
