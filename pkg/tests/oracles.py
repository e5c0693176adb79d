"""Independent reference implementations used as test oracles.

Everything here is deliberately naive and, where possible, built on
networkx rather than the package's own primitives, so the two sides of
each check share no code path.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

import networkx as nx

from teamsim.graphs import DataGraph, Density
from teamsim.pattern import PatternGraph
from teamsim.simulation import pattern_satisfiable
from teamsim.topk import Team, TopKList


def to_nx(g: DataGraph) -> nx.Graph:
    G = nx.Graph()
    for v in g.adj:
        G.add_node(v)
    for u, v in g.edges():
        G.add_edge(u, v)
    return G


def naive_max_relation(p: PatternGraph, members, adj, labels):
    """Fixpoint by repeated full rescans with nested loops (no set tricks)."""
    rel = {}
    for u in p.adj:
        rel[u] = {v for v in members if p.label[u] in labels[v]}
    while True:
        changed = False
        for u in p.adj:
            for up in p.adj[u]:
                keep = set()
                for v in rel[u]:
                    ok = False
                    for w in adj[v]:
                        if w in rel[up]:
                            ok = True
                            break
                    if ok:
                        keep.add(v)
                if keep != rel[u]:
                    rel[u] = keep
                    changed = True
        if not changed:
            break
    if any(not s for s in rel.values()):
        return {u: set() for u in p.adj}
    return rel


def naive_ball(g: DataGraph, center: int, t: int):
    """Hop-<=t neighborhood via networkx shortest path lengths."""
    G = to_nx(g)
    depths = nx.single_source_shortest_path_length(G, center, cutoff=t)
    members = set(depths)
    adj = {v: g.adj[v] & members for v in members}
    return members, adj


def naive_ball_teams(p: PatternGraph, g: DataGraph, center: int, r: int):
    """All (t, team) pairs for one center, each radius simulated from scratch."""
    out = []
    for t in range(1, r + 1):
        members, adj = naive_ball(g, center, t)
        rel = naive_max_relation(p, members, adj, g.labels)
        if any(not s for s in rel.values()):
            continue
        sizes_ok = all(len(rel[u]) in p.capacity[u] for u in p.adj)
        if not sizes_ok:
            continue
        nodes = set()
        for s in rel.values():
            nodes |= s
        edges = set()
        for v in nodes:
            for w in adj[v] & nodes:
                edges.add((v, w) if v <= w else (w, v))
        out.append((t, tuple(sorted(nodes)), frozenset(edges)))
    return out


def brute_topk(p: PatternGraph, g: DataGraph, r: int, k: int):
    """TeamF by definition: every center, every radius, naive simulation,
    canonical order, dedupe keeping the smallest (center, t)."""
    if not pattern_satisfiable(p):
        return None
    found: dict[tuple, Team] = {}
    for center in sorted(g.adj):
        for t, nodes, edges in naive_ball_teams(p, g, center, r):
            team = Team(
                nodes=nodes,
                edges=edges,
                density=Density(len(edges), len(nodes)),
                center=center,
                radius=t,
            )
            key = team.identity
            prev = found.get(key)
            if prev is None or (team.center, team.radius) < (prev.center, prev.radius):
                found[key] = team
    topk = TopKList(k)
    for team in found.values():
        topk.insert(team)
    return topk


def exhaustive_densest(g: DataGraph) -> Fraction:
    """Exact densest-subgraph density by subset enumeration (<=16 nodes)."""
    nodes = sorted(g.adj)
    n = len(nodes)
    idx = {v: i for i, v in enumerate(nodes)}
    masks = [0] * n
    for u, v in g.edges():
        masks[idx[u]] |= 1 << idx[v]
        masks[idx[v]] |= 1 << idx[u]
    best = Fraction(0, 1)
    for sub in range(1, 1 << n):
        cnt = bin(sub).count("1")
        e = 0
        m = sub
        while m:
            i = (m & -m).bit_length() - 1
            m &= m - 1
            e += bin(masks[i] & sub).count("1")
        e //= 2
        d = Fraction(e, cnt)
        if d > best:
            best = d
    return best


def nx_max_core_density(g_adj: dict) -> Fraction:
    """Maximum-core density via networkx core numbers."""
    G = nx.Graph()
    G.add_nodes_from(g_adj)
    for v, nbrs in g_adj.items():
        for w in nbrs:
            G.add_edge(v, w)
    core = nx.core_number(G)
    k_max = max(core.values())
    members = {v for v, c in core.items() if c == k_max}
    e = sum(1 for u, v in G.edges() if u in members and v in members)
    return Fraction(e, len(members))


def random_data_graph(rng, n_max=30, avg_deg=3.0, labels=("A", "B", "C")):
    """Seeded random labeled graph (as (labelmap, graph) with int labels)."""
    n = rng.randint(2, n_max)
    lab_ids = {lab: i for i, lab in enumerate(labels)}
    nodes = []
    for v in range(n):
        count = 1 if rng.random() < 0.8 else 2
        labs = rng.sample(list(lab_ids.values()), min(count, len(lab_ids)))
        nodes.append((v, labs))
    g = DataGraph.build(nodes)
    target = int(n * avg_deg / 2)
    tries = 0
    while g.edge_count < target and tries < 20 * target:
        tries += 1
        u = rng.randrange(n)
        v = rng.randrange(n)
        if u != v and not g.has_edge(u, v):
            g.insert_edge(u, v)
    return g


CAP_CHOICES = [(1, 1), (1, 2), (1, None), (2, 3)]


def random_pattern(rng, n_max=6, labels=("A", "B", "C"), cap_choices=CAP_CHOICES):
    """Seeded random connected pattern with capacities from the test family."""
    from teamsim.pattern import Interval

    lab_ids = {lab: i for i, lab in enumerate(labels)}
    n = rng.randint(1, n_max)
    names = [f"u{i}" for i in range(n)]
    nodes = []
    for name in names:
        lo, hi = rng.choice(cap_choices)
        nodes.append((name, rng.choice(list(lab_ids.values())), Interval(lo, hi)))
    edges = []
    for i in range(1, n):
        j = rng.randrange(i)
        edges.append((names[j], names[i]))
    extra = rng.randint(0, n)
    tries = 0
    have = {tuple(sorted(e)) for e in edges}
    while extra > 0 and tries < 20:
        tries += 1
        i, j = rng.randrange(n), rng.randrange(n)
        e = tuple(sorted((names[i], names[j])))
        if i != j and e not in have:
            have.add(e)
            edges.append(e)
            extra -= 1
    return PatternGraph.build(nodes, edges)


def _fresh_pnode(p) -> str:
    i = 0
    while f"w{i}" in p.adj:
        i += 1
    return f"w{i}"


def random_pattern_unit(rng, p, labels=(0, 1, 2), cap_choices=CAP_CHOICES):
    """One structurally valid pattern unit for the current pattern, or None."""
    from teamsim.pattern import Interval
    from teamsim.updates import (
        CapacityChange,
        PEdgeDel,
        PEdgeIns,
        PNodeDel,
        PNodeIns,
        apply_pattern_update,
    )

    kinds = ["e+", "e-", "n+", "n-", "cap"]
    rng.shuffle(kinds)
    nodes = sorted(p.adj)
    for kind in kinds:
        if kind == "e+":
            pairs = [
                (u, v)
                for i, u in enumerate(nodes)
                for v in nodes[i + 1 :]
                if v not in p.adj[u]
            ]
            if pairs:
                return PEdgeIns(*rng.choice(pairs))
        elif kind == "e-" and p.edge_count:
            edges = sorted(tuple(sorted(e)) for e in p.edges())
            rng.shuffle(edges)
            for u, v in edges:
                scratch = p.copy()
                scratch._remove_edge(u, v)
                if scratch.is_connected():
                    return PEdgeDel(u, v)
        elif kind == "n+" and p.node_count < 8:
            lo, hi = rng.choice(cap_choices)
            return PNodeIns(
                _fresh_pnode(p), rng.choice(nodes), rng.choice(labels), Interval(lo, hi)
            )
        elif kind == "n-" and p.node_count > 1:
            cands = list(nodes)
            rng.shuffle(cands)
            for v in cands:
                scratch = p.copy()
                scratch._remove_node(v)
                if scratch.adj and scratch.is_connected():
                    return PNodeDel(v)
        elif kind == "cap":
            lo, hi = rng.choice(cap_choices)
            return CapacityChange(rng.choice(nodes), Interval(lo, hi))
    return None


def random_data_unit(rng, g, labels=(0, 1, 2)):
    """One structurally valid data unit for the current graph, or None."""
    from teamsim.updates import GEdgeDel, GEdgeIns, GNodeDel, GNodeIns

    kinds = ["e+", "e-", "n+", "n-"]
    rng.shuffle(kinds)
    nodes = sorted(g.adj)
    for kind in kinds:
        if kind == "e+" and len(nodes) >= 2:
            for _ in range(30):
                u, v = rng.sample(nodes, 2)
                if not g.has_edge(u, v):
                    return GEdgeIns(u, v)
        elif kind == "e-" and g.edge_count:
            edges = list(g.edges())
            return GEdgeDel(*rng.choice(sorted(edges)))
        elif kind == "n+":
            nid = max(nodes, default=-1) + 1
            count = 1 if rng.random() < 0.8 else 2
            labs = frozenset(rng.sample(list(labels), count))
            return GNodeIns(nid, rng.choice(nodes), labs)
        elif kind == "n-" and len(nodes) > 2:
            return GNodeDel(rng.choice(nodes))
    return None


def random_update_set(rng, g, p, mode):
    """A valid (dp, dg) set of 1-4 units; mode in {'p', 'g', 'both'}."""
    dp, dg = [], []
    n_units = rng.randint(1, 4)
    scratch_p = p.copy()
    scratch_g = g.copy()
    from teamsim.updates import apply_data_update_inplace, apply_pattern_update

    for _ in range(n_units):
        want_p = mode == "p" or (mode == "both" and rng.random() < 0.5)
        if want_p:
            unit = random_pattern_unit(rng, scratch_p)
            if unit is not None:
                apply_pattern_update(scratch_p, unit)
                dp.append(unit)
        else:
            unit = random_data_unit(rng, scratch_g)
            if unit is not None:
                apply_data_update_inplace(scratch_g, unit)
                dg.append(unit)
    return dp, dg
