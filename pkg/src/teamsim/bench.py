"""Benchmark harness: incremental maintenance vs batch re-runs.

Update sets are sampled with locality: units concentrate in a window of
communities whose span grows with the update ratio, mirroring how real
collaboration networks evolve (activity clusters, it does not spray
uniformly).  Uniform sampling at realistic densities touches nearly
every ball even at tiny ratios, which would measure nothing but the
batch path twice.

Ratios are measured against the graph size |G| = |V| + |E| for data
updates and against |P| = |V_P| + |E_P| for pattern updates, matching
how the sweep percentages are usually quoted.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from time import perf_counter

from .batch import batch_topk
from .engine import Session
from .generate import GenConfig, community_span, gen_pattern, gen_planted
from .graphs import DataGraph
from .pattern import Interval, PatternGraph
from .updates import (
    CapacityChange,
    GEdgeDel,
    GEdgeIns,
    GNodeDel,
    GNodeIns,
    PEdgeDel,
    PEdgeIns,
    PNodeDel,
    PNodeIns,
)


@dataclass
class BenchRow:
    kind: str
    ratio: float
    batch_ms: float
    inc_ms: float
    speedup: float
    affected: int
    structural: int
    teams: int
    early_returned: bool

    def csv(self) -> str:
        return (
            f"{self.kind},{self.ratio:.4f},{self.batch_ms:.1f},{self.inc_ms:.1f},"
            f"{self.speedup:.2f},{self.affected},{self.structural},{self.teams},"
            f"{int(self.early_returned)}"
        )


CSV_HEADER = "kind,ratio,batch_ms,inc_ms,speedup,affected,structural,teams,early_returned"


def sample_data_units(
    rng: random.Random,
    g: DataGraph,
    cfg: GenConfig,
    count: int,
    ratio: float,
) -> list:
    """Mixed data units (4 types, roughly equal) inside a community window
    covering ~ratio of the graph.

    Churn is peripheral-biased: removals prefer weakly-embedded (low
    degree) nodes and their edges, the way collaboration networks
    actually shed members, while insertions attach anywhere in the
    active window.
    """
    window = max(1, int(round(cfg.communities * min(1.0, ratio * 1.5))))
    first = rng.randrange(max(1, cfg.communities - window + 1))
    lo = community_span(cfg, first)[0]
    hi = community_span(cfg, min(cfg.communities - 1, first + window - 1))[1]
    pool = [v for v in range(lo, hi) if v in g.adj]
    if not pool:
        pool = sorted(g.adj)[: max(2, count)]
    units: list = []
    scratch = {v: set(g.adj[v]) for v in pool}
    # new members mirror their anchor's expertise: label choices come
    # from the anchor's own community, not the whole active window
    new_labels: dict[int, frozenset] = {}
    next_id = max(g.adj) + 1
    alive = list(pool)
    alive_set = set(pool)

    def pick_alive() -> int:
        while True:
            v = rng.choice(alive)
            if v in alive_set:
                return v

    def pick_peripheral() -> int:
        best = None
        for _ in range(6):
            v = pick_alive()
            if best is None or len(scratch.get(v, ())) < len(scratch.get(best, ())):
                best = v
        return best

    for _ in range(count):
        kind = rng.randrange(4)
        if kind == 0 and len(alive_set) >= 2:  # edge insertion
            for _ in range(20):
                u, v = pick_alive(), pick_alive()
                if u != v and v not in scratch.get(u, ()):
                    scratch.setdefault(u, set()).add(v)
                    scratch.setdefault(v, set()).add(u)
                    units.append(GEdgeIns(u, v))
                    break
        elif kind == 1:  # edge deletion, biased to a low-degree endpoint
            for _ in range(20):
                u = pick_peripheral()
                nbrs = scratch.get(u)
                if nbrs:
                    v = min(nbrs) if len(nbrs) < 8 else next(iter(nbrs))
                    nbrs.discard(v)
                    scratch.get(v, set()).discard(u)
                    units.append(GEdgeDel(u, v))
                    break
        elif kind == 2:  # node insertion
            anchor = pick_peripheral()
            anchor_labels = sorted(new_labels.get(anchor) or g.labels.get(anchor, ()))
            if not anchor_labels:
                anchor_labels = [rng.randrange(cfg.l)]
            labs = frozenset({rng.choice(anchor_labels)})
            units.append(GNodeIns(next_id, anchor, labs))
            new_labels[next_id] = labs
            scratch[next_id] = {anchor}
            scratch.setdefault(anchor, set()).add(next_id)
            alive.append(next_id)
            alive_set.add(next_id)
            next_id += 1
        elif len(alive_set) > 2:  # node deletion, peripheral bias
            v = pick_peripheral()
            alive_set.discard(v)
            for w in scratch.pop(v, set()):
                scratch.get(w, set()).discard(v)
            units.append(GNodeDel(v))
    return units


def sample_pattern_units(rng: random.Random, p: PatternGraph, count: int) -> list:
    """Mixed pattern units (5 types) that keep the pattern valid."""
    units: list = []
    scratch = p.copy()
    labels = sorted(set(scratch.label.values()))
    fresh = 0
    for _ in range(count):
        kinds = ["e+", "e-", "n+", "n-", "cap"]
        rng.shuffle(kinds)
        for kind in kinds:
            nodes = sorted(scratch.adj)
            if kind == "e+":
                pairs = [
                    (u, v)
                    for i, u in enumerate(nodes)
                    for v in nodes[i + 1 :]
                    if v not in scratch.adj[u]
                ]
                if pairs:
                    u, v = rng.choice(pairs)
                    scratch._add_edge(u, v)
                    units.append(PEdgeIns(u, v))
                    break
            elif kind == "e-" and scratch.edge_count:
                edges = sorted(tuple(sorted(e)) for e in scratch.edges())
                rng.shuffle(edges)
                hit = None
                for u, v in edges:
                    probe = scratch.copy()
                    probe._remove_edge(u, v)
                    if probe.is_connected():
                        hit = (u, v)
                        break
                if hit:
                    scratch._remove_edge(*hit)
                    units.append(PEdgeDel(*hit))
                    break
            elif kind == "n+" and labels:
                name = f"bench{fresh}"
                fresh += 1
                anchor = rng.choice(nodes)
                cap = Interval(1, rng.choice([2, 5, 10]))
                lab = rng.choice(labels)
                scratch._add_node(name, lab, cap)
                scratch._add_edge(name, anchor)
                units.append(PNodeIns(name, anchor, lab, cap))
                break
            elif kind == "n-" and scratch.node_count > 2:
                cands = list(nodes)
                rng.shuffle(cands)
                hit = None
                for v in cands:
                    probe = scratch.copy()
                    probe._remove_node(v)
                    if probe.adj and probe.is_connected():
                        hit = v
                        break
                if hit:
                    scratch._remove_node(hit)
                    units.append(PNodeDel(hit))
                    break
            elif kind == "cap":
                v = rng.choice(nodes)
                cap = Interval(1, rng.choice([1, 2, 5, 10, None]))
                scratch._set_capacity(v, cap)
                units.append(CapacityChange(v, cap))
                break
    return units


def measure_set(session: Session, dp: list, dg: list, kind: str, ratio: float) -> BenchRow:
    """Apply one update set incrementally, then re-run batch on the evolved
    state; both sides timed, results asserted equal."""
    res = session.apply(dp, dg)
    inc_ms = res.stats.wall_ms
    t0 = perf_counter()
    ref = batch_topk(session.p, session.g, session.r, session.k)
    batch_ms = (perf_counter() - t0) * 1e3
    assert ref.satisfiable == res.satisfiable
    if res.satisfiable and not (res.teams == ref.teams):
        raise AssertionError("incremental result diverged from batch re-run")
    return BenchRow(
        kind=kind,
        ratio=ratio,
        batch_ms=batch_ms,
        inc_ms=inc_ms,
        speedup=batch_ms / inc_ms if inc_ms > 0 else float("inf"),
        affected=res.stats.affected,
        structural=res.stats.structural,
        teams=len(res.teams),
        early_returned=res.early_returned,
    )


def pattern_size(p: PatternGraph) -> int:
    return p.node_count + p.edge_count


def graph_size(g: DataGraph) -> int:
    return g.node_count + g.edge_count


def run_sweep(
    cfg: GenConfig,
    *,
    kind: str = "data",
    ratios: tuple[float, ...] = (0.05, 0.15, 0.3, 0.5),
    r: int = 2,
    k: int = 10,
    h: int = 3,
    pattern_nodes: int = 10,
    pattern_edges: int = 12,
    seed: int = 0,
    early_return: bool = True,
    g: DataGraph | None = None,
    p: PatternGraph | None = None,
    session: Session | None = None,
) -> tuple[Session, list[BenchRow]]:
    """Continuous sweep: one session, one update set per ratio, each
    measured against a fresh batch run on the evolved state."""
    rng = random.Random(seed)
    if g is None:
        g = gen_planted(cfg)
    if p is None:
        p = gen_pattern(cfg, pattern_nodes, pattern_edges, (1, 10), seed=seed, community=0)
    if session is None:
        session = Session(g, p, r=r, k=k, h=h, early_return=early_return, collect_debug=False)
    rows = []
    for ratio in ratios:
        dp: list = []
        dg: list = []
        if kind in ("pattern", "both"):
            dp = sample_pattern_units(rng, session.p, max(1, round(ratio * pattern_size(session.p))))
        if kind in ("data", "both"):
            dg = sample_data_units(rng, session.g, cfg, max(1, round(ratio * graph_size(session.g))), ratio)
        rows.append(measure_set(session, dp, dg, kind, ratio))
    return session, rows
