"""Incremental engine: one session owns a graph, a pattern, its
fragmentation, and the match index, and answers top-k queries across
arbitrary sequences of pattern/data update sets.

Per update set the engine
1. validates both update lists and applies them atomically,
2. recomputes fragment relations and density bounds for every ball whose
   structure the data updates touched (there is no lazy repair for data
   changes, unlike pattern changes which the update planner defers),
3. selects candidate balls: buckets whose type code covers the current
   filtering code (pattern side) plus the structural set, and
4. scans candidates in decreasing density-bound order, repairing stale
   fragment relations on the way, combining full matchers into teams,
   and emitting the final list early once no remaining bound can beat
   the k-th density (remaining balls still get repaired before the call
   returns).

The result after every set equals a from-scratch batch run on the
evolved pattern and graph, including provenance and tie-breaks.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from time import perf_counter

from .batch import teams_from_relation
from .errors import UnknownNode
from .fragmentation import UpdateTarget, classify_update, fragment_pattern
from .graphs import (
    DataGraph,
    Density,
    ball_extract,
    ball_from_members,
    ball_members,
    max_core_density,
)
from .index import (
    FbmIndex,
    build_index,
    fragment_relations,
    fragment_relations_from_members,
)
from .pattern import PatternGraph
from .simulation import (
    MatchRelation,
    _refine_to_fixpoint,
    max_simulation,
    pattern_satisfiable,
    refine_edge_insertion,
)
from .topk import TopKList
from .updates import (
    CapacityChange,
    DataUpdate,
    GEdgeDel,
    GEdgeIns,
    GNodeDel,
    GNodeIns,
    PatternUpdate,
    PEdgeDel,
    PEdgeIns,
    PNodeDel,
    PNodeIns,
    _UNDO_EDGE_INS,
    _UNDO_NODE_INS,
    apply_data_updates,
    apply_pattern_update,
    validate_pattern_updates,
)


@dataclass
class ApplyStats:
    affected: int = 0
    structural: int = 0
    balls_visited: int = 0
    balls_gated: int = 0
    relations_recomputed: int = 0
    relations_refined: int = 0
    wall_ms: float = 0.0
    emit_ms: float | None = None
    visited_centers: set[int] = field(default_factory=set)
    structural_centers: set[int] = field(default_factory=set)

    def touch(self, center: int, debug: bool) -> None:
        self.visited_centers.add(center)

    def seal(self, debug: bool) -> None:
        self.balls_visited = len(self.visited_centers)
        if not debug:
            self.visited_centers = set()


@dataclass
class QueryResult:
    teams: TopKList
    satisfiable: bool
    early_returned: bool
    stats: ApplyStats


class Session:
    """Single-writer incremental engine over one (pattern, graph) pair."""

    def __init__(
        self,
        g: DataGraph,
        p: PatternGraph,
        r: int = 2,
        k: int = 10,
        h: int = 3,
        *,
        early_return: bool = True,
        collect_debug: bool = True,
    ):
        if r < 1 or k < 1:
            raise ValueError("r and k must be positive")
        self.g = g.copy()
        self.p = p.copy()
        self.r = r
        self.k = k
        self.h = min(h, self.p.node_count)
        self.early_return = early_return
        self.collect_debug = collect_debug
        self.frag = fragment_pattern(self.p, self.h)
        self.label_index = self.g.label_index()
        self.idx = build_index(self.p, self.frag, self.g, r, require_satisfiable=False)
        self.satisfiable = pattern_satisfiable(self.p)
        self.totals = {
            "sets": 0,
            "balls_visited": 0,
            "relations_recomputed": 0,
            "relations_refined": 0,
        }
        # teams per combined ball, reused while pattern, ball structure,
        # and fragment relations are all unchanged
        self._team_cache: dict[int, list] = {}
        self.last = self._initial_result()

    # -- public API ------------------------------------------------------

    def query(self, k: int | None = None) -> QueryResult:
        """Recombine current state without applying updates."""
        return self.apply([], [], k=k)

    def apply(
        self,
        dp: list[PatternUpdate],
        dg: list[DataUpdate],
        k: int | None = None,
    ) -> QueryResult:
        t0 = perf_counter()
        k = self.k if k is None else k
        stats = ApplyStats()

        # -- atomic validation + application ---------------------------
        validate_pattern_updates(self.p, dp)
        records = apply_data_updates(self.g, dg)

        if dp:
            # capacity, cut, and fragment edits all change what combine
            # produces, so cached per-ball teams are void wholesale
            self._team_cache.clear()
        for unit in dp:
            cls = classify_update(self.frag, self.p, unit)
            self.idx.bf_apply(unit, cls.target)
            self.idx.up.record(unit, cls.target)
            for a, b in cls.severed_cut_edges:
                self.idx.up.record(PEdgeDel(a, b), UpdateTarget.CUT)
            apply_pattern_update(self.p, unit)
        if dp:
            self.satisfiable = pattern_satisfiable(self.p)
        counter = self.idx.up.counter
        fragments = self._current_fragments()

        # -- data-side maintenance (mandatory, not lazily deferrable) ---
        # Relations of restructured balls are recomputed now; the density
        # bound is only refreshed for balls that can reach the combine
        # step this round (full matchers), the rest carry a stale flag
        # and settle the debt when they next enter a scan.
        structural: set[int] = set()
        ball_cache: dict[int, object] = {}
        if dg:
            dropped = {
                rec[1]: rec[2] for rec in records if rec[0] == _UNDO_NODE_INS
            }
            for unit in dg:
                if isinstance(unit, GNodeDel):
                    self.idx.retire_ball(unit.node)
                    self._team_cache.pop(unit.node, None)
                    for lab in dropped.get(unit.node, ()):
                        self.label_index.get(lab, set()).discard(unit.node)
                elif isinstance(unit, GNodeIns):
                    for lab in unit.labels:
                        self.label_index.setdefault(lab, set()).add(unit.node)
            structural = self._structural_centers(dg, records)
            stats.structural = len(structural)
            if self.collect_debug:
                stats.structural_centers = set(structural)
            for c in sorted(structural):
                members = ball_members(self.g, c, self.r)
                rels, vac, ball = fragment_relations_from_members(
                    fragments, self.g, c, self.r, members, self.label_index
                )
                stats.relations_recomputed += sum(
                    1 for i in rels if not rels[i].is_empty
                ) or len(rels)
                stats.touch(c, self.collect_debug)
                full = self._is_full_match(rels, vac, fragments)
                if full:
                    if ball is None:
                        ball = ball_from_members(self.g, c, self.r, members)
                    ball_cache[c] = ball
                    den = max_core_density(ball).doubled()
                    stale = False
                else:
                    prev = self.idx.bs.get(c)
                    den = prev.den if prev is not None else Density(0, 1)
                    stale = True
                self._team_cache.pop(c, None)
                if c in self.idx.bs:
                    st = self.idx.bs[c]
                    st.den = den
                    st.den_stale = stale
                    self.idx.relink(c, rels, vac, counter)
                else:
                    self.idx.add_ball(c, rels, vac, den, cflag=counter, den_stale=stale)

        # -- unsatisfiable: state advanced, result flagged --------------
        if not self.satisfiable:
            stats.affected = len(structural)
            stats.seal(self.collect_debug)
            stats.wall_ms = (perf_counter() - t0) * 1e3
            res = QueryResult(TopKList(k), False, False, stats)
            self._finish(res, stats)
            return res

        # -- candidate selection ----------------------------------------
        if dp:
            pattern_affected = self.idx.affected_by_pattern()
        else:
            pattern_affected = self.idx.full_match_centers()
        candidates = pattern_affected | structural
        stats.affected = len(candidates)

        # -- scan assembly ----------------------------------------------
        # Only balls that are currently full matchers, or that have
        # pending fragment deletions (relations can grow back), can yield
        # teams; everything else with pending work is repaired after the
        # result is known ("background" half of the early return).
        scan: list[tuple[int, dict]] = []
        repair_only: list[tuple[int, dict]] = []
        all_ones = self.idx.all_ones
        for c in candidates:
            st = self.idx.bs[c]
            pending = self._pending_map(st.cflag)
            has_del = any(
                isinstance(u, (PEdgeDel, PNodeDel))
                for todo in pending.values()
                for _, u in todo
            )
            if has_del or self.idx.bucket_of(c) == all_ones:
                scan.append((c, pending))
            elif pending:
                repair_only.append((c, pending))

        # settle stale density bounds before ordering by them
        for c, _ in scan:
            st = self.idx.bs[c]
            if st.den_stale:
                ball = ball_cache.get(c)
                if ball is None:
                    ball = ball_extract(self.g, c, self.r)
                    ball_cache[c] = ball
                st.den = max_core_density(ball).doubled()
                st.den_stale = False
        scan.sort(
            key=lambda item: (
                -Fraction(
                    self.idx.bs[item[0]].den.edge_count,
                    self.idx.bs[item[0]].den.node_count,
                ),
                item[0],
            )
        )

        # -- gated combine over the scan set ------------------------------
        topk = TopKList(k)
        early = False
        for c, pending in scan:
            st = self.idx.bs[c]
            if not early and self.early_return and len(topk) >= k:
                kth = topk.kth_density()
                if kth is not None and st.den < kth:
                    early = True
                    stats.emit_ms = (perf_counter() - t0) * 1e3
            if early:
                stats.balls_gated += 1
                if pending:
                    self._repair(c, pending, fragments, counter, stats, ball_cache)
                continue
            if pending:
                rels, vac = self._repair(c, pending, fragments, counter, stats, ball_cache)
            else:
                rels, vac = self.idx.stored_relations(c), self._vacuous(fragments)
            if self._is_full_match(rels, vac, fragments):
                teams = self._team_cache.get(c)
                if teams is None:
                    ball = ball_cache.get(c)
                    if ball is None:
                        ball = ball_extract(self.g, c, self.r)
                    full = self._combine(ball, rels, fragments)
                    teams = (
                        []
                        if full is None
                        else teams_from_relation(self.p, ball, full, self.r)
                    )
                    self._team_cache[c] = teams
                stats.touch(c, self.collect_debug)
                for team in teams:
                    topk.insert(team)

        for c, pending in repair_only:
            self._repair(c, pending, fragments, counter, stats, ball_cache)

        self.idx.up.compact(self.idx.min_cflag())
        stats.seal(self.collect_debug)
        stats.wall_ms = (perf_counter() - t0) * 1e3
        res = QueryResult(topk, True, early, stats)
        self._finish(res, stats)
        return res

    def rebuild(self, h: int | None = None) -> QueryResult:
        """Re-fragment the current pattern and rebuild the whole index."""
        if h is not None:
            self.h = min(h, self.p.node_count)
        self.frag = fragment_pattern(self.p, self.h)
        self.idx = build_index(self.p, self.frag, self.g, self.r, require_satisfiable=False)
        self.satisfiable = pattern_satisfiable(self.p)
        self._team_cache.clear()
        self.last = self._initial_result()
        return self.last

    # -- internals --------------------------------------------------------

    def _initial_result(self) -> QueryResult:
        res = self.apply([], [])
        return res

    def _finish(self, res: QueryResult, stats: ApplyStats) -> None:
        self.last = res
        self.totals["sets"] += 1
        self.totals["balls_visited"] += stats.balls_visited
        self.totals["relations_recomputed"] += stats.relations_recomputed
        self.totals["relations_refined"] += stats.relations_refined

    def _current_fragments(self) -> dict[int, PatternGraph]:
        return {i: self.frag.fragment(self.p, i) for i in range(self.frag.h)}

    def _vacuous(self, fragments: dict[int, PatternGraph]) -> set[int]:
        return {i for i, f in fragments.items() if not f.adj}

    def _is_full_match(self, rels, vac, fragments) -> bool:
        for i in fragments:
            if i in vac:
                continue
            rel = rels.get(i)
            if rel is None or rel.is_empty:
                return False
        return True

    def _pending_map(self, cflag: int) -> dict[int, list[tuple[int, PatternUpdate]]]:
        out = {}
        for i in range(self.frag.h):
            pending = self.idx.up.pending_for(i, cflag)
            if pending:
                out[i] = pending
        return out

    def _repair(self, center, pending, fragments, counter, stats, ball_cache=None):
        """Bring a ball's stored fragment relations up to the current
        pattern: full resimulation where deletions pend, incremental
        edge-insertion refinement otherwise."""
        self._team_cache.pop(center, None)
        stored = self.idx.stored_relations(center)
        vac = self._vacuous(fragments)
        rels: dict[int, MatchRelation] = {}
        ball = ball_cache.get(center) if ball_cache else None
        stats.touch(center, self.collect_debug)
        for i, sub in fragments.items():
            if i in vac:
                continue
            todo = pending.get(i)
            prev = stored.get(i)
            if not todo:
                rels[i] = prev if prev is not None else MatchRelation.empty(sub.adj)
                continue
            if any(isinstance(u, (PEdgeDel, PNodeDel)) for _, u in todo):
                if ball is None:
                    ball = ball_extract(self.g, center, self.r)
                rels[i] = max_simulation(sub, ball.adj, ball.labels)
                stats.relations_recomputed += 1
                continue
            insertions = [u for _, u in todo if isinstance(u, (PEdgeIns, PNodeIns))]
            if not insertions:
                # capacity changes only: relations untouched
                rels[i] = prev if prev is not None else MatchRelation.empty(sub.adj)
                continue
            if prev is None or prev.is_empty:
                rels[i] = MatchRelation.empty(sub.adj)
                continue
            if ball is None:
                ball = ball_extract(self.g, center, self.r)
            rel = prev.copy()
            for u in insertions:
                if isinstance(u, PNodeIns):
                    rel.r[u.node] = {
                        v for v in ball.adj if u.label in ball.labels[v]
                    }
                    rel = refine_edge_insertion(
                        rel, ball.adj, (u.node, u.anchor), sub.adj
                    )
                else:
                    rel = refine_edge_insertion(rel, ball.adj, (u.u, u.v), sub.adj)
                stats.relations_refined += 1
                if rel.is_empty:
                    break
            if not rel.is_empty:
                # guard sweep: refinements used the final edge set, one
                # stable pass certifies the fixpoint
                refined = _refine_to_fixpoint(
                    {x: set(s) for x, s in rel.r.items()}, sub.adj, ball.adj
                )
                rel = (
                    MatchRelation.empty(sub.adj)
                    if refined is None
                    else MatchRelation(refined)
                )
            rels[i] = rel
        self.idx.relink(center, rels, vac, counter)
        return rels, vac

    def _combine(self, ball, rels, fragments) -> MatchRelation | None:
        """Union the fragment relations and propagate removals over the
        full current edge set (fragment + cut) to reach the pattern's
        maximum relation in this ball."""
        merged: dict = {}
        for i, rel in rels.items():
            for u, s in rel.r.items():
                merged[u] = set(s)
        for u in self.p.adj:
            if u not in merged:
                return None
        refined = _refine_to_fixpoint(merged, self.p.adj, ball.adj)
        if refined is None:
            return None
        return MatchRelation(refined)

    def _structural_centers(self, dg, records) -> set[int]:
        """Centers whose balls the data set may have altered: within r of
        every endpoint of some unit, measured in the union of the old and
        new adjacency (a superset of every intermediate graph, so no
        changed ball escapes)."""
        overlay: dict[int, set[int]] = {}

        def ov_add(a: int, b: int) -> None:
            overlay.setdefault(a, set()).add(b)
            overlay.setdefault(b, set()).add(a)

        for rec in records:
            if rec[0] == _UNDO_EDGE_INS:
                ov_add(rec[1], rec[2])
            elif rec[0] == _UNDO_NODE_INS:
                node, _, incident = rec[1], rec[2], rec[3]
                for w in incident:
                    ov_add(node, w)

        adj = self.g.adj
        # memoizing BFS fronts pays off for clustered sets but would hold
        # O(units * ball) memory on huge ones; cap it
        use_memo = len(dg) <= 10_000
        memo: dict[int, set[int]] = {}

        def reach(src: int) -> set[int]:
            # src may have been deleted by this very set while isolated;
            # the set was validated, so treat it as an empty neighborhood
            cached = memo.get(src)
            if cached is not None:
                return cached
            seen = {src}
            frontier = [src]
            for _ in range(self.r):
                nxt = []
                for v in frontier:
                    nbrs = adj.get(v, ())
                    for w in nbrs:
                        if w not in seen:
                            seen.add(w)
                            nxt.append(w)
                    for w in overlay.get(v, ()):
                        if w not in seen:
                            seen.add(w)
                            nxt.append(w)
                if not nxt:
                    break
                frontier = nxt
            if use_memo:
                memo[src] = seen
            return seen

        marks: set[int] = set()
        for unit in dg:
            if isinstance(unit, (GEdgeIns, GEdgeDel)):
                marks |= reach(unit.u) & reach(unit.v)
            elif isinstance(unit, (GNodeIns, GNodeDel)):
                marks |= reach(unit.node)
        return {c for c in marks if c in adj}
