"""Balanced node partition of a pattern into h fragments plus the cut.

Fragments are induced sub-patterns; the cut is every pattern edge whose
endpoints live in different fragments.  The partition is produced by
seeded BFS growth from pairwise-distant high-degree seeds and improved
by single-node swaps that strictly decrease the cut, under the size cap
ceil(n/h) + 1.  Everything is deterministic for a given input.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import InvalidH, UnknownPatternNode
from .pattern import PatternGraph, PNodeId


@dataclass
class Fragmentation:
    h: int
    assignment: dict[PNodeId, int] = field(default_factory=dict)  # node -> [0, h)

    def fragment_nodes(self, i: int) -> set[PNodeId]:
        return {v for v, f in self.assignment.items() if f == i}

    def fragment(self, p: PatternGraph, i: int) -> PatternGraph:
        """Induced sub-pattern of fragment i under the current pattern."""
        return p.induced(self.fragment_nodes(i))

    def cut_edges(self, p: PatternGraph) -> list[tuple[PNodeId, PNodeId]]:
        out = []
        for u, v in p.edges():
            if self.assignment[u] != self.assignment[v]:
                out.append((u, v))
        return out

    def cut_size(self, p: PatternGraph) -> int:
        return len(self.cut_edges(p))

    def validate(self, p: PatternGraph) -> None:
        if set(self.assignment) != set(p.adj):
            raise ValueError("assignment does not cover the pattern nodes")
        if any(not (0 <= f < self.h) for f in self.assignment.values()):
            raise ValueError("fragment index out of range")


def _bfs_hops(p: PatternGraph, src: PNodeId) -> dict[PNodeId, int]:
    hops = {src: 0}
    frontier = [src]
    d = 0
    while frontier:
        d += 1
        nxt = []
        for v in frontier:
            for w in p.adj[v]:
                if w not in hops:
                    hops[w] = d
                    nxt.append(w)
        frontier = nxt
    return hops


def _pick_seeds(p: PatternGraph, h: int) -> list[PNodeId]:
    nodes = sorted(p.adj)
    first = max(nodes, key=lambda v: (len(p.adj[v]), _rev(v)))
    seeds = [first]
    hop_maps = [_bfs_hops(p, first)]
    while len(seeds) < h:
        best = None
        best_key = None
        for v in nodes:
            if v in seeds:
                continue
            dist = min(hm.get(v, p.node_count) for hm in hop_maps)
            key = (dist, len(p.adj[v]), _rev(v))
            if best_key is None or key > best_key:
                best, best_key = v, key
        seeds.append(best)
        hop_maps.append(_bfs_hops(p, best))
    return seeds


class _Rev:
    """Reversing wrapper so max() prefers the smaller id on ties."""

    __slots__ = ("v",)

    def __init__(self, v):
        self.v = v

    def __lt__(self, other):
        return self.v > other.v

    def __eq__(self, other):
        return self.v == other.v


def _rev(v: PNodeId) -> _Rev:
    return _Rev(v)


def fragment_pattern(p: PatternGraph, h: int) -> Fragmentation:
    """h-fragmentation via seeded growth plus swap refinement.

    Guarantees: valid partition, max fragment size <= ceil(n/h) + 1,
    refinement never increases the cut, deterministic output.
    """
    n = p.node_count
    if not 1 <= h <= n:
        raise InvalidH(f"h={h} outside [1, {n}]")
    cap = math.ceil(n / h) + 1
    seeds = _pick_seeds(p, h)
    assignment = {s: i for i, s in enumerate(seeds)}
    queues = [sorted(p.adj[s]) for s in seeds]
    sizes = [1] * h
    # Round-robin growth, smallest fragment first, one claim per turn.
    while len(assignment) < n:
        order = sorted(range(h), key=lambda i: (sizes[i], i))
        grew = False
        for i in order:
            if sizes[i] >= cap:
                continue
            claim = None
            q = queues[i]
            while q:
                v = q.pop(0)
                if v not in assignment:
                    claim = v
                    break
            if claim is None:
                continue
            assignment[claim] = i
            sizes[i] += 1
            queues[i].extend(sorted(p.adj[claim]))
            grew = True
            if len(assignment) == n:
                break
        if not grew:
            # Orphans (frontier exhausted): hand to the smallest fragment.
            leftover = sorted(set(p.adj) - set(assignment))
            for v in leftover:
                i = min(range(h), key=lambda i: (sizes[i], i))
                assignment[v] = i
                sizes[i] += 1
            break
    frag = Fragmentation(h=h, assignment=assignment)
    _refine(p, frag, cap)
    frag.validate(p)
    return frag


def _refine(p: PatternGraph, frag: Fragmentation, cap: int) -> None:
    """First-improvement single-node moves that strictly shrink the cut."""
    sizes = [0] * frag.h
    for f in frag.assignment.values():
        sizes[f] += 1
    improved = True
    while improved:
        improved = False
        for v in sorted(frag.assignment):
            cur = frag.assignment[v]
            if sizes[cur] <= 1:
                continue
            counts = [0] * frag.h
            for w in p.adj[v]:
                counts[frag.assignment[w]] += 1
            for tgt in range(frag.h):
                if tgt == cur or sizes[tgt] >= cap:
                    continue
                if counts[tgt] > counts[cur]:
                    frag.assignment[v] = tgt
                    sizes[cur] -= 1
                    sizes[tgt] += 1
                    improved = True
                    break
    # (moving v from cur to tgt changes the cut by counts[cur]-counts[tgt])


class UpdateTarget:
    """Where a pattern update lands: a fragment index or the cut."""

    CUT = -1


@dataclass(frozen=True)
class Classified:
    """Routing of one unit update plus cut deletions derived from it."""

    target: int  # fragment index, or UpdateTarget.CUT
    severed_cut_edges: tuple[tuple[PNodeId, PNodeId], ...] = ()


def classify_update(f: Fragmentation, p: PatternGraph, u) -> Classified:
    """Route a unit pattern update to a fragment or the cut.

    ``p`` is the pattern state *before* the update is applied.  Node
    insertions join the anchor's fragment (extending the assignment);
    node deletions land in the owner fragment, with severed cross-
    fragment edges reported so they can be recorded as cut deletions.
    """
    from .updates import CapacityChange, PEdgeIns, PEdgeDel, PNodeIns, PNodeDel

    a = f.assignment
    if isinstance(u, (PEdgeIns, PEdgeDel)):
        for x in (u.u, u.v):
            if x not in a:
                raise UnknownPatternNode(f"pattern node {x} not present")
        if a[u.u] == a[u.v]:
            return Classified(a[u.u])
        return Classified(UpdateTarget.CUT)
    if isinstance(u, CapacityChange):
        if u.node not in a:
            raise UnknownPatternNode(f"pattern node {u.node} not present")
        return Classified(a[u.node])
    if isinstance(u, PNodeIns):
        if u.anchor not in a:
            raise UnknownPatternNode(f"anchor {u.anchor} not present")
        target = a[u.anchor]
        f.assignment[u.node] = target
        return Classified(target)
    if isinstance(u, PNodeDel):
        if u.node not in a:
            raise UnknownPatternNode(f"pattern node {u.node} not present")
        target = a[u.node]
        severed = tuple(
            (u.node, w) for w in sorted(p.adj[u.node]) if a[w] != target
        )
        del f.assignment[u.node]
        return Classified(target, severed)
    raise TypeError(f"not a pattern update: {u!r}")
