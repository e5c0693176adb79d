"""Capacity-bounded pattern graphs.

Pattern node ids are strings (they come from user-authored files and
survive interactive edits); every node carries a single label and a
closed capacity interval whose upper end may be unbounded.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator

from .errors import (
    DisconnectedPattern,
    DuplicatePatternEdge,
    DuplicatePatternNode,
    EmptyPattern,
    InvalidInterval,
    MissingPatternEdge,
    SelfLoop,
    UnknownPatternNode,
)
from .graphs import LabelId

PNodeId = str

UNBOUNDED: int | None = None


@dataclass(frozen=True, order=True)
class Interval:
    """Closed capacity interval [lo, hi]; hi=None means unbounded."""

    lo: int
    hi: int | None

    def __post_init__(self) -> None:
        if self.lo < 0:
            raise InvalidInterval(f"lower bound {self.lo} is negative")
        if self.hi is not None and self.hi < self.lo:
            raise InvalidInterval(f"interval [{self.lo},{self.hi}] is reversed")

    def __contains__(self, n: int) -> bool:
        return self.lo <= n and (self.hi is None or n <= self.hi)

    def __str__(self) -> str:
        hi = "*" if self.hi is None else str(self.hi)
        return f"[{self.lo},{hi}]"


@dataclass
class PatternGraph:
    label: dict[PNodeId, LabelId] = field(default_factory=dict)
    capacity: dict[PNodeId, Interval] = field(default_factory=dict)
    adj: dict[PNodeId, set[PNodeId]] = field(default_factory=dict)

    @classmethod
    def build(
        cls,
        nodes: Iterable[tuple[PNodeId, LabelId, Interval]],
        edges: Iterable[tuple[PNodeId, PNodeId]] = (),
    ) -> "PatternGraph":
        p = cls()
        for nid, lab, cap in nodes:
            p._add_node(nid, lab, cap)
        for u, v in edges:
            p._add_edge(u, v)
        p.require_connected()
        return p

    # -- interrogation ------------------------------------------------

    def __contains__(self, nid: PNodeId) -> bool:
        return nid in self.adj

    def nodes(self) -> Iterator[PNodeId]:
        return iter(self.adj)

    @property
    def node_count(self) -> int:
        return len(self.adj)

    @property
    def edge_count(self) -> int:
        return sum(len(s) for s in self.adj.values()) // 2

    @property
    def size(self) -> int:
        return self.node_count + self.edge_count

    def has_edge(self, u: PNodeId, v: PNodeId) -> bool:
        return u in self.adj and v in self.adj[u]

    def edges(self) -> list[tuple[PNodeId, PNodeId]]:
        out = []
        for u, nbrs in self.adj.items():
            for v in nbrs:
                if u <= v:
                    out.append((u, v))
        return out

    def is_connected(self) -> bool:
        if not self.adj:
            return True
        seen = set()
        stack = [next(iter(self.adj))]
        while stack:
            v = stack.pop()
            if v in seen:
                continue
            seen.add(v)
            stack.extend(self.adj[v] - seen)
        return len(seen) == len(self.adj)

    def require_connected(self) -> None:
        if not self.adj:
            raise EmptyPattern("pattern has no nodes")
        if not self.is_connected():
            raise DisconnectedPattern("pattern is not connected")

    # -- mutation (validated wholesale in updates.apply_pattern_update) --

    def _add_node(self, nid: PNodeId, lab: LabelId, cap: Interval) -> None:
        if nid in self.adj:
            raise DuplicatePatternNode(f"pattern node {nid} already present")
        self.adj[nid] = set()
        self.label[nid] = lab
        self.capacity[nid] = cap

    def _remove_node(self, nid: PNodeId) -> list[tuple[PNodeId, PNodeId]]:
        """Remove a node; returns the severed edges."""
        if nid not in self.adj:
            raise UnknownPatternNode(f"pattern node {nid} not present")
        severed = [(nid, w) for w in sorted(self.adj[nid])]
        for w in self.adj[nid]:
            self.adj[w].discard(nid)
        del self.adj[nid]
        del self.label[nid]
        del self.capacity[nid]
        return severed

    def _add_edge(self, u: PNodeId, v: PNodeId) -> None:
        if u == v:
            raise SelfLoop(f"pattern self-loop on {u}")
        for x in (u, v):
            if x not in self.adj:
                raise UnknownPatternNode(f"pattern node {x} not present")
        if v in self.adj[u]:
            raise DuplicatePatternEdge(f"pattern edge ({u},{v}) already present")
        self.adj[u].add(v)
        self.adj[v].add(u)

    def _remove_edge(self, u: PNodeId, v: PNodeId) -> None:
        for x in (u, v):
            if x not in self.adj:
                raise UnknownPatternNode(f"pattern node {x} not present")
        if v not in self.adj[u]:
            raise MissingPatternEdge(f"pattern edge ({u},{v}) not present")
        self.adj[u].remove(v)
        self.adj[v].remove(u)

    def _set_capacity(self, nid: PNodeId, cap: Interval) -> None:
        if nid not in self.adj:
            raise UnknownPatternNode(f"pattern node {nid} not present")
        self.capacity[nid] = cap

    def copy(self) -> "PatternGraph":
        return PatternGraph(
            label=dict(self.label),
            capacity=dict(self.capacity),
            adj={v: set(s) for v, s in self.adj.items()},
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PatternGraph):
            return NotImplemented
        return (
            self.label == other.label
            and self.capacity == other.capacity
            and self.adj == other.adj
        )

    def induced(self, nodes: Iterable[PNodeId]) -> "PatternGraph":
        """Induced sub-pattern; may be disconnected or empty (fragments)."""
        keep = set(nodes)
        return PatternGraph(
            label={v: self.label[v] for v in keep},
            capacity={v: self.capacity[v] for v in keep},
            adj={v: self.adj[v] & keep for v in keep},
        )
