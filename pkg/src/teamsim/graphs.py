"""Labeled undirected data graphs, balls, subgraphs, and their measures.

Node identifiers are dense integers; label identifiers are interned
integers (see :mod:`teamsim.formats` for the external-name mapping).
Hop distances inside a ball are always shortest-path distances measured
in the full graph the ball was extracted from, not in the ball's induced
subgraph (the two can differ; the former is what the matching semantics
use).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import total_ordering
from typing import Iterable, Iterator

from .errors import (
    Disconnected,
    DuplicateEdge,
    DuplicateNode,
    EmptySubgraph,
    MissingEdge,
    SelfLoop,
    UnknownNode,
)

NodeId = int
LabelId = int
Edge = tuple[NodeId, NodeId]


def norm_edge(u: NodeId, v: NodeId) -> Edge:
    """Canonical (small, large) form of an undirected edge."""
    return (u, v) if u <= v else (v, u)


@total_ordering
@dataclass(frozen=True)
class Density:
    """Exact density |E|/|V| kept as an integer pair.

    Comparisons cross-multiply so equal rationals with different
    representations compare equal and no float ever enters a tie-break.
    """

    edge_count: int
    node_count: int

    def __post_init__(self) -> None:
        if self.node_count <= 0:
            raise EmptySubgraph("density needs at least one node")
        if self.edge_count < 0:
            raise ValueError("negative edge count")

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Density):
            return NotImplemented
        return self.edge_count * other.node_count == other.edge_count * self.node_count

    def __lt__(self, other: "Density") -> bool:
        return self.edge_count * other.node_count < other.edge_count * self.node_count

    def __hash__(self) -> int:
        # Hash by the reduced fraction so equal densities hash alike.
        from math import gcd

        g = gcd(self.edge_count, self.node_count)
        return hash((self.edge_count // g, self.node_count // g))

    def doubled(self) -> "Density":
        return Density(2 * self.edge_count, self.node_count)

    def __float__(self) -> float:
        return self.edge_count / self.node_count

    def __str__(self) -> str:
        return f"{self.edge_count}/{self.node_count}"


@dataclass
class DataGraph:
    """Undirected labeled graph: symmetric adjacency, >=1 label per node."""

    labels: dict[NodeId, frozenset[LabelId]] = field(default_factory=dict)
    adj: dict[NodeId, set[NodeId]] = field(default_factory=dict)

    @classmethod
    def build(
        cls,
        nodes: Iterable[tuple[NodeId, Iterable[LabelId]]],
        edges: Iterable[tuple[NodeId, NodeId]] = (),
    ) -> "DataGraph":
        g = cls()
        for nid, labs in nodes:
            g.insert_node(nid, labs)
        for u, v in edges:
            g.insert_edge(u, v)
        return g

    # -- interrogation ------------------------------------------------

    def __contains__(self, nid: NodeId) -> bool:
        return nid in self.adj

    def nodes(self) -> Iterator[NodeId]:
        return iter(self.adj)

    @property
    def node_count(self) -> int:
        return len(self.adj)

    @property
    def edge_count(self) -> int:
        return sum(len(s) for s in self.adj.values()) // 2

    def has_edge(self, u: NodeId, v: NodeId) -> bool:
        return u in self.adj and v in self.adj[u]

    def degree(self, v: NodeId) -> int:
        return len(self.adj[v])

    def edges(self) -> Iterator[Edge]:
        for u, nbrs in self.adj.items():
            for v in nbrs:
                if u <= v:
                    yield (u, v)

    # -- mutation (engine-internal; external callers use updates.apply) --

    def insert_node(self, nid: NodeId, labs: Iterable[LabelId]) -> None:
        if nid in self.adj:
            raise DuplicateNode(f"node {nid} already present")
        labset = frozenset(labs)
        if not labset:
            raise ValueError(f"node {nid} needs at least one label")
        self.adj[nid] = set()
        self.labels[nid] = labset

    def delete_node(self, nid: NodeId) -> None:
        if nid not in self.adj:
            raise UnknownNode(f"node {nid} not present")
        for nbr in self.adj[nid]:
            self.adj[nbr].discard(nid)
        del self.adj[nid]
        del self.labels[nid]

    def insert_edge(self, u: NodeId, v: NodeId) -> None:
        if u == v:
            raise SelfLoop(f"self-loop on {u}")
        if u not in self.adj or v not in self.adj:
            missing = u if u not in self.adj else v
            raise UnknownNode(f"node {missing} not present")
        if v in self.adj[u]:
            raise DuplicateEdge(f"edge ({u},{v}) already present")
        self.adj[u].add(v)
        self.adj[v].add(u)

    def delete_edge(self, u: NodeId, v: NodeId) -> None:
        if u not in self.adj or v not in self.adj:
            missing = u if u not in self.adj else v
            raise UnknownNode(f"node {missing} not present")
        if v not in self.adj[u]:
            raise MissingEdge(f"edge ({u},{v}) not present")
        self.adj[u].remove(v)
        self.adj[v].remove(u)

    def copy(self) -> "DataGraph":
        return DataGraph(
            labels=dict(self.labels),
            adj={v: set(s) for v, s in self.adj.items()},
        )

    def label_index(self) -> dict[LabelId, set[NodeId]]:
        """Label -> node-set map, built fresh (callers own its lifetime
        and must refresh it after node insertions/deletions)."""
        out: dict[LabelId, set[NodeId]] = {}
        for v, labs in self.labels.items():
            for lab in labs:
                out.setdefault(lab, set()).add(v)
        return out

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DataGraph):
            return NotImplemented
        return self.labels == other.labels and self.adj == other.adj

    def validate(self) -> None:
        for v, nbrs in self.adj.items():
            if v in nbrs:
                raise SelfLoop(f"self-loop on {v}")
            if not self.labels.get(v):
                raise ValueError(f"node {v} lacks labels")
            for w in nbrs:
                if v not in self.adj.get(w, ()):
                    raise ValueError(f"asymmetric edge ({v},{w})")


@dataclass(frozen=True)
class Subgraph:
    """A node set plus an explicit edge set over it."""

    nodes: frozenset[NodeId]
    edges: frozenset[Edge]

    def __post_init__(self) -> None:
        for u, v in self.edges:
            if u not in self.nodes or v not in self.nodes:
                raise ValueError(f"edge ({u},{v}) leaves the node set")

    @classmethod
    def induced(cls, adj: dict[NodeId, set[NodeId]], nodes: Iterable[NodeId]) -> "Subgraph":
        nodeset = frozenset(nodes)
        edges = set()
        for v in nodeset:
            for w in adj[v] & nodeset:
                edges.add(norm_edge(v, w))
        return cls(nodeset, frozenset(edges))

    def adjacency(self) -> dict[NodeId, set[NodeId]]:
        out: dict[NodeId, set[NodeId]] = {v: set() for v in self.nodes}
        for u, v in self.edges:
            out[u].add(v)
            out[v].add(u)
        return out


@dataclass
class Ball:
    """Radius-bounded hop neighborhood with per-node hop distances.

    ``adj`` is the adjacency induced on the members; ``hops`` maps every
    member to its shortest hop distance from the center in the source
    graph.  ``labels`` is a live view of the source graph's label map.
    """

    center: NodeId
    radius: int
    hops: dict[NodeId, int]
    adj: dict[NodeId, set[NodeId]]
    labels: dict[NodeId, frozenset[LabelId]]

    @property
    def members(self) -> dict[NodeId, int]:
        return self.hops

    @property
    def node_count(self) -> int:
        return len(self.hops)

    @property
    def edge_count(self) -> int:
        return sum(len(s) for s in self.adj.values()) // 2

    def edges(self) -> frozenset[Edge]:
        out = set()
        for u, nbrs in self.adj.items():
            for v in nbrs:
                if u <= v:
                    out.add((u, v))
        return frozenset(out)

    def subgraph(self, nodes: Iterable[NodeId]) -> Subgraph:
        return Subgraph.induced(self.adj, nodes)


def ball_members(g: DataGraph, center: NodeId, r: int) -> dict[NodeId, int]:
    """Hop distances of the radius-r neighborhood (no induced edges yet)."""
    if center not in g.adj:
        raise UnknownNode(f"ball center {center} not present")
    if r < 1:
        raise ValueError("ball radius must be >= 1")
    hops: dict[NodeId, int] = {center: 0}
    frontier = [center]
    adj = g.adj
    for depth in range(1, r + 1):
        nxt: list[NodeId] = []
        for v in frontier:
            for w in adj[v]:
                if w not in hops:
                    hops[w] = depth
                    nxt.append(w)
        if not nxt:
            break
        frontier = nxt
    return hops


def ball_from_members(
    g: DataGraph, center: NodeId, r: int, hops: dict[NodeId, int]
) -> Ball:
    member_set = set(hops)
    induced = {v: g.adj[v] & member_set for v in hops}
    return Ball(center=center, radius=r, hops=hops, adj=induced, labels=g.labels)


def ball_extract(g: DataGraph, center: NodeId, r: int) -> Ball:
    """BFS hop-<=r neighborhood of ``center`` with induced edges."""
    return ball_from_members(g, center, r, ball_members(g, center, r))


def density_of(s: Subgraph) -> Density:
    if not s.nodes:
        raise EmptySubgraph("cannot take the density of an empty subgraph")
    return Density(len(s.edges), len(s.nodes))


def core_decomposition(adj: dict[NodeId, set[NodeId]]) -> dict[NodeId, int]:
    """Core number of every node by bin-sorted degree peeling, linear in
    the edge count."""
    n = len(adj)
    if n == 0:
        return {}
    nodes = list(adj)
    index = {v: i for i, v in enumerate(nodes)}
    deg = [len(adj[v]) for v in nodes]
    md = max(deg)
    counts = [0] * (md + 1)
    for d in deg:
        counts[d] += 1
    start = [0] * (md + 2)
    for d in range(md + 1):
        start[d + 1] = start[d] + counts[d]
    nxt = start[: md + 1]
    pos = [0] * n
    vert = [0] * n
    for i in range(n):
        d = deg[i]
        pos[i] = nxt[d]
        vert[nxt[d]] = i
        nxt[d] += 1
    # nxt[d] now equals start[d+1]; rebuild bin heads for the peel
    head = [0] * (md + 1)
    s = 0
    for d in range(md + 1):
        head[d] = s
        s += counts[d]
    for scan in range(n):
        i = vert[scan]
        di = deg[i]
        for w in adj[nodes[i]]:
            j = index[w]
            dj = deg[j]
            if dj > di:
                # swap j with the first slot of its bin, then shrink it
                pj = pos[j]
                ph = head[dj]
                u = vert[ph]
                if u != j:
                    vert[ph], vert[pj] = j, u
                    pos[j], pos[u] = ph, pj
                head[dj] += 1
                deg[j] = dj - 1
    return {nodes[i]: deg[i] for i in range(n)}


def max_core_density(b: Ball) -> Density:
    """Density of the maximum core of the ball.

    The maximum core is the induced subgraph on nodes of maximal core
    number; doubling its density bounds the density of every subgraph of
    the ball, which is what the ball filter uses.
    """
    if not b.hops:
        raise EmptySubgraph("empty ball")
    core = core_decomposition(b.adj)
    k_max = max(core.values())
    members = {v for v, c in core.items() if c == k_max}
    edges = 0
    for v in members:
        edges += len(b.adj[v] & members)
    return Density(edges // 2, len(members))


def _bfs_depths(adj: dict[NodeId, set[NodeId]], start: NodeId) -> dict[NodeId, int]:
    depths = {start: 0}
    frontier = [start]
    d = 0
    while frontier:
        d += 1
        nxt = []
        for v in frontier:
            for w in adj[v]:
                if w not in depths:
                    depths[w] = d
                    nxt.append(w)
        frontier = nxt
    return depths


def connected_components(adj: dict[NodeId, set[NodeId]]) -> list[set[NodeId]]:
    seen: set[NodeId] = set()
    comps = []
    for v in adj:
        if v in seen:
            continue
        comp = set(_bfs_depths(adj, v))
        seen |= comp
        comps.append(comp)
    return comps


def diameter_of(s: Subgraph) -> int:
    """Longest shortest-hop distance over all node pairs; must be connected."""
    if not s.nodes:
        raise EmptySubgraph("empty subgraph has no diameter")
    adj = s.adjacency()
    diam = 0
    seen_all = None
    for v in s.nodes:
        depths = _bfs_depths(adj, v)
        if seen_all is None and len(depths) != len(s.nodes):
            raise Disconnected("subgraph has more than one component")
        seen_all = True
        diam = max(diam, max(depths.values()))
    return diam


def diameter_report(s: Subgraph) -> tuple[int, bool]:
    """Diameter plus a warning flag; disconnected input is measured on
    its largest component (ties broken by smallest node id) and flagged."""
    if not s.nodes:
        raise EmptySubgraph("empty subgraph has no diameter")
    adj = s.adjacency()
    comps = connected_components(adj)
    if len(comps) == 1:
        return diameter_of(s), False
    big = max(comps, key=lambda c: (len(c), -min(c)))
    sub = Subgraph.induced(adj, big)
    return diameter_of(sub), True
