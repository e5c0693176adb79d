"""Deduplicated, density-ordered team lists."""

from __future__ import annotations

from dataclasses import dataclass, field

from .graphs import Density, Edge, NodeId, Subgraph


@dataclass(frozen=True)
class Team:
    """An immutable team: identity is (nodes, edges).

    ``center``/``radius`` record where it was first found, normalized to
    the smallest (center, radius) pair over all balls that produce it.
    """

    nodes: tuple[NodeId, ...]
    edges: frozenset[Edge]
    density: Density
    center: NodeId
    radius: int

    @classmethod
    def from_subgraph(cls, team: Subgraph, center: NodeId, radius: int) -> "Team":
        return cls(
            nodes=tuple(sorted(team.nodes)),
            edges=team.edges,
            density=Density(len(team.edges), len(team.nodes)),
            center=center,
            radius=radius,
        )

    @property
    def identity(self) -> tuple[tuple[NodeId, ...], frozenset[Edge]]:
        return (self.nodes, self.edges)

    def ranks_before(self, other: "Team") -> bool:
        """Total order: density desc, node count asc, node list asc, radius asc."""
        if self.density != other.density:
            return other.density < self.density
        if len(self.nodes) != len(other.nodes):
            return len(self.nodes) < len(other.nodes)
        if self.nodes != other.nodes:
            return self.nodes < other.nodes
        return self.radius < other.radius


@dataclass
class TopKList:
    """At most k teams, strictly ordered, no duplicate (nodes, edges)."""

    k: int
    entries: list[Team] = field(default_factory=list)

    def __post_init__(self) -> None:
        if self.k < 1:
            raise ValueError("k must be positive")

    def insert(self, t: Team) -> bool:
        """Ordered, deduplicated insert; evicts beyond capacity.

        A duplicate only refreshes the provenance to the smaller
        (center, radius) pair and reports the list as unchanged.
        """
        for i, e in enumerate(self.entries):
            if e.identity == t.identity:
                if (t.center, t.radius) < (e.center, e.radius):
                    self.entries[i] = t
                    self._sort()
                return False
        if len(self.entries) >= self.k and not t.ranks_before(self.entries[-1]):
            return False
        self.entries.append(t)
        self._sort()
        del self.entries[self.k :]
        return True

    def _sort(self) -> None:
        import functools

        self.entries.sort(
            key=functools.cmp_to_key(
                lambda a, b: -1 if a.ranks_before(b) else (1 if b.ranks_before(a) else 0)
            )
        )

    def kth_density(self) -> Density | None:
        """Density of the k-th entry; None while the list is not full
        (the ball filter never fires then)."""
        if len(self.entries) < self.k:
            return None
        return self.entries[self.k - 1].density

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TopKList):
            return NotImplemented
        return self.k == other.k and self.entries == other.entries
