"""Unit updates for pattern and data graphs, and their application.

Pattern update sets are validated on a scratch copy (every unit must
leave the pattern connected) before touching live state; data update
sets apply in place behind an undo log so a set either fully applies or
leaves the graph untouched.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Union

from .errors import PatternDisconnected, EmptyPattern
from .graphs import DataGraph, LabelId, NodeId
from .pattern import Interval, PatternGraph, PNodeId


# -- pattern updates ----------------------------------------------------


@dataclass(frozen=True)
class PEdgeIns:
    u: PNodeId
    v: PNodeId


@dataclass(frozen=True)
class PEdgeDel:
    u: PNodeId
    v: PNodeId


@dataclass(frozen=True)
class PNodeIns:
    node: PNodeId
    anchor: PNodeId
    label: LabelId
    cap: Interval


@dataclass(frozen=True)
class PNodeDel:
    node: PNodeId


@dataclass(frozen=True)
class CapacityChange:
    node: PNodeId
    cap: Interval


PatternUpdate = Union[PEdgeIns, PEdgeDel, PNodeIns, PNodeDel, CapacityChange]

PATTERN_DELETIONS = (PEdgeDel, PNodeDel)


def apply_pattern_update(p: PatternGraph, u: PatternUpdate) -> None:
    """Apply one unit in place, keeping the pattern connected."""
    if isinstance(u, PEdgeIns):
        p._add_edge(u.u, u.v)
    elif isinstance(u, PEdgeDel):
        p._remove_edge(u.u, u.v)
        if not p.is_connected():
            p._add_edge(u.u, u.v)
            raise PatternDisconnected(f"deleting edge ({u.u},{u.v}) disconnects the pattern")
    elif isinstance(u, PNodeIns):
        p._add_node(u.node, u.label, u.cap)
        p._add_edge(u.node, u.anchor)
    elif isinstance(u, PNodeDel):
        if p.node_count == 1:
            raise EmptyPattern("cannot delete the last pattern node")
        if u.node not in p.adj:
            p._remove_node(u.node)  # raises UnknownPatternNode
        label, cap = p.label[u.node], p.capacity[u.node]
        severed = p._remove_node(u.node)
        if not p.is_connected():
            p._add_node(u.node, label, cap)
            for a, b in severed:
                p._add_edge(a, b)
            raise PatternDisconnected(
                f"deleting node {u.node} disconnects the pattern"
            )
    elif isinstance(u, CapacityChange):
        p._set_capacity(u.node, u.cap)
    else:
        raise TypeError(f"not a pattern update: {u!r}")


def validate_pattern_updates(p: PatternGraph, units: Iterable[PatternUpdate]) -> PatternGraph:
    """Dry-run a whole set on a copy; returns the evolved copy.

    Raises without side effects if any unit is structurally invalid or
    disconnects the pattern.
    """
    scratch = p.copy()
    for u in units:
        apply_pattern_update(scratch, u)
    return scratch


# -- data updates -------------------------------------------------------


@dataclass(frozen=True)
class GEdgeIns:
    u: NodeId
    v: NodeId


@dataclass(frozen=True)
class GEdgeDel:
    u: NodeId
    v: NodeId


@dataclass(frozen=True)
class GNodeIns:
    node: NodeId
    anchor: NodeId
    labels: frozenset[LabelId]


@dataclass(frozen=True)
class GNodeDel:
    node: NodeId


DataUpdate = Union[GEdgeIns, GEdgeDel, GNodeIns, GNodeDel]

_UNDO_EDGE_DEL = "e-"
_UNDO_EDGE_INS = "e+"
_UNDO_NODE_DEL = "n-"
_UNDO_NODE_INS = "n+"


def apply_data_update_inplace(g: DataGraph, u: DataUpdate) -> list[tuple]:
    """Apply one unit; returns undo records (apply in reverse order)."""
    if isinstance(u, GEdgeIns):
        g.insert_edge(u.u, u.v)
        return [(_UNDO_EDGE_DEL, u.u, u.v)]
    if isinstance(u, GEdgeDel):
        g.delete_edge(u.u, u.v)
        return [(_UNDO_EDGE_INS, u.u, u.v)]
    if isinstance(u, GNodeIns):
        g.insert_node(u.node, u.labels)
        try:
            g.insert_edge(u.node, u.anchor)
        except Exception:
            g.delete_node(u.node)
            raise
        return [(_UNDO_NODE_DEL, u.node)]
    if isinstance(u, GNodeDel):
        labels = g.labels[u.node] if u.node in g.adj else None
        incident = sorted(g.adj[u.node]) if u.node in g.adj else []
        g.delete_node(u.node)
        return [(_UNDO_NODE_INS, u.node, labels, incident)]
    raise TypeError(f"not a data update: {u!r}")


def _undo(g: DataGraph, records: list[tuple]) -> None:
    for rec in reversed(records):
        tag = rec[0]
        if tag == _UNDO_EDGE_DEL:
            g.delete_edge(rec[1], rec[2])
        elif tag == _UNDO_EDGE_INS:
            g.insert_edge(rec[1], rec[2])
        elif tag == _UNDO_NODE_DEL:
            g.delete_node(rec[1])
        elif tag == _UNDO_NODE_INS:
            _, node, labels, incident = rec
            g.insert_node(node, labels)
            for w in incident:
                g.insert_edge(node, w)


def apply_data_updates(g: DataGraph, units: Iterable[DataUpdate]) -> list[tuple]:
    """Apply a whole set atomically in place (all or nothing).

    Returns the undo records; besides rollback they tell the caller
    exactly which adjacency the set removed.
    """
    done: list[tuple] = []
    try:
        for u in units:
            done.extend(apply_data_update_inplace(g, u))
    except Exception:
        _undo(g, done)
        raise
    return done


def apply_data_update(g: DataGraph, u: DataUpdate) -> DataGraph:
    """Pure variant: returns the updated graph, the input stays intact."""
    out = g.copy()
    apply_data_update_inplace(out, u)
    return out
