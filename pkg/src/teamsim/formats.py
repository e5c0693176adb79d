"""Line-oriented text formats for graphs, patterns, and update scripts.

External node ids and labels are strings; both are interned to dense
integers on the way in, and the mapping travels with the session so
results can be printed with the original names.  One directive per line,
``#`` starts a comment, ``---`` separates update sets.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .errors import ParseError
from .graphs import DataGraph
from .pattern import Interval, PatternGraph
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
)


class Interner:
    """Dense string-to-int table preserving first-seen order."""

    def __init__(self) -> None:
        self.by_name: dict[str, int] = {}
        self.names: list[str] = []

    def intern(self, name: str) -> int:
        i = self.by_name.get(name)
        if i is None:
            i = len(self.names)
            self.by_name[name] = i
            self.names.append(name)
        return i

    def name_of(self, i: int) -> str:
        return self.names[i]

    def __contains__(self, name: str) -> bool:
        return name in self.by_name

    def __len__(self) -> int:
        return len(self.names)


@dataclass
class SessionMaps:
    """Label and node-id tables shared by everything in one session."""

    labels: Interner = field(default_factory=Interner)
    nodes: Interner = field(default_factory=Interner)

    def node_name(self, nid: int) -> str:
        return self.nodes.name_of(nid)


_INTERVAL_RE = re.compile(r"^\[(\d+),(\d+|\*)\]$")


def parse_interval(tok: str, line: int) -> Interval:
    m = _INTERVAL_RE.match(tok)
    if not m:
        raise ParseError(f"malformed capacity interval {tok!r}", line)
    lo = int(m.group(1))
    hi = None if m.group(2) == "*" else int(m.group(2))
    from .errors import InvalidInterval

    if hi is not None and hi < lo:
        raise InvalidInterval(f"line {line}: interval [{lo},{hi}] is reversed")
    return Interval(lo, hi)


def _lines(text: str):
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield ln, line.split()


def parse_graph(text: str, maps: SessionMaps | None = None) -> tuple[DataGraph, SessionMaps]:
    """Parse ``node <id> <label>[,<label>...]`` / ``edge <id> <id>``."""
    maps = maps or SessionMaps()
    g = DataGraph()
    from .errors import DuplicateEdge, DuplicateNode, SelfLoop, UnknownNode

    for ln, toks in _lines(text):
        if toks[0] == "node":
            if len(toks) != 3:
                raise ParseError("node takes <id> <labels>", ln)
            nid = maps.nodes.intern(toks[1])
            labels = [maps.labels.intern(x) for x in toks[2].split(",") if x]
            if not labels:
                raise ParseError("node needs at least one label", ln)
            try:
                g.insert_node(nid, labels)
            except DuplicateNode:
                raise ParseError(f"duplicate node {toks[1]!r}", ln)
        elif toks[0] == "edge":
            if len(toks) != 3:
                raise ParseError("edge takes two node ids", ln)
            for name in toks[1:]:
                if name not in maps.nodes:
                    raise ParseError(f"edge references undeclared node {name!r}", ln)
            u, v = maps.nodes.intern(toks[1]), maps.nodes.intern(toks[2])
            try:
                g.insert_edge(u, v)
            except SelfLoop:
                raise ParseError(f"self-loop on {toks[1]!r}", ln)
            except DuplicateEdge:
                raise ParseError(f"duplicate edge {toks[1]} {toks[2]}", ln)
        else:
            raise ParseError(f"unknown directive {toks[0]!r}", ln)
    return g, maps


def serialize_graph(g: DataGraph, maps: SessionMaps) -> str:
    out = []
    for nid in sorted(g.adj, key=maps.node_name):
        labs = ",".join(sorted(maps.labels.name_of(l) for l in g.labels[nid]))
        out.append(f"node {maps.node_name(nid)} {labs}")
    for u, v in sorted(
        (tuple(sorted((maps.node_name(a), maps.node_name(b)))) for a, b in g.edges())
    ):
        out.append(f"edge {u} {v}")
    return "\n".join(out) + "\n"


def parse_pattern(text: str, maps: SessionMaps | None = None) -> tuple[PatternGraph, SessionMaps]:
    """Parse ``pnode <id> <label> [x,y|x,*]`` / ``pedge <id> <id>``."""
    maps = maps or SessionMaps()
    p = PatternGraph()
    from .errors import (
        DuplicatePatternEdge,
        DuplicatePatternNode,
        SelfLoop,
        UnknownPatternNode,
    )

    for ln, toks in _lines(text):
        if toks[0] == "pnode":
            if len(toks) != 4:
                raise ParseError("pnode takes <id> <label> [x,y]", ln)
            cap = parse_interval(toks[3], ln)
            try:
                p._add_node(toks[1], maps.labels.intern(toks[2]), cap)
            except DuplicatePatternNode:
                raise ParseError(f"duplicate pattern node {toks[1]!r}", ln)
        elif toks[0] == "pedge":
            if len(toks) != 3:
                raise ParseError("pedge takes two node ids", ln)
            try:
                p._add_edge(toks[1], toks[2])
            except UnknownPatternNode as e:
                raise ParseError(str(e), ln)
            except SelfLoop:
                raise ParseError(f"pattern self-loop on {toks[1]!r}", ln)
            except DuplicatePatternEdge:
                raise ParseError(f"duplicate pattern edge {toks[1]} {toks[2]}", ln)
        else:
            raise ParseError(f"unknown directive {toks[0]!r}", ln)
    p.require_connected()
    return p, maps


def serialize_pattern(p: PatternGraph, maps: SessionMaps) -> str:
    out = []
    for nid in sorted(p.adj):
        out.append(
            f"pnode {nid} {maps.labels.name_of(p.label[nid])} {p.capacity[nid]}"
        )
    for u, v in sorted(tuple(sorted(e)) for e in p.edges()):
        out.append(f"pedge {u} {v}")
    return "\n".join(out) + "\n"


@dataclass
class UpdateSet:
    pattern: list[PatternUpdate] = field(default_factory=list)
    data: list[DataUpdate] = field(default_factory=list)

    def __bool__(self) -> bool:
        return bool(self.pattern or self.data)


def _kv(toks: list[str], key: str, ln: int) -> str:
    for tok in toks:
        if tok.startswith(key + "="):
            return tok[len(key) + 1 :]
    raise ParseError(f"missing {key}=...", ln)


def parse_update_line(toks: list[str], ln: int, maps: SessionMaps):
    """One unit update; data node names intern on sight (structural
    validity is checked at apply time, not parse time)."""
    op = toks[0]
    if op == "p+edge":
        return PEdgeIns(toks[1], toks[2])
    if op == "p-edge":
        return PEdgeDel(toks[1], toks[2])
    if op == "p-node":
        return PNodeDel(toks[1])
    if op == "p+node":
        anchor = _kv(toks[2:], "anchor", ln)
        label = _kv(toks[2:], "label", ln)
        cap = parse_interval(_kv(toks[2:], "cap", ln), ln)
        return PNodeIns(toks[1], anchor, maps.labels.intern(label), cap)
    if op == "p.cap":
        return CapacityChange(toks[1], parse_interval(toks[2], ln))
    if op == "g+edge":
        return GEdgeIns(maps.nodes.intern(toks[1]), maps.nodes.intern(toks[2]))
    if op == "g-edge":
        return GEdgeDel(maps.nodes.intern(toks[1]), maps.nodes.intern(toks[2]))
    if op == "g-node":
        return GNodeDel(maps.nodes.intern(toks[1]))
    if op == "g+node":
        anchor = maps.nodes.intern(_kv(toks[2:], "anchor", ln))
        labels = frozenset(
            maps.labels.intern(x) for x in _kv(toks[2:], "labels", ln).split(",") if x
        )
        if not labels:
            raise ParseError("g+node needs at least one label", ln)
        return GNodeIns(maps.nodes.intern(toks[1]), anchor, labels)
    raise ParseError(f"unknown update directive {op!r}", ln)


def parse_updates(text: str, maps: SessionMaps) -> list[UpdateSet]:
    """Parse an update script into ``---``-separated sets."""
    sets: list[UpdateSet] = [UpdateSet()]
    for ln, toks in _lines(text):
        if toks[0] == "---":
            sets.append(UpdateSet())
            continue
        unit = parse_update_line(toks, ln, maps)
        if isinstance(unit, (PEdgeIns, PEdgeDel, PNodeIns, PNodeDel, CapacityChange)):
            sets[-1].pattern.append(unit)
        else:
            sets[-1].data.append(unit)
    if not sets[-1]:
        sets.pop()
    return sets


def serialize_update(u, maps: SessionMaps) -> str:
    if isinstance(u, PEdgeIns):
        return f"p+edge {u.u} {u.v}"
    if isinstance(u, PEdgeDel):
        return f"p-edge {u.u} {u.v}"
    if isinstance(u, PNodeIns):
        return (
            f"p+node {u.node} anchor={u.anchor} "
            f"label={maps.labels.name_of(u.label)} cap={u.cap}"
        )
    if isinstance(u, PNodeDel):
        return f"p-node {u.node}"
    if isinstance(u, CapacityChange):
        return f"p.cap {u.node} {u.cap}"
    if isinstance(u, GEdgeIns):
        return f"g+edge {maps.node_name(u.u)} {maps.node_name(u.v)}"
    if isinstance(u, GEdgeDel):
        return f"g-edge {maps.node_name(u.u)} {maps.node_name(u.v)}"
    if isinstance(u, GNodeIns):
        labs = ",".join(sorted(maps.labels.name_of(l) for l in u.labels))
        return f"g+node {maps.node_name(u.node)} anchor={maps.node_name(u.anchor)} labels={labs}"
    if isinstance(u, GNodeDel):
        return f"g-node {maps.node_name(u.node)}"
    raise TypeError(f"cannot serialize {u!r}")


def serialize_updates(sets: list[UpdateSet], maps: SessionMaps) -> str:
    blocks = []
    for s in sets:
        lines = [serialize_update(u, maps) for u in s.pattern]
        lines += [serialize_update(u, maps) for u in s.data]
        blocks.append("\n".join(lines))
    return "\n---\n".join(blocks) + "\n"
