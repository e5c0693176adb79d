"""Persistent auxiliary state for incremental maintenance.

The index keeps, per ball center: a type code (one bit per fragment,
set iff that fragment's maximum relation in the ball is non-empty), a
status triple (center id, high-water mark of processed pattern updates,
doubled maximum-core density bound), and the non-empty fragment
relations themselves.  Bucketing centers by type code drives
affected-ball selection; the ball filter records fragments with
unprocessed deletions per bucket; the update planner keeps every unit
update on one of h+1 stacks so lazily skipped balls can be repaired
later.  Balls themselves are never stored; they are rebuilt on demand.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from typing import Iterable

from .errors import UnknownBall, UnsatisfiablePattern
from .fragmentation import Fragmentation, UpdateTarget
from .graphs import Ball, DataGraph, Density, ball_extract, max_core_density
from .pattern import Interval, PatternGraph, PNodeId
from .simulation import MatchRelation, max_simulation, pattern_satisfiable
from .updates import (
    CapacityChange,
    PatternUpdate,
    PEdgeDel,
    PEdgeIns,
    PNodeDel,
    PNodeIns,
)


@dataclass
class BallStatus:
    bid: int
    cflag: int
    den: Density
    # den tracks the ball's current doubled max-core density; when a data
    # update restructures a ball that cannot currently reach the combine
    # step, the recompute is deferred and this flag marks the debt
    den_stale: bool = False


@dataclass
class UpdatePlanner:
    """h fragment stacks plus one cut stack of (id, unit) entries."""

    h: int
    stacks: list[list[tuple[int, PatternUpdate]]] = field(default_factory=list)
    counter: int = 0

    def __post_init__(self) -> None:
        if not self.stacks:
            self.stacks = [[] for _ in range(self.h + 1)]

    def record(self, unit: PatternUpdate, target: int) -> int:
        """Push a unit onto its stack (target = fragment index or CUT)."""
        self.counter += 1
        idx = self.h if target == UpdateTarget.CUT else target
        self.stacks[idx].append((self.counter, unit))
        return self.counter

    def pending_for(self, fragment: int, cflag: int) -> list[tuple[int, PatternUpdate]]:
        return [(i, u) for i, u in self.stacks[fragment] if i > cflag]

    def pending_cut(self, cflag: int) -> list[tuple[int, PatternUpdate]]:
        return [(i, u) for i, u in self.stacks[self.h] if i > cflag]

    def compact(self, min_cflag: int) -> None:
        """Drop entries every ball has already processed (optimization)."""
        for i, stack in enumerate(self.stacks):
            self.stacks[i] = [(j, u) for j, u in stack if j > min_cflag]


class FbmIndex:
    """Fragment status buckets + ball statuses + stored fragment relations
    + ball filter + update planner, kept mutually consistent."""

    def __init__(self, h: int, r: int):
        self.h = h
        self.r = r
        self.all_ones = (1 << h) - 1
        self.fs: dict[int, set[int]] = {code: set() for code in range(1 << h)}
        self.bs: dict[int, BallStatus] = {}
        self.relations: dict[int, dict[int, MatchRelation]] = {}
        self.bf: dict[int, int] = {code: self.all_ones for code in range(1 << h)}
        self.up = UpdatePlanner(h)
        self._bucket_of: dict[int, int] = {}

    # -- bucket bookkeeping -------------------------------------------

    def type_code(self, rels: dict[int, MatchRelation], vacuous: set[int]) -> int:
        code = 0
        for i in range(self.h):
            if i in vacuous or (i in rels and not rels[i].is_empty):
                code |= 1 << i
        return code

    def bucket_centers(self, code: int) -> set[int]:
        return self.fs[code]

    def full_match_centers(self) -> set[int]:
        return set(self.fs[self.all_ones])

    def add_ball(
        self,
        center: int,
        rels: dict[int, MatchRelation],
        vacuous: set[int],
        den: Density,
        cflag: int,
        den_stale: bool = False,
    ) -> None:
        code = self.type_code(rels, vacuous)
        self.fs[code].add(center)
        self._bucket_of[center] = code
        self.bs[center] = BallStatus(
            bid=center, cflag=cflag, den=den, den_stale=den_stale
        )
        stored = {i: m for i, m in rels.items() if not m.is_empty}
        if stored:
            self.relations[center] = stored
        else:
            self.relations.pop(center, None)

    def relink(
        self,
        center: int,
        rels: dict[int, MatchRelation],
        vacuous: set[int],
        cflag: int,
    ) -> None:
        """Recompute the bucket from the relations' emptiness pattern and
        advance the ball's high-water mark."""
        if center not in self.bs:
            raise UnknownBall(f"no ball status for center {center}")
        old = self._bucket_of[center]
        code = self.type_code(rels, vacuous)
        if code != old:
            self.fs[old].discard(center)
            self.fs[code].add(center)
            self._bucket_of[center] = code
        stored = {i: m for i, m in rels.items() if not m.is_empty}
        if stored:
            self.relations[center] = stored
        else:
            self.relations.pop(center, None)
        self.bs[center].cflag = cflag

    def retire_ball(self, center: int) -> None:
        if center not in self.bs:
            return
        self.fs[self._bucket_of.pop(center)].discard(center)
        del self.bs[center]
        self.relations.pop(center, None)

    def stored_relations(self, center: int) -> dict[int, MatchRelation]:
        return self.relations.get(center, {})

    def bucket_of(self, center: int) -> int:
        return self._bucket_of[center]

    # -- ball filter ----------------------------------------------------

    def bf_apply(self, unit: PatternUpdate, target: int) -> None:
        """Zero bit i in every filtering code for deletions on fragment i;
        everything else leaves the filter intact."""
        if target == UpdateTarget.CUT:
            return
        if isinstance(unit, (PEdgeDel, PNodeDel)):
            mask = ~(1 << target)
            for code in self.bf:
                self.bf[code] &= mask

    def affected_by_pattern(self) -> set[int]:
        """Buckets whose type code covers the filtering code contribute all
        their balls; their codes reset to all-ones."""
        out: set[int] = set()
        for code, members in self.fs.items():
            fc = self.bf[code]
            if code & fc == fc:
                out |= members
                self.bf[code] = self.all_ones
        return out

    def min_cflag(self) -> int:
        if not self.bs:
            return self.up.counter
        return min(st.cflag for st in self.bs.values())


def fragment_relations(
    p: PatternGraph,
    frag: Fragmentation,
    ball: Ball,
) -> tuple[dict[int, MatchRelation], set[int]]:
    """Per-fragment maximum relations in one ball; empty fragments are
    vacuous matches.  A per-fragment label-presence prescreen avoids
    simulating fragments whose labels are absent."""
    rels: dict[int, MatchRelation] = {}
    vacuous: set[int] = set()
    present: set[int] = set()
    for v in ball.hops:
        present |= ball.labels[v]
    for i in range(frag.h):
        sub = frag.fragment(p, i)
        if not sub.adj:
            vacuous.add(i)
            continue
        if any(lab not in present for lab in sub.label.values()):
            rels[i] = MatchRelation.empty(sub.adj)
            continue
        rels[i] = max_simulation(sub, ball.adj, ball.labels)
    return rels, vacuous


def fragment_relations_from_members(
    fragments: dict[int, PatternGraph],
    g: DataGraph,
    center: int,
    r: int,
    members: dict[int, int],
    label_index: dict[int, set[int]],
) -> tuple[dict[int, MatchRelation], set[int], Ball | None]:
    """Like :func:`fragment_relations`, but from a membership map: the
    induced ball is only materialized when some fragment survives the
    label-presence prescreen (done via the label index).  Returns the
    ball when it was built."""
    from .graphs import ball_from_members

    rels: dict[int, MatchRelation] = {}
    vacuous: set[int] = set()
    ball: Ball | None = None
    empty: set[int] = set()
    for i, sub in fragments.items():
        if not sub.adj:
            vacuous.add(i)
            continue
        present = all(
            not label_index.get(lab, empty).isdisjoint(members)
            for lab in set(sub.label.values())
        )
        if not present:
            rels[i] = MatchRelation.empty(sub.adj)
            continue
        if ball is None:
            ball = ball_from_members(g, center, r, members)
        rels[i] = max_simulation(sub, ball.adj, ball.labels)
    return rels, vacuous, ball


def build_index(
    p: PatternGraph,
    frag: Fragmentation,
    g: DataGraph,
    r: int,
    *,
    require_satisfiable: bool = True,
) -> FbmIndex:
    """Index every ball of radius r: per-fragment relations, type-code
    bucket, density bound, zeroed update high-water marks."""
    if require_satisfiable and not pattern_satisfiable(p):
        raise UnsatisfiablePattern("refusing to index an unsatisfiable pattern")
    idx = FbmIndex(frag.h, r)
    for center in sorted(g.adj):
        ball = ball_extract(g, center, r)
        rels, vacuous = fragment_relations(p, frag, ball)
        den = max_core_density(ball).doubled()
        idx.add_ball(center, rels, vacuous, den, cflag=0)
    return idx


# -- snapshot persistence -------------------------------------------------
#
# Binary layout (all integers little-endian):
#   magic "TSIX", version u32
#   header: h u32, r u32, counter u64
#   FS: for each of 2^h codes: count u32, then center u64 each
#   BS: count u32, then per ball: bid u64, cflag u64, den_e u64, den_n u64,
#       den-stale u8
#   M:  count u32, then per ball: bid u64, frag-count u32, per fragment:
#       index u32, node-count u32, per pattern node: name (u16 len + utf8),
#       match-count u32, matches u64 each
#   BF: 2^h codes u32 each
#   UP: h+1 stacks: count u32, then per entry: id u64, unit tag u8 + fields
#       (strings are u16 len + utf8; intervals are lo u64, hi u64 with
#       0xFFFFFFFFFFFFFFFF meaning unbounded; labels u64)

SNAPSHOT_MAGIC = b"TSIX"
SNAPSHOT_VERSION = 1
_UNBOUNDED = 0xFFFFFFFFFFFFFFFF

_TAG_PE_INS, _TAG_PE_DEL, _TAG_PN_INS, _TAG_PN_DEL, _TAG_CAP = range(5)


def _w_str(out: bytearray, s: str) -> None:
    b = s.encode("utf-8")
    out += struct.pack("<H", len(b))
    out += b


def _w_interval(out: bytearray, iv: Interval) -> None:
    out += struct.pack("<QQ", iv.lo, _UNBOUNDED if iv.hi is None else iv.hi)


def _w_unit(out: bytearray, u: PatternUpdate) -> None:
    if isinstance(u, PEdgeIns):
        out += struct.pack("<B", _TAG_PE_INS)
        _w_str(out, u.u)
        _w_str(out, u.v)
    elif isinstance(u, PEdgeDel):
        out += struct.pack("<B", _TAG_PE_DEL)
        _w_str(out, u.u)
        _w_str(out, u.v)
    elif isinstance(u, PNodeIns):
        out += struct.pack("<B", _TAG_PN_INS)
        _w_str(out, u.node)
        _w_str(out, u.anchor)
        out += struct.pack("<Q", u.label)
        _w_interval(out, u.cap)
    elif isinstance(u, PNodeDel):
        out += struct.pack("<B", _TAG_PN_DEL)
        _w_str(out, u.node)
    elif isinstance(u, CapacityChange):
        out += struct.pack("<B", _TAG_CAP)
        _w_str(out, u.node)
        _w_interval(out, u.cap)
    else:
        raise TypeError(f"cannot encode {u!r}")


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def take(self, fmt: str):
        vals = struct.unpack_from("<" + fmt, self.data, self.pos)
        self.pos += struct.calcsize("<" + fmt)
        return vals if len(vals) > 1 else vals[0]

    def take_str(self) -> str:
        n = self.take("H")
        s = self.data[self.pos : self.pos + n].decode("utf-8")
        self.pos += n
        return s

    def take_interval(self) -> Interval:
        lo, hi = self.take("QQ")
        return Interval(lo, None if hi == _UNBOUNDED else hi)

    def take_unit(self) -> PatternUpdate:
        tag = self.take("B")
        if tag == _TAG_PE_INS:
            return PEdgeIns(self.take_str(), self.take_str())
        if tag == _TAG_PE_DEL:
            return PEdgeDel(self.take_str(), self.take_str())
        if tag == _TAG_PN_INS:
            node, anchor = self.take_str(), self.take_str()
            label = self.take("Q")
            return PNodeIns(node, anchor, label, self.take_interval())
        if tag == _TAG_PN_DEL:
            return PNodeDel(self.take_str())
        if tag == _TAG_CAP:
            return CapacityChange(self.take_str(), self.take_interval())
        raise ValueError(f"bad unit tag {tag}")


def snapshot_save(idx: FbmIndex) -> bytes:
    out = bytearray()
    out += SNAPSHOT_MAGIC
    out += struct.pack("<I", SNAPSHOT_VERSION)
    out += struct.pack("<IIQ", idx.h, idx.r, idx.up.counter)
    for code in range(1 << idx.h):
        members = sorted(idx.fs[code])
        out += struct.pack("<I", len(members))
        for c in members:
            out += struct.pack("<Q", c)
    out += struct.pack("<I", len(idx.bs))
    for bid in sorted(idx.bs):
        st = idx.bs[bid]
        out += struct.pack(
            "<QQQQB",
            st.bid,
            st.cflag,
            st.den.edge_count,
            st.den.node_count,
            1 if st.den_stale else 0,
        )
    out += struct.pack("<I", len(idx.relations))
    for bid in sorted(idx.relations):
        rels = idx.relations[bid]
        out += struct.pack("<QI", bid, len(rels))
        for i in sorted(rels):
            rel = rels[i]
            out += struct.pack("<II", i, len(rel.r))
            for u in sorted(rel.r):
                _w_str(out, u)
                matches = sorted(rel.r[u])
                out += struct.pack("<I", len(matches))
                for v in matches:
                    out += struct.pack("<Q", v)
    for code in range(1 << idx.h):
        out += struct.pack("<I", idx.bf[code])
    for stack in idx.up.stacks:
        out += struct.pack("<I", len(stack))
        for uid, unit in stack:
            out += struct.pack("<Q", uid)
            _w_unit(out, unit)
    return bytes(out)


def snapshot_load(data: bytes) -> FbmIndex:
    from .errors import SnapshotError

    if data[:4] != SNAPSHOT_MAGIC:
        raise SnapshotError("bad magic")
    rd = _Reader(data)
    rd.pos = 4
    version = rd.take("I")
    if version != SNAPSHOT_VERSION:
        raise SnapshotError(f"unsupported snapshot version {version}")
    h, r, counter = rd.take("IIQ")
    idx = FbmIndex(h, r)
    idx.up.counter = counter
    for code in range(1 << h):
        n = rd.take("I")
        for _ in range(n):
            c = rd.take("Q")
            idx.fs[code].add(c)
            idx._bucket_of[c] = code
    n = rd.take("I")
    for _ in range(n):
        bid, cflag, de, dn, stale = rd.take("QQQQB")
        idx.bs[bid] = BallStatus(
            bid=bid, cflag=cflag, den=Density(de, dn), den_stale=bool(stale)
        )
    n = rd.take("I")
    for _ in range(n):
        bid, nf = rd.take("QI")
        rels: dict[int, MatchRelation] = {}
        for _ in range(nf):
            i, nn = rd.take("II")
            r_map: dict[PNodeId, set[int]] = {}
            for _ in range(nn):
                u = rd.take_str()
                nm = rd.take("I")
                r_map[u] = {rd.take("Q") for _ in range(nm)}
            rels[i] = MatchRelation(r_map)
        idx.relations[bid] = rels
    for code in range(1 << h):
        idx.bf[code] = rd.take("I")
    for i in range(h + 1):
        n = rd.take("I")
        for _ in range(n):
            uid = rd.take("Q")
            idx.up.stacks[i].append((uid, rd.take_unit()))
    return idx


def snapshot_dump_text(idx: FbmIndex) -> str:
    """Human-readable dump of the index for debugging."""
    lines = [f"h={idx.h} r={idx.r} counter={idx.up.counter}"]
    for code in range(1 << idx.h):
        bits = format(code, f"0{idx.h}b")[::-1]
        members = sorted(idx.fs[code])
        fc = format(idx.bf[code], f"0{idx.h}b")[::-1]
        lines.append(f"bucket tc=({bits}) fc=({fc}) balls={members}")
    for bid in sorted(idx.bs):
        st = idx.bs[bid]
        rels = idx.relations.get(bid, {})
        rel_txt = {
            i: {u: sorted(s) for u, s in rels[i].r.items()} for i in sorted(rels)
        }
        lines.append(f"ball {bid}: cflag={st.cflag} den={st.den} rels={rel_txt}")
    for i, stack in enumerate(idx.up.stacks):
        name = f"T(P_f{i + 1})" if i < idx.h else "T(C)"
        lines.append(f"{name}: {[(uid, type(u).__name__) for uid, u in stack]}")
    return "\n".join(lines)
