"""HTTP facade for interactive sessions.

One engine writer per session: concurrent update posts to the same
session answer 409; reads are always allowed.  Payloads reuse the text
grammars for graphs/patterns and update units.

Run with ``python -m teamsim.service`` (bind address from TEAMSIM_ADDR
or --addr, default 127.0.0.1:8321).
"""

from __future__ import annotations

import os
import threading
import uuid
from dataclasses import dataclass, field

from fastapi import FastAPI, HTTPException
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .engine import QueryResult, Session
from .errors import (
    DisconnectedPattern,
    EmptyPattern,
    InvalidInterval,
    ParseError,
    TeamSimError,
)
from .formats import (
    SessionMaps,
    parse_graph,
    parse_pattern,
    parse_update_line,
    serialize_pattern,
)
from .quality import team_quality
from .topk import Team
from .updates import (
    CapacityChange,
    PEdgeDel,
    PEdgeIns,
    PNodeDel,
    PNodeIns,
)


class CreateSession(BaseModel):
    graph: str | None = None
    graph_path: str | None = None
    pattern: str
    r: int = 2
    k: int = 10
    h: int = 3
    early_return: bool = True


class UpdatePayload(BaseModel):
    pattern: list[str] = []
    data: list[str] = []


@dataclass
class Held:
    session: Session
    maps: SessionMaps
    lock: threading.Lock = field(default_factory=threading.Lock)


def team_payload(t: Team, held: Held) -> dict:
    q = team_quality(t, held.session.p, held.session.g)
    return {
        "nodes": [held.maps.node_name(v) for v in t.nodes],
        "edges": [
            sorted((held.maps.node_name(a), held.maps.node_name(b)))
            for a, b in sorted(t.edges)
        ],
        "density": {"e": t.density.edge_count, "n": t.density.node_count},
        "center": held.maps.node_name(t.center),
        "radius": t.radius,
        "quality": q.as_dict(),
    }


def result_payload(res: QueryResult, held: Held) -> dict:
    return {
        "satisfiable": res.satisfiable,
        "earlyReturned": res.early_returned,
        "teams": [team_payload(t, held) for t in res.teams],
        "stats": {
            "affected": res.stats.affected,
            "structural": res.stats.structural,
            "ballsVisited": res.stats.balls_visited,
            "ballsGated": res.stats.balls_gated,
            "relationsRecomputed": res.stats.relations_recomputed,
            "relationsRefined": res.stats.relations_refined,
            "wallMs": res.stats.wall_ms,
            "emitMs": res.stats.emit_ms,
        },
    }


def create_app() -> FastAPI:
    app = FastAPI(title="teamsim")
    sessions: dict[str, Held] = {}

    def held_of(sid: str) -> Held:
        held = sessions.get(sid)
        if held is None:
            raise HTTPException(status_code=404, detail="unknown session")
        return held

    @app.post("/sessions")
    def create_session(payload: CreateSession):
        maps = SessionMaps()
        try:
            if payload.graph is not None:
                text = payload.graph
            elif payload.graph_path:
                with open(payload.graph_path, encoding="utf-8") as fh:
                    text = fh.read()
            else:
                raise HTTPException(status_code=400, detail="graph or graph_path required")
            g, maps = parse_graph(text, maps)
            p, maps = parse_pattern(payload.pattern, maps)
        except (ParseError, InvalidInterval) as e:
            raise HTTPException(status_code=400, detail=str(e))
        except (DisconnectedPattern, EmptyPattern) as e:
            raise HTTPException(status_code=422, detail=str(e))
        except OSError as e:
            raise HTTPException(status_code=400, detail=str(e))
        session = Session(
            g, p, r=payload.r, k=payload.k, h=payload.h, early_return=payload.early_return
        )
        sid = uuid.uuid4().hex[:12]
        held = Held(session=session, maps=maps)
        sessions[sid] = held
        body = {"session": sid, **result_payload(session.last, held)}
        status = 201 if session.last.satisfiable else 200
        return JSONResponse(body, status_code=status)

    def parse_units(payload: UpdatePayload, maps: SessionMaps):
        dp = []
        dg = []
        for i, line in enumerate(payload.pattern, 1):
            unit = parse_update_line(line.split(), i, maps)
            if not isinstance(unit, (PEdgeIns, PEdgeDel, PNodeIns, PNodeDel, CapacityChange)):
                raise ParseError(f"not a pattern unit: {line!r}", i)
            dp.append(unit)
        for i, line in enumerate(payload.data, 1):
            unit = parse_update_line(line.split(), i, maps)
            if isinstance(unit, (PEdgeIns, PEdgeDel, PNodeIns, PNodeDel, CapacityChange)):
                raise ParseError(f"not a data unit: {line!r}", i)
            dg.append(unit)
        return dp, dg

    @app.post("/sessions/{sid}/updates")
    def post_updates(sid: str, payload: UpdatePayload):
        held = held_of(sid)
        if not held.lock.acquire(blocking=False):
            raise HTTPException(status_code=409, detail="update already in flight")
        try:
            try:
                dp, dg = parse_units(payload, held.maps)
                res = held.session.apply(dp, dg)
            except (ParseError, TeamSimError) as e:
                raise HTTPException(status_code=422, detail=str(e))
            return result_payload(res, held)
        finally:
            held.lock.release()

    @app.get("/sessions/{sid}")
    def get_session(sid: str):
        held = held_of(sid)
        s = held.session
        return {
            "r": s.r,
            "k": s.k,
            "h": s.frag.h,
            "satisfiable": s.satisfiable,
            "graph": {"nodes": s.g.node_count, "edges": s.g.edge_count},
            "pattern": {"nodes": s.p.node_count, "edges": s.p.edge_count},
        }

    @app.get("/sessions/{sid}/teams")
    def get_teams(sid: str):
        held = held_of(sid)
        return {
            "satisfiable": held.session.last.satisfiable,
            "teams": [team_payload(t, held) for t in held.session.last.teams],
        }

    @app.get("/sessions/{sid}/pattern")
    def get_pattern(sid: str):
        held = held_of(sid)
        p = held.session.p
        return {
            "text": serialize_pattern(p, held.maps),
            "nodes": [
                {
                    "id": u,
                    "label": held.maps.labels.name_of(p.label[u]),
                    "cap": [p.capacity[u].lo, p.capacity[u].hi],
                }
                for u in sorted(p.adj)
            ],
            "edges": [list(e) for e in sorted(tuple(sorted(e)) for e in p.edges())],
        }

    @app.get("/sessions/{sid}/stats")
    def get_stats(sid: str):
        held = held_of(sid)
        return dict(held.session.totals)

    return app


app = create_app()


def main() -> None:
    import argparse

    import uvicorn

    ap = argparse.ArgumentParser(prog="teamsim-service")
    ap.add_argument("--addr", default=os.environ.get("TEAMSIM_ADDR", "127.0.0.1:8321"))
    args = ap.parse_args()
    host, _, port = args.addr.rpartition(":")
    uvicorn.run(app, host=host or "127.0.0.1", port=int(port))


if __name__ == "__main__":
    main()
