"""Command-line driver: one-shot queries, incremental sessions, synthetic
graph generation, and the benchmark sweep.

Exit codes: 0 success, 1 parse/IO errors, 2 unsatisfiable pattern.
"""

from __future__ import annotations

import argparse
import json
import sys

from .batch import TopKResult, batch_topk
from .engine import QueryResult, Session
from .errors import ParseError, TeamSimError
from .formats import (
    SessionMaps,
    parse_graph,
    parse_pattern,
    parse_updates,
    serialize_graph,
    serialize_pattern,
)
from .generate import GenConfig, gen_pattern, gen_planted
from .index import snapshot_dump_text, snapshot_save
from .quality import team_quality
from .topk import Team, TopKList

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_UNSAT = 2


def _team_json(t: Team, maps: SessionMaps, quality: dict | None = None) -> dict:
    obj = {
        "nodes": [maps.node_name(v) for v in t.nodes],
        "edges": [
            sorted((maps.node_name(a), maps.node_name(b))) for a, b in sorted(t.edges)
        ],
        "density": {"e": t.density.edge_count, "n": t.density.node_count},
        "center": maps.node_name(t.center),
        "radius": t.radius,
    }
    if quality is not None:
        obj["quality"] = quality
    return obj


def print_teams(teams: TopKList, maps: SessionMaps, fmt: str, out=None) -> None:
    out = out if out is not None else sys.stdout
    if fmt == "jsonl":
        for t in teams:
            print(json.dumps(_team_json(t, maps), sort_keys=True), file=out)
        return
    if not len(teams):
        print("(no teams)", file=out)
        return
    print(f"{'#':>2}  {'density':>9}  {'size':>4}  {'center':>8}  {'t':>2}  nodes", file=out)
    for i, t in enumerate(teams, 1):
        names = ",".join(maps.node_name(v) for v in t.nodes)
        print(
            f"{i:>2}  {str(t.density):>9}  {len(t.nodes):>4}  "
            f"{maps.node_name(t.center):>8}  {t.radius:>2}  {names}",
            file=out,
        )


def _load_inputs(args) -> tuple:
    maps = SessionMaps()
    with open(args.graph, encoding="utf-8") as fh:
        g, maps = parse_graph(fh.read(), maps)
    with open(args.pattern, encoding="utf-8") as fh:
        p, maps = parse_pattern(fh.read(), maps)
    return g, p, maps


def cmd_query(args) -> int:
    g, p, maps = _load_inputs(args)
    res: TopKResult = batch_topk(
        p, g, args.r, args.k, use_filter=not args.no_filter, order=args.order
    )
    if not res.satisfiable:
        print("unsatisfiable pattern", file=sys.stderr)
        return EXIT_UNSAT
    print_teams(res.teams, maps, args.format)
    return EXIT_OK


def _emit_result(res: QueryResult, maps: SessionMaps, fmt: str, label: str) -> None:
    print(f"== {label}" + (" (unsatisfiable pattern)" if not res.satisfiable else ""))
    print_teams(res.teams, maps, fmt)
    s = res.stats
    print(
        f"-- affected={s.affected} structural={s.structural} visited={s.balls_visited} "
        f"gated={s.balls_gated} recomputed={s.relations_recomputed} "
        f"refined={s.relations_refined} early={int(res.early_returned)} "
        f"wall_ms={s.wall_ms:.1f}"
    )


def cmd_session(args) -> int:
    g, p, maps = _load_inputs(args)
    session = Session(
        g,
        p,
        r=args.r,
        k=args.k,
        h=args.h,
        early_return=not args.no_early_return,
    )
    _emit_result(session.last, maps, args.format, "initial")
    if args.script:
        with open(args.script, encoding="utf-8") as fh:
            text = fh.read()
        for i, us in enumerate(parse_updates(text, maps), 1):
            try:
                res = session.apply(us.pattern, us.data)
            except TeamSimError as e:
                print(f"== set {i} rejected: {e}", file=sys.stderr)
                continue
            _emit_result(res, maps, args.format, f"set {i}")
        return EXIT_OK
    # interactive: read unit lines; "---" applies the pending set
    pending: list[str] = []
    n_sets = 0
    for raw in sys.stdin:
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line == "stats":
            print(json.dumps(session.totals, sort_keys=True))
            continue
        if line.startswith("rebuild"):
            toks = line.split()
            h = int(toks[1]) if len(toks) > 1 else None
            res = session.rebuild(h)
            _emit_result(res, maps, args.format, "rebuild")
            continue
        if line == "---":
            n_sets += 1
            try:
                us_list = parse_updates("\n".join(pending), maps)
                us = us_list[0] if us_list else None
                res = session.apply(us.pattern if us else [], us.data if us else [])
                _emit_result(res, maps, args.format, f"set {n_sets}")
            except TeamSimError as e:
                print(f"== set {n_sets} rejected: {e}", file=sys.stderr)
            pending = []
            continue
        pending.append(line)
    if pending:
        n_sets += 1
        try:
            us_list = parse_updates("\n".join(pending), maps)
            us = us_list[0]
            res = session.apply(us.pattern, us.data)
            _emit_result(res, maps, args.format, f"set {n_sets}")
        except TeamSimError as e:
            print(f"== set {n_sets} rejected: {e}", file=sys.stderr)
    if args.snapshot:
        with open(args.snapshot, "wb") as fh:
            fh.write(snapshot_save(session.idx))
    return EXIT_OK


def cmd_generate(args) -> int:
    cfg = GenConfig(
        n=args.n,
        d=args.d,
        l=args.labels,
        communities=args.communities,
        intra_prob=args.intra,
        inter_prob=args.inter,
        seed=args.seed,
    )
    g = gen_planted(cfg)
    maps = SessionMaps()
    for lab in range(cfg.l):
        maps.labels.intern(f"L{lab}")
    for v in range(cfg.n):
        maps.nodes.intern(str(v))
    text = serialize_graph(g, maps)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if args.pattern_out:
        p = gen_pattern(
            cfg,
            args.pattern_nodes,
            args.pattern_edges,
            (1, 10),
            seed=args.seed,
            community=0,
        )
        with open(args.pattern_out, "w", encoding="utf-8") as fh:
            fh.write(serialize_pattern(p, maps))
    return EXIT_OK


def cmd_bench(args) -> int:
    from .bench import CSV_HEADER, run_sweep

    cfg = GenConfig(
        n=args.n,
        d=args.d,
        l=args.labels,
        communities=args.communities,
        intra_prob=args.intra,
        inter_prob=args.inter,
        seed=args.seed,
    )
    ratios = tuple(float(x) for x in args.ratios.split(","))
    _, rows = run_sweep(
        cfg,
        kind=args.kind,
        ratios=ratios,
        r=args.r,
        k=args.k,
        h=args.h,
        seed=args.seed,
        early_return=not args.no_early_return,
    )
    print(CSV_HEADER)
    for row in rows:
        print(row.csv())
    crossover = next((row.ratio for row in rows if row.speedup < 1.0), None)
    if crossover is not None:
        print(f"# crossover at ratio <= {crossover}", file=sys.stderr)
    return EXIT_OK


def cmd_dump_index(args) -> int:
    g, p, maps = _load_inputs(args)
    session = Session(g, p, r=args.r, k=args.k, h=args.h)
    sys.stdout.write(snapshot_dump_text(session.idx) + "\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="teamsim")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(sp, with_h=True):
        sp.add_argument("--graph", required=True)
        sp.add_argument("--pattern", required=True)
        sp.add_argument("--r", type=int, default=2)
        sp.add_argument("--k", type=int, default=10)
        if with_h:
            sp.add_argument("--h", type=int, default=3)
        sp.add_argument("--format", choices=("table", "jsonl"), default="table")
        sp.add_argument("--threads", type=int, default=1)
        sp.add_argument("--seed", type=int, default=0)

    q = sub.add_parser("query", help="one-shot batch top-k query")
    common(q, with_h=False)
    q.add_argument("--no-filter", action="store_true")
    q.add_argument("--order", choices=("center", "den"), default="center")

    s = sub.add_parser("session", help="incremental session over update sets")
    common(s)
    s.add_argument("--script", help="update script; omit to read stdin")
    s.add_argument("--no-early-return", action="store_true")
    s.add_argument("--no-filter", action="store_true")
    s.add_argument("--snapshot", help="write an index snapshot on exit")

    gen = sub.add_parser("generate", help="planted-partition synthetic graph")
    gen.add_argument("--n", type=int, default=1000)
    gen.add_argument("--d", type=float, default=10.0)
    gen.add_argument("--labels", type=int, default=50)
    gen.add_argument("--communities", type=int, default=10)
    gen.add_argument("--intra", type=float, default=0.95)
    gen.add_argument("--inter", type=float, default=0.05)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out")
    gen.add_argument("--pattern-out")
    gen.add_argument("--pattern-nodes", type=int, default=10)
    gen.add_argument("--pattern-edges", type=int, default=12)

    b = sub.add_parser("bench", help="incremental vs batch sweep (CSV)")
    b.add_argument("--kind", choices=("pattern", "data", "both"), default="data")
    b.add_argument("--ratios", default="0.05,0.15,0.3,0.5")
    b.add_argument("--n", type=int, default=100_000)
    b.add_argument("--d", type=float, default=10.0)
    b.add_argument("--labels", type=int, default=200)
    b.add_argument("--communities", type=int, default=50)
    b.add_argument("--intra", type=float, default=0.97)
    b.add_argument("--inter", type=float, default=0.03)
    b.add_argument("--r", type=int, default=2)
    b.add_argument("--k", type=int, default=10)
    b.add_argument("--h", type=int, default=3)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--no-early-return", action="store_true")

    d = sub.add_parser("dump-index", help="debug dump of the match index")
    common(d)

    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "query":
            return cmd_query(args)
        if args.command == "session":
            return cmd_session(args)
        if args.command == "generate":
            return cmd_generate(args)
        if args.command == "bench":
            return cmd_bench(args)
        if args.command == "dump-index":
            return cmd_dump_index(args)
    except ParseError as e:
        print(f"parse error: {e}", file=sys.stderr)
        return EXIT_ERROR
    except (OSError, TeamSimError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR
    return EXIT_ERROR


if __name__ == "__main__":
    raise SystemExit(main())
