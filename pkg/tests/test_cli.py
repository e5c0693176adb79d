import json
import subprocess
import sys

import pytest

from teamsim.cli import main

GRAPH = "node a A\nnode b B\nnode c C\nedge a b\nedge b c\n"
PATTERN = "pnode u1 A [1,1]\npnode u2 B [1,1]\npedge u1 u2\n"
UNSAT = (
    "pnode u0 A [1,1]\npnode u1 B [1,1]\npnode u2 B [2,3]\npnode u3 C [1,1]\n"
    "pedge u0 u1\npedge u0 u2\npedge u2 u3\n"
)


@pytest.fixture
def fixture_files(tmp_path):
    gp = tmp_path / "g.txt"
    pp = tmp_path / "p.txt"
    gp.write_text(GRAPH)
    pp.write_text(PATTERN)
    return str(gp), str(pp), tmp_path


class TestQuery:
    def test_tiny_fixture(self, fixture_files, capsys):
        gp, pp, _ = fixture_files
        rc = main(["query", "--graph", gp, "--pattern", pp, "--r", "1", "--k", "1"])
        out = capsys.readouterr().out
        assert rc == 0
        assert "1/2" in out and "a,b" in out

    def test_unsatisfiable_exits_2(self, fixture_files, tmp_path, capsys):
        gp, _, _ = fixture_files
        pp = tmp_path / "unsat.txt"
        pp.write_text(UNSAT)
        rc = main(["query", "--graph", gp, "--pattern", str(pp), "--r", "1", "--k", "1"])
        assert rc == 2
        assert "unsatisfiable" in capsys.readouterr().err

    def test_jsonl_fields(self, fixture_files, capsys):
        gp, pp, _ = fixture_files
        rc = main(
            ["query", "--graph", gp, "--pattern", pp, "--r", "1", "--k", "1",
             "--format", "jsonl"]
        )
        assert rc == 0
        obj = json.loads(capsys.readouterr().out.strip())
        assert set(obj) == {"nodes", "edges", "density", "center", "radius"}
        assert obj["nodes"] == ["a", "b"]
        assert obj["density"] == {"e": 1, "n": 2}

    def test_parse_error_exits_1(self, fixture_files, tmp_path, capsys):
        gp, _, _ = fixture_files
        bad = tmp_path / "bad.txt"
        bad.write_text("pnode u1 A [2,1]\n")
        rc = main(["query", "--graph", gp, "--pattern", str(bad)])
        assert rc == 1

    def test_no_filter_identical(self, fixture_files, capsys):
        gp, pp, _ = fixture_files
        main(["query", "--graph", gp, "--pattern", pp, "--format", "jsonl"])
        base = capsys.readouterr().out
        main(["query", "--graph", gp, "--pattern", pp, "--format", "jsonl", "--no-filter"])
        assert capsys.readouterr().out == base


class TestSession:
    def test_script_sets_match_fresh_queries(self, fixture_files, tmp_path, capsys):
        gp, pp, _ = fixture_files
        script = tmp_path / "u.txt"
        script.write_text("g+edge a c\n---\ng-edge a c\n")
        rc = main(
            ["session", "--graph", gp, "--pattern", pp, "--r", "1", "--k", "2",
             "--h", "1", "--script", str(script), "--format", "jsonl"]
        )
        assert rc == 0
        out = capsys.readouterr().out
        blocks = [b for b in out.splitlines() if b.startswith("{")]
        assert len(blocks) == 3  # initial + 2 sets

    def test_rejected_set_keeps_going(self, fixture_files, tmp_path, capsys):
        gp, pp, _ = fixture_files
        script = tmp_path / "u.txt"
        script.write_text("p-edge u1 u2\n---\ng+edge a c\n")
        rc = main(
            ["session", "--graph", gp, "--pattern", pp, "--r", "1", "--k", "1",
             "--h", "1", "--script", str(script)]
        )
        err = capsys.readouterr().err
        assert rc == 0
        assert "rejected" in err and "set 1" in err

    def test_session_equals_query_on_evolved_state(self, fixture_files, tmp_path, capsys):
        gp, pp, tmp = fixture_files
        script = tmp / "u.txt"
        script.write_text("g+node d anchor=c labels=A\ng+edge d b\n")
        main(
            ["session", "--graph", gp, "--pattern", pp, "--r", "1", "--k", "5",
             "--h", "1", "--script", str(script), "--format", "jsonl"]
        )
        session_out = capsys.readouterr().out
        last_block = [l for l in session_out.splitlines() if l.startswith("{")]
        # rebuild the evolved graph by hand and run a fresh query
        g2 = tmp / "g2.txt"
        g2.write_text(GRAPH + "node d A\nedge c d\nedge b d\n")
        main(["query", "--graph", str(g2), "--pattern", pp, "--r", "1", "--k", "5",
              "--format", "jsonl"])
        fresh = [l for l in capsys.readouterr().out.splitlines() if l.startswith("{")]
        assert last_block[-len(fresh):] == fresh


class TestGenerate:
    def test_generate_writes_parseable_graph(self, tmp_path):
        out = tmp_path / "gen.txt"
        rc = main(
            ["generate", "--n", "60", "--d", "4", "--labels", "6",
             "--communities", "3", "--seed", "5", "--out", str(out)]
        )
        assert rc == 0
        from teamsim.formats import parse_graph

        g, _ = parse_graph(out.read_text())
        assert g.node_count == 60

    def test_generate_pattern_too(self, tmp_path):
        out = tmp_path / "gen.txt"
        pout = tmp_path / "pat.txt"
        rc = main(
            ["generate", "--n", "60", "--d", "4", "--labels", "6", "--communities", "3",
             "--seed", "5", "--out", str(out), "--pattern-out", str(pout),
             "--pattern-nodes", "4", "--pattern-edges", "4"]
        )
        assert rc == 0
        from teamsim.formats import parse_pattern

        p, _ = parse_pattern(pout.read_text())
        assert p.node_count == 4


class TestEntrypoint:
    def test_module_invocation(self, fixture_files):
        gp, pp, _ = fixture_files
        proc = subprocess.run(
            [sys.executable, "-m", "teamsim.cli", "query", "--graph", gp,
             "--pattern", pp, "--r", "1", "--k", "1"],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0
        assert "a,b" in proc.stdout
