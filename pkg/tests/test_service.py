import pytest
from fastapi.testclient import TestClient

from teamsim.service import create_app

GRAPH = "node a A\nnode b B\nnode c C\nedge a b\nedge b c\n"
PATTERN = "pnode u1 A [1,1]\npnode u2 B [1,1]\npedge u1 u2\n"
UNSAT = (
    "pnode u0 A [1,1]\npnode u1 B [1,1]\npnode u2 B [2,3]\npnode u3 C [1,1]\n"
    "pedge u0 u1\npedge u0 u2\npedge u2 u3\n"
)


@pytest.fixture
def client():
    return TestClient(create_app())


def make_session(client, pattern=PATTERN, graph=GRAPH, **kw):
    payload = {"graph": graph, "pattern": pattern, "r": 1, "k": 5, "h": 1}
    payload.update(kw)
    return client.post("/sessions", json=payload)


class TestCreate:
    def test_valid_fixture_201_with_team(self, client):
        resp = make_session(client)
        assert resp.status_code == 201
        body = resp.json()
        assert body["satisfiable"] is True
        assert len(body["teams"]) == 1
        assert body["teams"][0]["nodes"] == ["a", "b"]
        assert body["teams"][0]["density"] == {"e": 1, "n": 2}
        assert body["teams"][0]["quality"]["nodeSat"] == 1.0

    def test_unsatisfiable_200_with_flag(self, client):
        resp = make_session(client, pattern=UNSAT)
        assert resp.status_code == 200
        body = resp.json()
        assert body["satisfiable"] is False
        assert body["teams"] == []

    def test_malformed_interval_400(self, client):
        resp = make_session(client, pattern="pnode u1 A [2,1]\n")
        assert resp.status_code == 400 or resp.status_code == 422
        resp = make_session(client, pattern="pnode u1 A [x]\n")
        assert resp.status_code == 400
        assert "line 1" in resp.json()["detail"]

    def test_disconnected_pattern_422(self, client):
        resp = make_session(client, pattern="pnode u1 A [1,1]\npnode u2 B [1,1]\n")
        assert resp.status_code == 422


class TestUpdates:
    def test_data_insertion_creates_team(self, client):
        sid = make_session(
            client,
            graph="node a A\nnode b B\nnode x C\nedge a x\nedge x b\n",
        ).json()["session"]
        resp = client.post(f"/sessions/{sid}/updates", json={"data": ["g+edge a b"]})
        assert resp.status_code == 200
        body = resp.json()
        assert [t["nodes"] for t in body["teams"]] == [["a", "b"]]
        assert body["stats"]["affected"] >= 1

    def test_empty_set_returns_previous(self, client):
        created = make_session(client)
        sid = created.json()["session"]
        resp = client.post(f"/sessions/{sid}/updates", json={})
        assert resp.status_code == 200
        body = resp.json()
        assert body["teams"] == created.json()["teams"]
        assert body["stats"]["relationsRecomputed"] == 0

    def test_disconnecting_deletion_422_no_state_change(self, client):
        sid = make_session(client).json()["session"]
        before = client.get(f"/sessions/{sid}/teams").json()
        resp = client.post(
            f"/sessions/{sid}/updates", json={"pattern": ["p-edge u1 u2"]}
        )
        assert resp.status_code == 422
        assert client.get(f"/sessions/{sid}/teams").json() == before

    def test_unknown_session_404(self, client):
        assert client.post("/sessions/zzz/updates", json={}).status_code == 404

    def test_wrong_kind_rejected(self, client):
        sid = make_session(client).json()["session"]
        resp = client.post(f"/sessions/{sid}/updates", json={"pattern": ["g+edge a b"]})
        assert resp.status_code == 422


class TestViews:
    def test_teams_view_matches_last_post(self, client):
        sid = make_session(client).json()["session"]
        post = client.post(f"/sessions/{sid}/updates", json={"data": ["g-edge b c"]})
        view = client.get(f"/sessions/{sid}/teams")
        assert view.json()["teams"] == post.json()["teams"]

    def test_pattern_view_reflects_updates(self, client):
        sid = make_session(client).json()["session"]
        client.post(
            f"/sessions/{sid}/updates",
            json={"pattern": ["p+node u9 anchor=u2 label=ST cap=[1,2]"]},
        )
        body = client.get(f"/sessions/{sid}/pattern").json()
        ids = [n["id"] for n in body["nodes"]]
        assert "u9" in ids
        assert ["u2", "u9"] in body["edges"]

    def test_stats_monotone(self, client):
        sid = make_session(client).json()["session"]
        s1 = client.get(f"/sessions/{sid}/stats").json()
        client.post(f"/sessions/{sid}/updates", json={"data": ["g+edge a c"]})
        s2 = client.get(f"/sessions/{sid}/stats").json()
        assert s2["sets"] > s1["sets"]
        assert s2["balls_visited"] >= s1["balls_visited"]

    def test_session_view(self, client):
        sid = make_session(client).json()["session"]
        body = client.get(f"/sessions/{sid}").json()
        assert body["graph"] == {"nodes": 3, "edges": 2}
        assert body["satisfiable"] is True

    def test_unknown_404(self, client):
        assert client.get("/sessions/zzz/teams").status_code == 404
