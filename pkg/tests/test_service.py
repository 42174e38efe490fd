import json

import pytest
from fastapi.testclient import TestClient

from lcsim.service import ServiceSettings, create_app


@pytest.fixture()
def client():
    with TestClient(create_app()) as c:
        yield c


def make_session(client, n=5, **extra):
    r = client.post("/sessions", json={"n": n, "seed": 21, **extra})
    assert r.status_code == 201
    return r.json()["id"]


class TestSessionLifecycle:
    def test_create_returns_diagram_and_summary(self, client):
        r = client.post("/sessions", json={"n": 5, "seed": 1})
        body = r.json()
        assert r.status_code == 201
        assert body["n"] == 5
        assert len(body["diagram"]["components"][0]["rings"]) == 5
        assert body["summary"]["oracle_on"] is True

    def test_get_full_view(self, client):
        sid = make_session(client)
        r = client.get(f"/sessions/{sid}")
        assert r.status_code == 200
        assert r.json()["live_qubits"] == [1, 2, 3, 4, 5]

    def test_delete_then_404(self, client):
        sid = make_session(client)
        assert client.delete(f"/sessions/{sid}").status_code == 200
        r = client.get(f"/sessions/{sid}")
        assert r.status_code == 404
        assert r.json()["code"] == "unknown_session"

    def test_unknown_session_structured_error(self, client):
        r = client.post("/sessions/nope/measure", json={"qubit": 1, "basis": "Z"})
        assert r.status_code == 404
        assert set(r.json()) == {"code", "message"}

    def test_chain_beyond_oracle_limit_runs_without_oracle(self, client):
        r = client.post("/sessions", json={"n": 25, "seed": 1})
        assert r.status_code == 201
        assert r.json()["summary"]["oracle_on"] is False
        sid = r.json()["id"]
        m = client.post(
            f"/sessions/{sid}/measure", json={"qubit": 12, "basis": "Y", "outcome": "+"}
        )
        assert m.status_code == 200
        assert m.json()["step"]["rule"] == "Y_Bulk_Twist"
        assert m.json()["fidelity"] is None
        assert m.json()["schmidt"]["source"] == "rules"


class TestMeasure:
    def test_random_y_bulk_hits_a_twist_rule(self, client):
        sid = make_session(client)
        r = client.post(
            f"/sessions/{sid}/measure",
            json={"qubit": 3, "basis": "Y", "outcome": "random"},
        )
        body = r.json()
        assert r.status_code == 200
        assert body["committed"] is True
        assert body["step"]["rule"] in ("Y_Bulk_Twist", "Y_Bulk_AntiTwist")
        assert body["step"]["probability"] == pytest.approx(0.5, abs=1e-12)
        assert body["schmidt"]["rank"] == 2
        assert body["correspondence_ok"] is True

    def test_explicit_outcome(self, client):
        sid = make_session(client)
        r = client.post(
            f"/sessions/{sid}/measure", json={"qubit": 3, "basis": "Z", "outcome": "+"}
        )
        assert r.json()["step"]["outcome"] == "+"
        assert len(r.json()["diagram"]["components"]) == 2

    def test_invalid_measurement_maps_to_400(self, client):
        sid = make_session(client)
        r = client.post(
            f"/sessions/{sid}/measure", json={"qubit": 42, "basis": "Z", "outcome": "+"}
        )
        assert r.status_code == 400
        assert r.json()["code"] == "unknown_label"

    def test_refused_composition_maps_to_400(self, client):
        sid = make_session(client)
        client.post(f"/sessions/{sid}/measure", json={"qubit": 3, "basis": "X", "outcome": "+"})
        r = client.post(f"/sessions/{sid}/measure", json={"qubit": 2, "basis": "Z", "outcome": "+"})
        assert r.status_code == 400
        assert r.json()["code"] == "unsupported_composition"


class TestDryRun:
    def test_both_outcomes_and_no_mutation(self, client):
        sid = make_session(client)
        before = client.get(f"/sessions/{sid}").json()
        r = client.post(
            f"/sessions/{sid}/measure",
            json={"qubit": 3, "basis": "X", "dry_run": True},
        )
        body = r.json()
        assert body["committed"] is False
        assert set(body["outcomes"]) == {"+", "-"}
        assert body["outcomes"]["+"]["probability"] == pytest.approx(0.5, abs=1e-12)
        after = client.get(f"/sessions/{sid}").json()
        assert before == after

    def test_what_if_panel_distinguishes_x_from_y(self, client):
        sid = make_session(client)
        x = client.post(
            f"/sessions/{sid}/measure", json={"qubit": 3, "basis": "X", "dry_run": True}
        ).json()
        y = client.post(
            f"/sessions/{sid}/measure", json={"qubit": 3, "basis": "Y", "dry_run": True}
        ).json()
        x_ribbon = x["outcomes"]["+"]["diagram"]["components"][0]["ribbons"][1]
        y_ribbon = y["outcomes"]["+"]["diagram"]["components"][0]["ribbons"][1]
        assert x_ribbon["twist"] == 0 and y_ribbon["twist"] == 90


class TestUndo:
    def test_undo_restores_initial_diagram(self, client):
        sid = make_session(client)
        initial = client.get(f"/sessions/{sid}/diagram").json()
        client.post(f"/sessions/{sid}/measure", json={"qubit": 3, "basis": "Y"})
        r = client.post(f"/sessions/{sid}/undo")
        assert r.status_code == 200
        assert client.get(f"/sessions/{sid}/diagram").json() == initial

    def test_undo_empty_history(self, client):
        sid = make_session(client)
        r = client.post(f"/sessions/{sid}/undo")
        assert r.status_code == 400
        assert r.json()["code"] == "empty_history"


class TestBusyMode:
    def test_reject_mode_returns_409_when_locked(self):
        app = create_app(ServiceSettings(busy="reject"))
        with TestClient(app) as client:
            sid = make_session(client)
            entry = app.state.store.get(sid)
            entry.lock.acquire()
            try:
                r = client.post(
                    f"/sessions/{sid}/measure",
                    json={"qubit": 3, "basis": "Z", "outcome": "+"},
                )
                assert r.status_code == 409
                assert r.json()["code"] == "busy"
            finally:
                entry.lock.release()


class TestExpiryAndPersistence:
    def test_idle_sessions_expire(self):
        app = create_app(ServiceSettings(idle_timeout_s=0.0))
        with TestClient(app) as client:
            sid = make_session(client)
            r = client.get(f"/sessions/{sid}")
            assert r.status_code == 404

    def test_snapshot_round_trip(self, tmp_path):
        path = str(tmp_path / "sessions.json")
        settings = ServiceSettings(persist_path=path)
        with TestClient(create_app(settings)) as client:
            sid = make_session(client)
            client.post(f"/sessions/{sid}/measure", json={"qubit": 3, "basis": "Y"})
            view = client.get(f"/sessions/{sid}").json()
        # shutdown wrote the snapshot; a new app reloads it
        with TestClient(create_app(settings)) as client:
            r = client.get(f"/sessions/{sid}")
            assert r.status_code == 200
            assert r.json() == view
            # undo still works across the reload
            assert client.post(f"/sessions/{sid}/undo").status_code == 200
