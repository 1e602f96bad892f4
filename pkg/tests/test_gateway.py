from __future__ import annotations

import pytest
from fastapi.testclient import TestClient

from catc.gateway import Engine, create_app
from catc.simulator import load_scenario

from conftest import fixture_text

SPAWNS = """
- {t: 0, cmd: spawn, id: DLH1, segment: TA,
   route: [TA, EA, S1, S2, S3, S4, S5]}
- {t: 0, cmd: spawn, id: VEH9, segment: EM, kind: vehicle,
   route: [EM, S3, XN]}
- {t: 2, cmd: clear, id: VEH9, clearance: CRS}
"""


@pytest.fixture()
def engine(straight):
    return Engine(straight, load_scenario(SPAWNS))


@pytest.fixture()
def client(engine):
    with TestClient(create_app(engine)) as client:
        yield client


def recv_until(ws, mtype):
    """Read frames until one of the wanted type arrives."""
    for _ in range(20):
        msg = ws.receive_json()
        if msg["type"] == mtype:
            return msg
    raise AssertionError(f"no {mtype} frame")


def test_snapshot_request(client):
    with client.websocket_connect("/ws") as ws:
        ws.send_json({"type": "snapshot_request", "id": "q1"})
        msg = ws.receive_json()
    assert msg["type"] == "snapshot"
    assert msg["id"] == "q1"
    snap = msg["payload"]
    assert snap["tick"] == 0
    assert snap["mobiles"] == []
    assert snap["conflicts"] == []
    airport = snap["airport"]
    assert airport["name"] == "Straight"
    assert [r["id"] for r in airport["runways"]] == ["09/27"]
    ea = next(s for s in airport["segments"] if s["id"] == "EA")
    assert ea["kind"] == "taxiway" and "S1" in ea["neighbors"]


def test_step_broadcasts_events_then_snapshot(client):
    with client.websocket_connect("/ws") as ws:
        ws.send_json({"type": "step", "n": 2})
        first = ws.receive_json()
        second = ws.receive_json()
        snap = ws.receive_json()
    assert first["type"] == "events" and second["type"] == "events"
    assert snap["type"] == "snapshot"
    # tick 0 spawned two mobiles and stepped; tick 1 moved DLH1 to EA
    kinds = [e["kind"] for e in first["events"] + second["events"]]
    assert "mobile_moved" in kinds
    payload = snap["payload"]
    assert payload["tick"] == 2
    assert [m["id"] for m in payload["mobiles"]] == ["DLH1", "VEH9"]
    dlh = payload["mobiles"][0]
    assert dlh["position"] == "EA"
    assert dlh["clearance"] == "NONE"
    assert dlh["cleared_boundary"] == 0
    assert dlh["next_expected"] == "LUP"
    assert dlh["probe"] == {"clearance": "LUP", "verdict": "green"}
    assert dlh["in_conflict"] is False


def test_mutation_clear_reaches_every_session(client):
    with client.websocket_connect("/ws") as a, client.websocket_connect("/ws") as b:
        a.send_json({"type": "step", "n": 2})
        for ws in (a, b):
            recv_until(ws, "snapshot")
        a.send_json({"type": "clear", "mobile": "DLH1", "clearance": "LUP"})
        for ws in (a, b):
            events = ws.receive_json()
            assert events["type"] == "events"
            assert [e["kind"] for e in events["events"]] == ["clearance_set"]
            assert events["events"][0]["payload"]["clearance"] == "LUP"
            snap = ws.receive_json()
            assert snap["type"] == "snapshot"
            (dlh, veh) = snap["payload"]["mobiles"]
            assert dlh["clearance"] == "LUP"
            assert dlh["next_expected"] == "TOF"


def test_probe_answers_only_the_requester(client):
    with client.websocket_connect("/ws") as a, client.websocket_connect("/ws") as b:
        a.send_json({"type": "step", "n": 2})
        for ws in (a, b):
            recv_until(ws, "snapshot")
        a.send_json({"type": "probe", "id": "p7", "mobile": "DLH1",
                     "clearance": "LUP"})
        msg = a.receive_json()
        assert msg == {
            "type": "probe_result",
            "id": "p7",
            "mobile": "DLH1",
            "clearance": "LUP",
            "verdict": "green",
            "conflicts": [],
        }
        # b sees nothing from the probe; the next broadcast is the step
        b.send_json({"type": "step"})
        assert recv_until(b, "events")["type"] == "events"


def test_probe_red_carries_the_conflicts(client):
    with client.websocket_connect("/ws") as ws:
        ws.send_json({"type": "step", "n": 3})
        recv_until(ws, "snapshot")
        ws.send_json({"type": "clear", "mobile": "DLH1", "clearance": "TOF"})
        recv_until(ws, "snapshot")
        ws.send_json({"type": "probe", "id": "p1", "mobile": "VEH9",
                      "clearance": "CRS"})
        msg = ws.receive_json()
    assert msg["verdict"] == "red"
    (conflict,) = msg["conflicts"]
    assert conflict["type"] == "CRS/TOF"
    assert conflict["pair"] == ["DLH1", "VEH9"]


def test_scheduled_scenario_commands_run_on_step(client):
    with client.websocket_connect("/ws") as ws:
        ws.send_json({"type": "step", "n": 3})
        batches = [ws.receive_json() for _ in range(3)]
        snap = ws.receive_json()
    # the clear scheduled at t=2 ran inside the third batch
    kinds = [e["kind"] for e in batches[2]["events"]]
    assert "clearance_set" in kinds
    veh = next(m for m in snap["payload"]["mobiles"] if m["id"] == "VEH9")
    assert veh["clearance"] == "CRS"


def test_load_scenario_resets_the_world(client):
    with client.websocket_connect("/ws") as ws:
        ws.send_json({"type": "step", "n": 2})
        recv_until(ws, "snapshot")
        ws.send_json({"type": "load_scenario",
                      "text": "- {t: 0, cmd: spawn, id: NEW1, segment: GS}\n"})
        snap = ws.receive_json()
        assert snap["type"] == "snapshot"
        assert snap["payload"]["tick"] == 0
        assert snap["payload"]["mobiles"] == []
        ws.send_json({"type": "step"})
        recv_until(ws, "events")
        snap = ws.receive_json()
    assert [m["id"] for m in snap["payload"]["mobiles"]] == ["NEW1"]


def test_load_airport_swaps_the_model(client, crossing_text):
    with client.websocket_connect("/ws") as ws:
        ws.send_json({"type": "load_airport", "text": crossing_text})
        snap = ws.receive_json()
    assert snap["payload"]["airport"]["name"] == "Crossing"
    assert len(snap["payload"]["airport"]["runways"]) == 2


@pytest.fixture()
def crossing_text():
    return fixture_text("crossing.airport")


def test_error_frames(client):
    with client.websocket_connect("/ws") as ws:
        ws.send_text("{nope")
        assert ws.receive_json() == {"type": "error", "id": None,
                                     "reason": "not JSON"}
        ws.send_text("[1,2]")
        assert ws.receive_json() == {"type": "error", "id": None,
                                     "reason": "not an object"}
        ws.send_json({"type": "teleport", "id": "x"})
        msg = ws.receive_json()
        assert msg["type"] == "error" and "unknown type" in msg["reason"]
        ws.send_json({"type": "probe", "id": "p9", "mobile": "NOBODY",
                      "clearance": "LUP"})
        msg = ws.receive_json()
        assert msg["type"] == "error" and msg["id"] == "p9"
        assert "NOBODY" in msg["reason"]
        ws.send_json({"type": "probe", "mobile": "X", "clearance": "WARP"})
        assert ws.receive_json()["type"] == "error"
        ws.send_json({"type": "step", "n": 0})
        msg = ws.receive_json()
        assert msg["type"] == "error" and "positive" in msg["reason"]
        ws.send_json({"type": "clear", "clearance": "LUP"})
        msg = ws.receive_json()
        assert msg["type"] == "error" and "missing argument id" in msg["reason"]
        # the session survives all of it
        ws.send_json({"type": "snapshot_request"})
        assert ws.receive_json()["type"] == "snapshot"


def test_engine_probe_outside_sessions(engine):
    engine.step_ticks(2)
    snapshot = engine.snapshot()
    assert snapshot["tick"] == 2
    assert [m["id"] for m in snapshot["mobiles"]] == ["DLH1", "VEH9"]
