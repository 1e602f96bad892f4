from __future__ import annotations

import json

import pytest

from catc.clearances import Clearance, ClearanceType, Mobile, MobileKind
from catc.detection import World
from catc.errors import InvalidClearance, ParseError, ScenarioError
from catc.routing import Route
from catc.simulator import (
    DEFAULT_MAX_TICKS,
    Event,
    EventKind,
    ScenarioCommand,
    Simulation,
    events_to_jsonl,
    load_scenario,
    run_scenario,
    step,
)

C = ClearanceType


def cmd(t, name, **args):
    return ScenarioCommand(t, name, args)


def kinds(events):
    return [e.kind for e in events]


def payloads(events, kind):
    return [e.payload for e in events if e.kind is kind]


# ------------------------------------------------------------------ parsing


def test_load_scenario_forms():
    text = """
- {t: 1, cmd: hold, id: A}
- {t: 0, cmd: spawn, id: A, segment: TA}
"""
    commands = load_scenario(text)
    assert [c.t for c in commands] == [0, 1]
    assert commands[0].cmd == "spawn"
    assert commands[0].args == {"id": "A", "segment": "TA"}

    wrapped = load_scenario("commands:\n- {t: 0, cmd: hold, id: A}\n")
    assert wrapped == [ScenarioCommand(0, "hold", {"id": "A"})]


def test_load_scenario_keeps_file_order_within_a_tick():
    text = """
- {t: 2, cmd: hold, id: B}
- {t: 0, cmd: spawn, id: A, segment: TA}
- {t: 2, cmd: hold, id: A}
"""
    commands = load_scenario(text)
    assert [(c.t, c.args["id"]) for c in commands] == [(0, "A"), (2, "B"), (2, "A")]


def test_load_scenario_rejects_garbage():
    with pytest.raises(ParseError, match="invalid YAML"):
        load_scenario("{unbalanced")
    with pytest.raises(ParseError, match="list of commands"):
        load_scenario("just a string")
    with pytest.raises(ParseError, match="must be a mapping"):
        load_scenario("- 17\n")
    with pytest.raises(ParseError, match="non-negative tick"):
        load_scenario("- {t: -1, cmd: hold, id: A}\n")
    with pytest.raises(ParseError, match="non-negative tick"):
        load_scenario("- {cmd: hold, id: A}\n")
    with pytest.raises(ParseError, match="unknown command"):
        load_scenario("- {t: 0, cmd: levitate, id: A}\n")


# ----------------------------------------------------------------- spawning


def test_spawn_with_explicit_route(straight):
    sim = Simulation(straight)
    events = sim.apply(cmd(0, "spawn", id="DLH1", segment="TA",
                           route=["TA", "TW", "GA"]))
    assert events == []
    mobile = sim.world.mobile("DLH1")
    assert mobile.position == "TA"
    assert mobile.route.segments == ("TA", "TW", "GA")
    assert mobile.kind is MobileKind.AIRCRAFT


def test_spawn_route_must_start_at_segment(straight):
    sim = Simulation(straight)
    with pytest.raises(ScenarioError, match="start at the spawn segment"):
        sim.apply(cmd(0, "spawn", id="A", segment="TW", route=["TA", "TW"]))


def test_spawn_route_to(straight):
    sim = Simulation(straight)
    sim.apply(cmd(0, "spawn", id="A", segment="GS", route_to="TA"))
    assert sim.world.mobile("A").route.segments == ("GS", "GA", "TW", "TA")


def test_spawn_airborne_arrival(straight):
    sim = Simulation(straight)
    events = sim.apply(
        cmd(0, "spawn", id="EZY1", arrival={"runway": "09/27", "threshold": "09"},
            clearance="LND")
    )
    mobile = sim.world.mobile("EZY1")
    assert mobile.airborne
    assert mobile.route.segments[:5] == ("S1", "S2", "S3", "S4", "S5")
    assert payloads(events, EventKind.CLEARANCE_SET) == [
        {"mobile": "EZY1", "clearance": "LND", "condition": None}
    ]


def test_spawn_arrival_on_the_ground_truncates(straight):
    sim = Simulation(straight)
    sim.apply(cmd(0, "spawn", id="EZY1", segment="S4",
                  arrival={"runway": "09/27", "threshold": "09"}))
    assert sim.world.mobile("EZY1").route.segments[0] == "S4"


def test_spawn_departure(straight):
    sim = Simulation(straight)
    sim.apply(cmd(0, "spawn", id="DLH1", segment="GS",
                  departure={"runway": "09/27", "threshold": "09"}))
    route = sim.world.mobile("DLH1").route
    assert route.segments[0] == "GS"
    assert route.segments[-5:] == ("S1", "S2", "S3", "S4", "S5")


def test_spawn_bare_segment_gets_unit_route(straight):
    sim = Simulation(straight)
    sim.apply(cmd(0, "spawn", id="VEH1", segment="TW", kind="vehicle"))
    assert sim.world.mobile("VEH1").route.segments == ("TW",)


def test_spawn_rejections(straight):
    sim = Simulation(straight)
    sim.apply(cmd(0, "spawn", id="A", segment="TA"))
    with pytest.raises(ScenarioError, match="already exists"):
        sim.apply(cmd(0, "spawn", id="A", segment="TW"))
    with pytest.raises(ScenarioError, match="unknown mobile kind"):
        sim.apply(cmd(0, "spawn", id="B", segment="TW", kind="hovercraft"))
    with pytest.raises(ScenarioError, match="airborne spawn needs a route"):
        sim.apply(cmd(0, "spawn", id="B"))
    with pytest.raises(ScenarioError, match="needs runway and threshold"):
        sim.apply(cmd(0, "spawn", id="B", segment="GS", departure={"runway": "09/27"}))
    with pytest.raises(ScenarioError, match="departure spawn needs a stand"):
        sim.apply(cmd(0, "spawn", id="B",
                      departure={"runway": "09/27", "threshold": "09"}))
    with pytest.raises(ScenarioError, match="approach_delay"):
        sim.apply(cmd(0, "spawn", id="B",
                      arrival={"runway": "09/27", "threshold": "09"},
                      approach_delay=-2))
    with pytest.raises(InvalidClearance, match="vehicles cannot"):
        sim.apply(cmd(0, "spawn", id="B", segment="S1", kind="vehicle",
                      route=["S1", "S2", "S3", "S4", "S5", "EB"], clearance="LND"))


# ----------------------------------------------------------------- commands


def test_clear_and_error_event(straight):
    sim = Simulation(straight)
    sim.apply(cmd(0, "spawn", id="DLH1", segment="TA",
                  route=["TA", "EA", "S1", "S2", "S3", "S4", "S5"]))
    events = sim.apply(cmd(0, "clear", id="DLH1", clearance="LUP"))
    assert payloads(events, EventKind.CLEARANCE_SET) == [
        {"mobile": "DLH1", "clearance": "LUP", "condition": None}
    ]
    with pytest.raises(ScenarioError, match="unknown clearance"):
        sim.apply(cmd(0, "clear", id="DLH1", clearance="WARP"))
    # via execute, failures turn into error events instead of raising
    (event,) = sim.execute(cmd(0, "clear", id="NOBODY", clearance="LUP"))
    assert event.kind is EventKind.ERROR
    assert event.payload["mobile"] == "NOBODY"
    (event,) = sim.execute(cmd(0, "clear", id="DLH1", clearance="CRS"))
    assert event.kind is EventKind.ERROR
    assert "leave the runway" in event.payload["reason"]


def test_set_route(straight):
    sim = Simulation(straight)
    sim.apply(cmd(0, "spawn", id="A", segment="TA", route=["TA", "TW", "GA"]))
    sim.apply(cmd(0, "set_route", id="A", route=["TA", "TW", "TE", "EB"]))
    assert sim.world.mobile("A").route.segments == ("TA", "TW", "TE", "EB")
    sim.apply(cmd(0, "set_route", id="A", route_to="GS"))
    assert sim.world.mobile("A").route.end == "GS"
    with pytest.raises(ScenarioError, match="route or route_to"):
        sim.apply(cmd(0, "set_route", id="A"))
    # the new route has to contain the current position
    (event,) = sim.execute(cmd(0, "set_route", id="A", route=["TW", "GA"]))
    assert event.kind is EventKind.OFF_ROUTE


def test_set_route_keeps_clearance_honest(straight):
    sim = Simulation(straight)
    sim.apply(cmd(0, "spawn", id="A", segment="EM",
                  route=["EM", "S3", "XN"], clearance="CRS"))
    (event,) = sim.execute(cmd(0, "set_route", id="A", route=["EM", "P1"]))
    assert event.kind is EventKind.ERROR
    assert "not adjacent" in event.payload["reason"] or "unknown" in event.payload["reason"]
    # a runway-free route cannot carry a crossing clearance
    (event,) = sim.execute(cmd(0, "set_route", id="A", route_to="EM"))
    assert event.kind is EventKind.ERROR
    assert "no runway segment" in event.payload["reason"]


def test_advance(straight):
    sim = Simulation(straight)
    sim.apply(cmd(0, "spawn", id="A", segment="GS", route_to="TA"))
    events = sim.apply(cmd(0, "advance", id="A", n=2))
    assert [e.payload for e in events] == [
        {"mobile": "A", "segment": "GA", "forced": True},
        {"mobile": "A", "segment": "TW", "forced": True},
    ]
    with pytest.raises(ScenarioError, match="only 1 left"):
        sim.apply(cmd(0, "advance", id="A", n=5))
    # nothing half-applied by the failed advance
    assert sim.world.mobile("A").position == "TW"
    sim.apply(cmd(0, "advance", id="A"))
    with pytest.raises(ScenarioError, match="no route left"):
        sim.apply(cmd(0, "advance", id="A"))
    with pytest.raises(ScenarioError, match="positive integer"):
        sim.apply(cmd(0, "advance", id="A", n=0))


def test_advance_airborne_rejected(straight):
    sim = Simulation(straight)
    sim.apply(cmd(0, "spawn", id="EZY1", arrival={"runway": "09/27", "threshold": "09"}))
    with pytest.raises(ScenarioError, match="is airborne"):
        sim.apply(cmd(0, "advance", id="EZY1"))


def test_touchdown_and_despawn(straight):
    sim = Simulation(straight)
    sim.apply(cmd(0, "spawn", id="EZY1", arrival={"runway": "09/27", "threshold": "09"},
                  approach_delay=9))
    events = sim.apply(cmd(0, "touchdown", id="EZY1"))
    assert payloads(events, EventKind.MOBILE_MOVED) == [
        {"mobile": "EZY1", "segment": "S1", "touchdown": True}
    ]
    with pytest.raises(ScenarioError, match="not airborne"):
        sim.apply(cmd(0, "touchdown", id="EZY1"))
    sim.apply(cmd(0, "despawn", id="EZY1"))
    assert sim.world.mobiles == {}


# ----------------------------------------------------------------- stepping


def test_step_moves_only_inside_the_boundary(straight):
    sim = Simulation(straight)
    sim.apply(cmd(0, "spawn", id="DLH1", segment="TA",
                  route=["TA", "EA", "S1", "S2", "S3", "S4", "S5"]))
    events = sim.step()
    assert payloads(events, EventKind.MOBILE_MOVED) == [
        {"mobile": "DLH1", "segment": "EA"}
    ]
    # without a clearance the entry is as far as it goes
    assert sim.step() == []
    assert sim.world.mobile("DLH1").position == "EA"
    sim.apply(cmd(0, "clear", id="DLH1", clearance="LUP"))
    events = sim.step()
    assert payloads(events, EventKind.MOBILE_MOVED) == [
        {"mobile": "DLH1", "segment": "S1"}
    ]
    # lined up is as far as line-up goes
    assert payloads(sim.step(), EventKind.MOBILE_MOVED) == []


def test_step_hold_and_resume(straight):
    sim = Simulation(straight)
    sim.apply(cmd(0, "spawn", id="A", segment="GS", route_to="TA"))
    sim.apply(cmd(0, "hold", id="A"))
    assert sim.step() == []
    sim.apply(cmd(0, "resume", id="A"))
    assert payloads(sim.step(), EventKind.MOBILE_MOVED) == [
        {"mobile": "A", "segment": "GA"}
    ]


def test_step_approach_delay_then_touchdown(straight):
    sim = Simulation(straight)
    sim.apply(cmd(0, "spawn", id="EZY1", arrival={"runway": "09/27", "threshold": "09"},
                  clearance="LND", approach_delay=2))
    assert sim.step() == []  # delay 2 -> 1
    assert sim.step() == []  # delay 1 -> 0
    events = sim.step()
    assert payloads(events, EventKind.MOBILE_MOVED) == [
        {"mobile": "EZY1", "segment": "S1", "touchdown": True}
    ]
    # touched down, the roll continues on the ground
    assert payloads(sim.step(), EventKind.MOBILE_MOVED) == [
        {"mobile": "EZY1", "segment": "S2"}
    ]


def test_step_airborne_without_landing_clearance_waits(straight):
    sim = Simulation(straight)
    sim.apply(cmd(0, "spawn", id="EZY1", arrival={"runway": "09/27", "threshold": "09"},
                  approach_delay=0))
    for _ in range(3):
        assert sim.step() == []
    assert sim.world.mobile("EZY1").airborne


def test_step_auto_downgrade_on_runway_exit(straight):
    sim = Simulation(straight)
    sim.apply(cmd(0, "spawn", id="VEH1", segment="EM", kind="vehicle",
                  route=["EM", "S3", "XN"], clearance="CRS"))
    assert payloads(sim.step(), EventKind.MOBILE_MOVED) == [
        {"mobile": "VEH1", "segment": "S3"}
    ]
    events = sim.step()
    assert payloads(events, EventKind.MOBILE_MOVED) == [
        {"mobile": "VEH1", "segment": "XN"}
    ]
    assert payloads(events, EventKind.CLEARANCE_SET) == [
        {"mobile": "VEH1", "clearance": "NONE", "condition": None, "auto": True}
    ]
    assert sim.world.mobile("VEH1").clearance.ctype is C.NONE


def test_step_conflict_diff(straight):
    sim = Simulation(straight)
    sim.apply(cmd(0, "spawn", id="DLH1", segment="EA",
                  route=["EA", "S1", "S2", "S3", "S4", "S5"], clearance="TOF"))
    sim.apply(cmd(0, "spawn", id="EZY2", segment="S4", route=["S4", "S5", "EB"],
                  clearance="LND"))
    # detection runs after movement, so EZY2 has already rolled to S5
    events = sim.step()
    raised = payloads(events, EventKind.CONFLICT_RAISED)
    assert raised == [{"pair": ["DLH1", "EZY2"], "type": "TOF/LND",
                       "segments": ["S5"]}]
    # one more tick and EZY2 has vacated; the conflict drops
    events = sim.step()
    assert payloads(events, EventKind.CONFLICT_RESOLVED) == [
        {"pair": ["DLH1", "EZY2"], "type": "TOF/LND"}
    ]


def test_step_condition_upgrade_event(straight):
    sim = Simulation(straight)
    sim.apply(cmd(0, "spawn", id="EZY1", segment="S2",
                  route=["S2", "S3", "S4", "S5", "EB"], clearance="LND"))
    sim.apply(cmd(0, "spawn", id="VLG2", segment="EM",
                  route=["EM", "S3", "S4", "S5"], clearance="LUP", condition="EZY1"))
    sim.apply(cmd(0, "hold", id="VLG2"))
    # After the first tick EZY1's roll still covers the line-up segment
    # S3, so the condition stands; one tick later S3 is behind it.
    events = sim.step()
    assert payloads(events, EventKind.CONDITION_UPGRADED) == []
    events = sim.step()
    assert payloads(events, EventKind.CONDITION_UPGRADED) == [
        {"mobile": "VLG2", "clearance": "LUP"}
    ]
    assert sim.world.mobile("VLG2").clearance.condition is None


def test_step_unknown_condition_reported_once(straight):
    sim = Simulation(straight)
    sim.apply(cmd(0, "spawn", id="VLG2", segment="EM",
                  route=["EM", "S3", "S4", "S5"], clearance="LUP", condition="GHOST"))
    events = sim.step()
    assert payloads(events, EventKind.ERROR) == [
        {"mobile": "VLG2", "reason": "unknown condition subject GHOST"}
    ]
    assert payloads(sim.step(), EventKind.ERROR) == []


def test_step_reports_stranded_clearance(straight):
    # Only reachable by injecting a hand-built mobile: the command path
    # never leaves a crossing clearance without a runway on the route.
    stuck = Mobile("VEH1", MobileKind.VEHICLE, Route(("TA", "TW")), "TA",
                   Clearance(C.CROSS))
    sim = Simulation(straight)
    sim.world = sim.world.with_mobile(stuck)
    events = sim.step()
    assert payloads(events, EventKind.ERROR) == [
        {"mobile": "VEH1", "reason": "no runway segment on the route"}
    ]
    # the unusable clearance is dropped so the world stays well-formed
    assert payloads(events, EventKind.CLEARANCE_SET) == [
        {"mobile": "VEH1", "clearance": "NONE", "condition": None, "auto": True}
    ]
    assert sim.world.mobile("VEH1").position == "TA"
    assert sim.world.mobile("VEH1").clearance.ctype is C.NONE


def test_module_level_step(straight):
    lander = Mobile("EZY1", MobileKind.AIRCRAFT,
                    Route(("S1", "S2", "S3", "S4", "S5", "EB")), None,
                    Clearance(C.LAND))
    world = World(straight, {"EZY1": lander})
    after, events = step(world)
    assert after.mobile("EZY1").position == "S1"
    assert kinds(events) == [EventKind.MOBILE_MOVED]
    # the input world is untouched
    assert world.mobile("EZY1").airborne


# ---------------------------------------------------------------- scenarios


def test_run_scenario_cutoff(straight):
    commands = [
        cmd(0, "spawn", id="A", segment="GS", route_to="TA"),
        cmd(3, "hold", id="A"),
        cmd(7, "despawn", id="A"),
    ]
    events = run_scenario(straight, commands, max_ticks=3)
    # the hold at t=3 and everything after never ran
    moved = payloads(events, EventKind.MOBILE_MOVED)
    assert [e["segment"] for e in moved] == ["GA", "TW", "TA"]
    assert run_scenario(straight, commands, max_ticks=0) == []


def test_run_scenario_is_replayable(straight):
    from conftest import fixture_text

    commands = load_scenario(fixture_text("crs_crs.scenario"))
    first = events_to_jsonl(run_scenario(straight, commands, 1))
    second = events_to_jsonl(run_scenario(straight, commands, 1))
    assert first == second
    assert first.endswith("\n")


def test_event_json_shape():
    event = Event(3, 1, EventKind.ERROR, {"mobile": "A", "reason": "x"})
    assert event.to_json() == (
        '{"kind":"error","payload":{"mobile":"A","reason":"x"},"seq":1,"t":3}'
    )
    doc = json.loads(event.to_json())
    assert doc["t"] == 3 and doc["kind"] == "error"


def test_default_budget():
    assert DEFAULT_MAX_TICKS == 50
