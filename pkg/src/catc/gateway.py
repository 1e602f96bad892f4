"""WebSocket gateway: one engine, many console sessions.

Mutating messages are serialized through a single lock and answered
with a broadcast to every session (event batches first, then one
snapshot), so all consoles see the same ordered history. Probes and
snapshot requests are read-only and answered only to the requester.
"""

from __future__ import annotations

import asyncio
import json

from fastapi import FastAPI, WebSocket, WebSocketDisconnect

from .airport import AirportModel, load_airport
from .clearances import (
    NOTHING_CLEARED,
    Clearance,
    ClearanceType,
    Mobile,
    cleared_boundary,
    next_expected_clearance,
)
from .detection import ProbeResult, probe
from .errors import CatcError, InvalidClearance
from .simulator import Event, ScenarioCommand, Simulation, load_scenario


class Engine:
    """The single simulation behind the gateway.

    Methods are synchronous and must be called with the app's mutation
    lock held (reads excepted); the lock is what makes the many-session
    ordering guarantees hold.
    """

    def __init__(self, model: AirportModel, scenario: list[ScenarioCommand] | None = None):
        self.sim = Simulation(model)
        self._pending: dict[int, list[ScenarioCommand]] = {}
        self._queue_scenario(scenario or [])

    def _queue_scenario(self, commands: list[ScenarioCommand]) -> None:
        self._pending = {}
        for cmd in commands:
            self._pending.setdefault(cmd.t, []).append(cmd)

    def load_airport(self, text: str) -> None:
        model = load_airport(text)
        self.sim = Simulation(model)
        self._pending = {}

    def load_scenario(self, text: str) -> None:
        """Queue a scenario against a fresh world on the current airport."""
        commands = load_scenario(text)
        self.sim = Simulation(self.sim.model)
        self._queue_scenario(commands)

    def step_ticks(self, n: int) -> list[list[Event]]:
        """Advance n ticks; scheduled scenario commands run at their tick."""
        batches = []
        for _ in range(n):
            events: list[Event] = []
            for cmd in self._pending.get(self.sim.tick, ()):
                events.extend(self.sim.execute(cmd))
            events.extend(self.sim.step())
            batches.append(events)
        return batches

    def mutate(self, cmd: ScenarioCommand) -> list[Event]:
        return self.sim.apply(cmd)

    def probe(self, mobile_id: str, clearance: Clearance) -> ProbeResult:
        return probe(self.sim.world, mobile_id, clearance)

    def _mobile_entry(self, mobile: Mobile) -> dict:
        model = self.sim.model
        try:
            boundary = cleared_boundary(model, mobile.route, mobile.clearance)
        except CatcError:
            boundary = NOTHING_CLEARED
        expected = next_expected_clearance(model, mobile)
        probe_entry = None
        if expected is not ClearanceType.NONE:
            try:
                result = probe(self.sim.world, mobile.id, Clearance(expected))
                probe_entry = {
                    "clearance": expected.value,
                    "verdict": result.verdict.value,
                }
            except InvalidClearance:
                probe_entry = None
        in_conflict = any(mobile.id in c.pair for c in self.sim.conflicts)
        return {
            "id": mobile.id,
            "kind": mobile.kind.value,
            "airborne": mobile.airborne,
            "position": mobile.position,
            "route": list(mobile.route.segments),
            "cleared_boundary": boundary,
            "clearance": mobile.clearance.ctype.value,
            "condition": mobile.clearance.condition,
            "next_expected": expected.value,
            "probe": probe_entry,
            "in_conflict": in_conflict,
        }

    def _airport_entry(self) -> dict:
        model = self.sim.model
        segments = []
        for sid in sorted(model.segments):
            seg = model.segments[sid]
            segments.append(
                {
                    "id": seg.id,
                    "kind": seg.kind.value,
                    "neighbors": sorted(seg.neighbors),
                    "runways": sorted(seg.runways),
                    "polygon": None if seg.polygon is None else [list(p) for p in seg.polygon],
                    "centerline": None
                    if seg.centerline is None
                    else [list(p) for p in seg.centerline],
                }
            )
        runways = [
            {
                "id": rwy.id,
                "segments": list(rwy.segments),
                "thresholds": list(rwy.thresholds),
                "multiple_line_up_authorised": rwy.multiple_line_up_authorised,
            }
            for rwy in (model.runways[r] for r in sorted(model.runways))
        ]
        return {"name": model.name, "segments": segments, "runways": runways}

    def snapshot(self) -> dict:
        world = self.sim.world
        return {
            "tick": self.sim.tick,
            "airport": self._airport_entry(),
            "mobiles": [
                self._mobile_entry(world.mobiles[mid]) for mid in sorted(world.mobiles)
            ],
            "conflicts": [c.to_dict() for c in self.sim.conflicts],
        }


def _event_dict(event: Event) -> dict:
    return {"t": event.t, "seq": event.seq, "kind": event.kind.value, "payload": event.payload}


_MUTATIONS = ("load_airport", "load_scenario", "step", "clear", "set_route", "advance")


def create_app(engine: Engine) -> FastAPI:
    app = FastAPI()
    sessions: set[WebSocket] = set()
    lock = asyncio.Lock()

    async def broadcast(messages: list[dict]) -> None:
        for ws in list(sessions):
            try:
                for msg in messages:
                    await ws.send_json(msg)
            except Exception:
                sessions.discard(ws)

    async def handle_mutation(msg: dict) -> list[dict]:
        mtype = msg["type"]
        if mtype == "load_airport":
            engine.load_airport(msg.get("text", ""))
            batches: list[list[Event]] = []
        elif mtype == "load_scenario":
            engine.load_scenario(msg.get("text", ""))
            batches = []
        elif mtype == "step":
            n = msg.get("n", 1)
            if not isinstance(n, int) or n < 1:
                raise CatcError("n must be a positive integer")
            batches = engine.step_ticks(n)
        else:
            payload = {k: v for k, v in msg.items() if k not in ("type", "id", "mobile")}
            if "mobile" in msg:
                payload["id"] = msg["mobile"]
            events = engine.mutate(ScenarioCommand(engine.sim.tick, mtype, payload))
            batches = [events] if events else []
        out = [
            {"type": "events", "events": [_event_dict(e) for e in batch]}
            for batch in batches
        ]
        out.append({"type": "snapshot", "payload": engine.snapshot()})
        return out

    @app.websocket("/ws")
    async def ws_endpoint(ws: WebSocket) -> None:
        await ws.accept()
        sessions.add(ws)
        try:
            while True:
                raw = await ws.receive_text()
                try:
                    msg = json.loads(raw)
                except json.JSONDecodeError:
                    await ws.send_json({"type": "error", "id": None, "reason": "not JSON"})
                    continue
                if not isinstance(msg, dict):
                    await ws.send_json({"type": "error", "id": None, "reason": "not an object"})
                    continue
                corr = msg.get("id")
                mtype = msg.get("type")
                try:
                    if mtype == "probe":
                        clearance = Clearance(
                            ClearanceType(msg["clearance"]), msg.get("condition")
                        )
                        result = engine.probe(msg["mobile"], clearance)
                        await ws.send_json(
                            {
                                "type": "probe_result",
                                "id": corr,
                                "mobile": msg["mobile"],
                                "clearance": msg["clearance"],
                                "verdict": result.verdict.value,
                                "conflicts": [c.to_dict() for c in result.conflicts],
                            }
                        )
                    elif mtype == "snapshot_request":
                        await ws.send_json(
                            {"type": "snapshot", "id": corr, "payload": engine.snapshot()}
                        )
                    elif mtype in _MUTATIONS:
                        async with lock:
                            messages = await handle_mutation(msg)
                            await broadcast(messages)
                    else:
                        await ws.send_json(
                            {"type": "error", "id": corr, "reason": f"unknown type {mtype!r}"}
                        )
                except (CatcError, KeyError, ValueError) as exc:
                    await ws.send_json({"type": "error", "id": corr, "reason": str(exc)})
        except WebSocketDisconnect:
            pass
        finally:
            sessions.discard(ws)

    return app
