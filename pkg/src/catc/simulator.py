"""Deterministic discrete-tick world evolution driven by scenario scripts.

Time is a unitless tick; well-behaved traffic advances one segment per
tick and never beyond its cleared boundary. Scenario commands (spawn,
clear, advance, ...) execute at their tick, then the world steps:
movement and route truncation, conditional-clearance resolution,
conflict detection, and a diff against the previous conflict set. The
whole run is a pure function of (model, scenario, max_ticks); event
logs serialize byte-identically on replay.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from enum import Enum

import yaml

from .airport import AirportModel, is_runway_segment
from .clearances import (
    NO_CLEARANCE,
    Clearance,
    ClearanceType,
    Mobile,
    MobileKind,
    apply_clearance,
    cleared_boundary,
    is_effective,
    validate_mobile,
)
from .detection import (
    Conflict,
    World,
    detect_conflicts,
    resolve_conditionals,
    unknown_condition_subjects,
)
from .errors import CatcError, OffRoute, ParseError, ScenarioError
from .routing import (
    Route,
    check_route,
    compute_route,
    default_arrival_route,
    default_departure_route,
    truncate_to_position,
)


class EventKind(str, Enum):
    CONFLICT_RAISED = "conflict_raised"
    CONFLICT_RESOLVED = "conflict_resolved"
    CONDITION_UPGRADED = "condition_upgraded"
    MOBILE_MOVED = "mobile_moved"
    CLEARANCE_SET = "clearance_set"
    OFF_ROUTE = "off_route"
    ERROR = "error"


@dataclass(frozen=True)
class Event:
    """One log entry; (t, seq) totally orders the log."""

    t: int
    seq: int
    kind: EventKind
    payload: dict

    def to_json(self) -> str:
        doc = {"t": self.t, "seq": self.seq, "kind": self.kind.value, "payload": self.payload}
        return json.dumps(doc, sort_keys=True, separators=(",", ":"))


def events_to_jsonl(events: list[Event]) -> str:
    return "".join(e.to_json() + "\n" for e in events)


COMMAND_KINDS = (
    "spawn",
    "set_route",
    "clear",
    "advance",
    "hold",
    "resume",
    "touchdown",
    "despawn",
)


@dataclass(frozen=True)
class ScenarioCommand:
    t: int
    cmd: str
    args: dict = field(default_factory=dict)


def load_scenario(text: str) -> list[ScenarioCommand]:
    """Parse a scenario document into commands, sorted by tick.

    The document is either a list of command mappings or a mapping with
    a `commands` list; each command carries `t`, `cmd`, and the
    command's own arguments. Sorting is stable, so same-tick commands
    keep file order.
    """
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ParseError(f"invalid YAML: {exc}") from exc
    if isinstance(doc, dict):
        raw = doc.get("commands")
    else:
        raw = doc
    if not isinstance(raw, list):
        raise ParseError("scenario needs a list of commands")
    commands: list[ScenarioCommand] = []
    for entry in raw:
        if not isinstance(entry, dict):
            raise ParseError("each command must be a mapping")
        t = entry.get("t")
        cmd = entry.get("cmd")
        if not isinstance(t, int) or t < 0:
            raise ParseError(f"command needs a non-negative tick, got {t!r}")
        if cmd not in COMMAND_KINDS:
            raise ParseError(f"unknown command {cmd!r}")
        args = {k: v for k, v in entry.items() if k not in ("t", "cmd")}
        commands.append(ScenarioCommand(t, cmd, args))
    commands.sort(key=lambda c: c.t)
    return commands


DEFAULT_APPROACH_DELAY = 1
DEFAULT_MAX_TICKS = 50

_AUTO_DOWNGRADE = (ClearanceType.CROSS, ClearanceType.LAND)


class Simulation:
    """One evolving world plus the bookkeeping scenarios need.

    Holds per-mobile approach delays, hold flags, the previous conflict
    set for diffing, and the event sequence counter. All world updates
    are functional; the simulation only swaps in new World values.
    """

    def __init__(self, model: AirportModel, world: World | None = None):
        self.model = model
        self.world = world if world is not None else World(model, {})
        self.tick = 0
        self._seq = 0
        self._prev = detect_conflicts(self.world)
        self._delays: dict[str, int] = {}
        self._held: set[str] = set()
        self._reported_conditions: set[tuple[str, str]] = set()

    @property
    def conflicts(self) -> tuple[Conflict, ...]:
        return self._prev

    def _event(self, kind: EventKind, payload: dict) -> Event:
        event = Event(self.tick, self._seq, kind, payload)
        self._seq += 1
        return event

    # -- commands ----------------------------------------------------

    def apply(self, command: ScenarioCommand) -> list[Event]:
        """Run one command now, raising on failure."""
        handler = getattr(self, f"_cmd_{command.cmd}", None)
        if handler is None:
            raise ScenarioError(f"unknown command {command.cmd}")
        return handler(dict(command.args))

    def execute(self, command: ScenarioCommand) -> list[Event]:
        """Run one command now; failures become error events."""
        try:
            return self.apply(command)
        except OffRoute as exc:
            return [
                self._event(
                    EventKind.OFF_ROUTE,
                    {"command": command.cmd, "mobile": command.args.get("id"), "reason": str(exc)},
                )
            ]
        except CatcError as exc:
            return [
                self._event(
                    EventKind.ERROR,
                    {"command": command.cmd, "mobile": command.args.get("id"), "reason": str(exc)},
                )
            ]

    def _require(self, args: dict, key: str):
        if key not in args:
            raise ScenarioError(f"missing argument {key}")
        return args[key]

    @staticmethod
    def _route_spec(spec, name: str) -> dict:
        if not isinstance(spec, dict) or "runway" not in spec or "threshold" not in spec:
            raise ScenarioError(f"{name} needs runway and threshold")
        return spec

    def _spawn_route(self, args: dict, position: str | None) -> Route:
        if "route" in args:
            raw = args["route"]
            if not isinstance(raw, list) or not all(isinstance(s, str) for s in raw):
                raise ScenarioError("route must be a list of segment ids")
            route = Route(tuple(raw))
            check_route(self.model, route)
            if position is not None and route.start != position:
                raise ScenarioError("route must start at the spawn segment")
            return route
        if "route_to" in args:
            if position is None:
                raise ScenarioError("route_to needs a spawn segment")
            return compute_route(self.model, position, args["route_to"])
        if "arrival" in args:
            spec = self._route_spec(args["arrival"], "arrival")
            route = default_arrival_route(
                self.model, spec["runway"], spec["threshold"], spec.get("stand")
            )
            if position is not None:
                route = truncate_to_position(route, position)
            return route
        if "departure" in args:
            if position is None:
                raise ScenarioError("a departure spawn needs a stand segment")
            spec = self._route_spec(args["departure"], "departure")
            return default_departure_route(
                self.model, position, spec["runway"], spec["threshold"], spec.get("entry")
            )
        if position is None:
            raise ScenarioError("an airborne spawn needs a route")
        return Route((position,))

    def _cmd_spawn(self, args: dict) -> list[Event]:
        mid = self._require(args, "id")
        if mid in self.world.mobiles:
            raise ScenarioError(f"mobile {mid} already exists")
        try:
            kind = MobileKind(args.get("kind", "aircraft"))
        except ValueError:
            raise ScenarioError(f"unknown mobile kind {args.get('kind')!r}") from None
        position = args.get("segment")
        if position is not None:
            self.model.segment(position)
        route = self._spawn_route(args, position)
        mobile = Mobile(mid, kind, route, position)
        events: list[Event] = []
        ctype_raw = args.get("clearance", "NONE")
        condition = args.get("condition")
        if ctype_raw != "NONE" or condition is not None:
            try:
                ctype = ClearanceType(ctype_raw)
            except ValueError:
                raise ScenarioError(f"unknown clearance {ctype_raw!r}") from None
            mobile = apply_clearance(self.model, mobile, Clearance(ctype, condition))
            events.append(
                self._event(
                    EventKind.CLEARANCE_SET,
                    {"mobile": mid, "clearance": ctype.value, "condition": condition},
                )
            )
        bad = validate_mobile(self.model, mobile)
        if bad:
            raise ScenarioError("; ".join(bad))
        if mobile.airborne:
            delay = args.get("approach_delay", DEFAULT_APPROACH_DELAY)
            if not isinstance(delay, int) or delay < 0:
                raise ScenarioError("approach_delay must be a non-negative integer")
            self._delays[mid] = delay
        self.world = self.world.with_mobile(mobile)
        return events

    def _cmd_clear(self, args: dict) -> list[Event]:
        mid = self._require(args, "id")
        mobile = self.world.mobile(mid)
        try:
            ctype = ClearanceType(self._require(args, "clearance"))
        except ValueError:
            raise ScenarioError(f"unknown clearance {args.get('clearance')!r}") from None
        condition = args.get("condition")
        updated = apply_clearance(self.model, mobile, Clearance(ctype, condition))
        self.world = self.world.with_mobile(updated)
        return [
            self._event(
                EventKind.CLEARANCE_SET,
                {"mobile": mid, "clearance": ctype.value, "condition": condition},
            )
        ]

    def _cmd_set_route(self, args: dict) -> list[Event]:
        mid = self._require(args, "id")
        mobile = self.world.mobile(mid)
        if "route" in args:
            raw = args["route"]
            if not isinstance(raw, list) or not all(isinstance(s, str) for s in raw):
                raise ScenarioError("route must be a list of segment ids")
            route = Route(tuple(raw))
            check_route(self.model, route)
            if mobile.position is not None:
                route = truncate_to_position(route, mobile.position)
        elif "route_to" in args:
            if mobile.position is None:
                raise ScenarioError("route_to needs a mobile on the ground")
            route = compute_route(self.model, mobile.position, args["route_to"])
        else:
            raise ScenarioError("set_route needs route or route_to")
        updated = replace(mobile, route=route)
        bad = validate_mobile(self.model, updated)
        if bad:
            raise ScenarioError("; ".join(bad))
        # the clearance must still make sense on the new route
        cleared_boundary(self.model, route, updated.clearance)
        self.world = self.world.with_mobile(updated)
        return []

    def _cmd_advance(self, args: dict) -> list[Event]:
        mid = self._require(args, "id")
        mobile = self.world.mobile(mid)
        if mobile.airborne:
            raise ScenarioError(f"mobile {mid} is airborne")
        n = args.get("n", 1)
        if not isinstance(n, int) or n < 1:
            raise ScenarioError("n must be a positive integer")
        # checked up front so a failed advance leaves nothing half-moved
        remaining = len(mobile.route.segments) - 1
        if remaining == 0:
            raise ScenarioError(f"mobile {mid} has no route left to advance along")
        if n > remaining:
            raise ScenarioError(f"mobile {mid} cannot advance {n}: only {remaining} left")
        events: list[Event] = []
        for _ in range(n):
            self._move(mid, events, forced=True)
        return events

    def _cmd_hold(self, args: dict) -> list[Event]:
        mid = self._require(args, "id")
        self.world.mobile(mid)
        self._held.add(mid)
        return []

    def _cmd_resume(self, args: dict) -> list[Event]:
        mid = self._require(args, "id")
        self.world.mobile(mid)
        self._held.discard(mid)
        return []

    def _cmd_touchdown(self, args: dict) -> list[Event]:
        mid = self._require(args, "id")
        mobile = self.world.mobile(mid)
        if not mobile.airborne:
            raise ScenarioError(f"mobile {mid} is not airborne")
        events: list[Event] = []
        self._touch_down(mid, events)
        return events

    def _cmd_despawn(self, args: dict) -> list[Event]:
        mid = self._require(args, "id")
        self.world.mobile(mid)
        self.world = self.world.without_mobile(mid)
        self._delays.pop(mid, None)
        self._held.discard(mid)
        return []

    # -- stepping ----------------------------------------------------

    def _touch_down(self, mid: str, events: list[Event]) -> None:
        mobile = self.world.mobiles[mid]
        updated = replace(mobile, position=mobile.route.start)
        self.world = self.world.with_mobile(updated)
        self._delays.pop(mid, None)
        events.append(
            self._event(
                EventKind.MOBILE_MOVED,
                {"mobile": mid, "segment": updated.position, "touchdown": True},
            )
        )

    def _move(self, mid: str, events: list[Event], forced: bool) -> None:
        mobile = self.world.mobiles[mid]
        old_pos = mobile.route.start
        route = Route(mobile.route.segments[1:])
        clearance = mobile.clearance
        downgraded = False
        # Leaving the runway consumes a crossing or landing clearance:
        # it covered exactly this excursion onto the runway.
        if (
            clearance.ctype in _AUTO_DOWNGRADE
            and is_runway_segment(self.model, old_pos)
            and not is_runway_segment(self.model, route.start)
        ):
            clearance = NO_CLEARANCE
            downgraded = True
        updated = replace(mobile, route=route, position=route.start, clearance=clearance)
        self.world = self.world.with_mobile(updated)
        payload = {"mobile": mid, "segment": route.start}
        if forced:
            payload["forced"] = True
        events.append(self._event(EventKind.MOBILE_MOVED, payload))
        if downgraded:
            events.append(
                self._event(
                    EventKind.CLEARANCE_SET,
                    {"mobile": mid, "clearance": "NONE", "condition": None, "auto": True},
                )
            )

    def step(self) -> list[Event]:
        """One tick: move, truncate, resolve conditionals, detect, diff."""
        events: list[Event] = []
        for mid in sorted(self.world.mobiles):
            if mid in self._held:
                continue
            mobile = self.world.mobiles[mid]
            if mobile.airborne:
                left = self._delays.get(mid, 0)
                if left > 0:
                    self._delays[mid] = left - 1
                elif (
                    is_effective(mobile.clearance)
                    and mobile.clearance.ctype is ClearanceType.LAND
                ):
                    self._touch_down(mid, events)
                continue
            try:
                boundary = cleared_boundary(self.model, mobile.route, mobile.clearance)
            except CatcError as exc:
                # A clearance its route can no longer honour gets dropped,
                # so the world stays well-formed for detection.
                events.append(
                    self._event(EventKind.ERROR, {"mobile": mid, "reason": str(exc)})
                )
                self.world = self.world.with_mobile(
                    replace(mobile, clearance=NO_CLEARANCE)
                )
                events.append(
                    self._event(
                        EventKind.CLEARANCE_SET,
                        {"mobile": mid, "clearance": "NONE", "condition": None, "auto": True},
                    )
                )
                continue
            if len(mobile.route.segments) > 1 and boundary >= 1:
                self._move(mid, events, forced=False)

        self.world, upgraded = resolve_conditionals(self.world)
        for mid in upgraded:
            mobile = self.world.mobiles[mid]
            events.append(
                self._event(
                    EventKind.CONDITION_UPGRADED,
                    {"mobile": mid, "clearance": mobile.clearance.ctype.value},
                )
            )
        for mid, subject in unknown_condition_subjects(self.world):
            if (mid, subject) in self._reported_conditions:
                continue
            self._reported_conditions.add((mid, subject))
            events.append(
                self._event(
                    EventKind.ERROR,
                    {"mobile": mid, "reason": f"unknown condition subject {subject}"},
                )
            )

        current = detect_conflicts(self.world)
        prev_keys = {(c.pair, c.ctype) for c in self._prev}
        cur_keys = {(c.pair, c.ctype) for c in current}
        for c in current:
            if (c.pair, c.ctype) not in prev_keys:
                events.append(self._event(EventKind.CONFLICT_RAISED, c.to_dict()))
        for c in self._prev:
            if (c.pair, c.ctype) not in cur_keys:
                events.append(
                    self._event(
                        EventKind.CONFLICT_RESOLVED,
                        {"pair": list(c.pair), "type": c.ctype.value},
                    )
                )
        self._prev = current
        self.tick += 1
        return events


def step(world: World) -> tuple[World, list[Event]]:
    """One tick over a bare world, outside any scenario.

    Approach delays default to zero here: airborne landers with an
    effective clearance touch down immediately.
    """
    sim = Simulation(world.model, world=world)
    events = sim.step()
    return sim.world, events


def run_scenario(
    model: AirportModel, commands: list[ScenarioCommand], max_ticks: int = DEFAULT_MAX_TICKS
) -> list[Event]:
    """Execute a scenario for exactly max_ticks ticks.

    Commands run at the start of their tick, in file order, before the
    world steps. Commands scheduled at or past max_ticks never run.
    """
    sim = Simulation(model)
    by_tick: dict[int, list[ScenarioCommand]] = {}
    for cmd in commands:
        by_tick.setdefault(cmd.t, []).append(cmd)
    events: list[Event] = []
    for t in range(max_ticks):
        for cmd in by_tick.get(t, ()):
            events.extend(sim.execute(cmd))
        events.extend(sim.step())
    return events
