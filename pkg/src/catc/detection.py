"""Route-based detection of conflicting runway clearances.

The base rule: two mobiles are in conflict when some runway segment is
cleared for both, unless both hold slow clearances (line-up, crossing)
and approach the segment from the same direction. On top of that,
line-up clearances guard their whole take-off run, cleared or not, so
two line-ups on one runway conflict even before either holds a take-off
clearance.

Everything here is pure: worlds are treated as immutable values and all
results are deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum

from .airport import AirportModel
from .clearances import (
    Clearance,
    ClearanceType,
    Mobile,
    MobileKind,
    apply_clearance,
    cleared_runway_segments,
    is_effective,
    is_pending,
    type_order,
    validate_mobile,
)
from .errors import NotADepartureRoute, SegmentNotOnRoute, UnknownMobile
from .routing import Route, takeoff_run, takeoff_runway_ids


class Direction(Enum):
    SAME = "same"
    DIFFERENT = "different"
    UNDETERMINED = "undetermined"


class ConflictType(str, Enum):
    LUP_LUP = "LUP/LUP"
    LUP_CRS = "LUP/CRS"
    LUP_TOF = "LUP/TOF"
    LUP_LND = "LUP/LND"
    CRS_CRS = "CRS/CRS"
    CRS_TOF = "CRS/TOF"
    CRS_LND = "CRS/LND"
    TOF_TOF = "TOF/TOF"
    TOF_LND = "TOF/LND"
    LND_LND = "LND/LND"


def classify(a: ClearanceType, b: ClearanceType) -> ConflictType:
    """Canonical name for the unordered pair of clearance types."""
    x, y = sorted((a, b), key=type_order)
    return ConflictType(f"{x.value}/{y.value}")


@dataclass(frozen=True)
class Conflict:
    """A pair of mobiles whose clearances collide, with the evidence."""

    pair: tuple[str, str]
    ctype: ConflictType
    shared: tuple[str, ...]

    def to_dict(self) -> dict:
        return {
            "pair": list(self.pair),
            "type": self.ctype.value,
            "segments": list(self.shared),
        }


class Verdict(str, Enum):
    GREEN = "green"
    RED = "red"


@dataclass(frozen=True)
class ProbeResult:
    """Outcome of a what-if clearance evaluation."""

    verdict: Verdict
    conflicts: tuple[Conflict, ...]


@dataclass(frozen=True)
class World:
    """All mobiles currently under control, over one airport model.

    Treated as an immutable value: updates go through with_mobile /
    without_mobile, which leave the original untouched.
    """

    model: AirportModel
    mobiles: dict[str, Mobile]

    def mobile(self, mobile_id: str) -> Mobile:
        try:
            return self.mobiles[mobile_id]
        except KeyError:
            raise UnknownMobile(f"unknown mobile {mobile_id}") from None

    def with_mobile(self, mobile: Mobile) -> World:
        mobiles = dict(self.mobiles)
        mobiles[mobile.id] = mobile
        return World(self.model, mobiles)

    def without_mobile(self, mobile_id: str) -> World:
        mobiles = dict(self.mobiles)
        mobiles.pop(mobile_id, None)
        return World(self.model, mobiles)

    def validate(self) -> list[str]:
        v: list[str] = []
        for mid in sorted(self.mobiles):
            v.extend(validate_mobile(self.model, self.mobiles[mid]))
        return v


def world_to_dict(world: World) -> dict:
    """Canonical serializable form of a world, stable across runs."""
    return {
        "mobiles": {
            mid: {
                "kind": m.kind.value,
                "position": m.position,
                "route": list(m.route.segments),
                "clearance": {
                    "type": m.clearance.ctype.value,
                    "condition": m.clearance.condition,
                },
            }
            for mid, m in sorted(world.mobiles.items())
        }
    }


def same_direction(route_a: Route, route_b: Route, s: str) -> Direction:
    """How two routes approach a segment they both contain.

    Direction is read off the predecessor of the segment's first
    occurrence on each route. When a route starts at the segment there
    is no predecessor; equal successors then mean the two are traversing
    it against each other (head-on or merging from opposite sides),
    anything else stays Undetermined.
    """
    try:
        ia = route_a.segments.index(s)
        ib = route_b.segments.index(s)
    except ValueError:
        raise SegmentNotOnRoute(f"segment {s} is not on both routes") from None
    pred_a = route_a.segments[ia - 1] if ia > 0 else None
    pred_b = route_b.segments[ib - 1] if ib > 0 else None
    if pred_a is not None and pred_b is not None:
        return Direction.SAME if pred_a == pred_b else Direction.DIFFERENT
    succ_a = route_a.segments[ia + 1] if ia + 1 < len(route_a.segments) else None
    succ_b = route_b.segments[ib + 1] if ib + 1 < len(route_b.segments) else None
    if succ_a is not None and succ_a == succ_b:
        return Direction.DIFFERENT
    return Direction.UNDETERMINED


_SLOW = (ClearanceType.LINE_UP, ClearanceType.CROSS)


def _same_travel_direction(route_a: Route, route_b: Route, s: str) -> bool:
    """Whether both routes leave the segment onto the same next segment."""

    def succ(route: Route) -> str | None:
        try:
            i = route.segments.index(s)
        except ValueError:
            return None
        return route.segments[i + 1] if i + 1 < len(route.segments) else None

    succ_a = succ(route_a)
    return succ_a is not None and succ_a == succ(route_b)


def _lup_special_candidates(
    world: World,
    a_id: str,
    effective: dict[str, Mobile],
    cleared: dict[str, frozenset[str]],
) -> list[tuple[tuple[str, str], str]]:
    """(pair, segment) hits of the line-up take-off-run rule for mobile a.

    A line-up clearance reserves the whole take-off run, so any other
    aircraft lined up anywhere on that run is a hit. The hit is waived
    only where multiple line-up is authorised on the runway and both
    aircraft face the same way down it.
    """
    model = world.model
    a = effective[a_id]
    try:
        run = takeoff_run(model, a.route)
        run_ids = takeoff_runway_ids(model, a.route)
    except NotADepartureRoute:
        return []
    run_set = set(run)
    multiple_ok = all(model.runway(r).multiple_line_up_authorised for r in run_ids)
    out: list[tuple[tuple[str, str], str]] = []
    for b_id in sorted(effective):
        if b_id == a_id:
            continue
        b = effective[b_id]
        if b.kind is not MobileKind.AIRCRAFT:
            continue
        if b.clearance.ctype is not ClearanceType.LINE_UP:
            continue
        for s in sorted(cleared[b_id] & run_set):
            if multiple_ok and _same_travel_direction(a.route, b.route, s):
                continue
            pair = (a_id, b_id) if a_id < b_id else (b_id, a_id)
            out.append((pair, s))
    return out


def _effective_mobiles(world: World) -> dict[str, Mobile]:
    return {
        mid: m for mid, m in world.mobiles.items() if is_effective(m.clearance)
    }


def lup_special(world: World, a_id: str) -> tuple[Conflict, ...]:
    """Line-up conflicts grounded in mobile a's take-off run."""
    effective = _effective_mobiles(world)
    if a_id not in effective:
        return ()
    cleared = {
        mid: cleared_runway_segments(world.model, m) for mid, m in effective.items()
    }
    found: dict[tuple[str, str], set[str]] = {}
    for pair, s in _lup_special_candidates(world, a_id, effective, cleared):
        found.setdefault(pair, set()).add(s)
    conflicts = [
        Conflict(pair, ConflictType.LUP_LUP, tuple(sorted(segs)))
        for pair, segs in found.items()
    ]
    conflicts.sort(key=lambda c: (c.pair, c.shared))
    return tuple(conflicts)


def detect_conflicts(world: World) -> tuple[Conflict, ...]:
    """All clearance conflicts in the world, one per pair of mobiles.

    Pending conditional clearances count as no clearance at all. The
    result is sorted by pair then shared segments, so identical worlds
    always serialize identically.
    """
    model = world.model
    effective = _effective_mobiles(world)
    cleared = {mid: cleared_runway_segments(model, m) for mid, m in effective.items()}
    found: dict[tuple[str, str], set[str]] = {}
    ids = sorted(effective)
    for i, a_id in enumerate(ids):
        for b_id in ids[i + 1 :]:
            a, b = effective[a_id], effective[b_id]
            hits = set()
            for s in cleared[a_id] & cleared[b_id]:
                if (
                    a.clearance.ctype in _SLOW
                    and b.clearance.ctype in _SLOW
                    and same_direction(a.route, b.route, s) is Direction.SAME
                ):
                    continue
                hits.add(s)
            if hits:
                found.setdefault((a_id, b_id), set()).update(hits)
    for a_id in ids:
        if effective[a_id].clearance.ctype is ClearanceType.LINE_UP:
            for pair, s in _lup_special_candidates(world, a_id, effective, cleared):
                found.setdefault(pair, set()).add(s)
    conflicts = []
    for (a_id, b_id), segs in found.items():
        ctype = classify(effective[a_id].clearance.ctype, effective[b_id].clearance.ctype)
        conflicts.append(Conflict((a_id, b_id), ctype, tuple(sorted(segs))))
    conflicts.sort(key=lambda c: (c.pair, c.shared))
    return tuple(conflicts)


def unknown_condition_subjects(world: World) -> list[tuple[str, str]]:
    """Pending conditionals whose condition mobile does not exist."""
    out = []
    for mid in sorted(world.mobiles):
        m = world.mobiles[mid]
        if is_pending(m.clearance) and m.clearance.condition not in world.mobiles:
            out.append((mid, m.clearance.condition))
    return out


def resolve_conditionals(world: World) -> tuple[World, list[str]]:
    """Lift conditions that no longer stand in the way.

    A pending conditional clearance becomes effective at the first
    opportunity where stripping the condition creates no conflict
    between the mobile and its condition subject; conflicts with third
    mobiles do not hold the upgrade back. Runs to a fixed point in
    mobile-id order, since one upgrade may unblock another. Conditions
    naming unknown mobiles are left pending.
    """
    upgraded: list[str] = []
    changed = True
    while changed:
        changed = False
        for mid in sorted(world.mobiles):
            m = world.mobiles[mid]
            if not is_pending(m.clearance):
                continue
            subject = m.clearance.condition
            if subject not in world.mobiles:
                continue
            stripped = replace(m, clearance=Clearance(m.clearance.ctype))
            hypothetical = world.with_mobile(stripped)
            pair = (mid, subject) if mid < subject else (subject, mid)
            if any(c.pair == pair for c in detect_conflicts(hypothetical)):
                continue
            world = hypothetical
            upgraded.append(mid)
            changed = True
    return world, upgraded


def probe(world: World, mobile_id: str, candidate: Clearance) -> ProbeResult:
    """Evaluate a clearance without giving it.

    Green means the clearance would stand alone; Red comes with the
    conflicts it would create. The world is never modified. Invalid
    clearances raise InvalidClearance instead of going Red: a Red probe
    is a valid but conflicting clearance.
    """
    mobile = world.mobile(mobile_id)
    changed = apply_clearance(world.model, mobile, candidate)
    hypothetical = world.with_mobile(changed)
    involved = tuple(
        c for c in detect_conflicts(hypothetical) if mobile_id in c.pair
    )
    return ProbeResult(Verdict.RED if involved else Verdict.GREEN, involved)
