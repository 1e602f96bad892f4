"""Clearance types, mobiles, and how far along its route each may go.

A clearance covers a prefix of the route (the cleared part); the rest is
only planned. The boundary index of that prefix is what detection works
from, so the rules here are the contract the rest of the package leans on:

  NONE / pending conditional  up to, excluding, the first runway segment
  LUP                         up to, including, the first runway segment
  CRS                         one past the first run of runway segments
  TOF                         the whole route
  LND                         one past the initial run of runway segments
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from enum import Enum

from .airport import AirportModel, is_runway_segment
from .errors import InvalidClearance, NoRunwayOnRoute, NotADepartureRoute, ValidationError
from .routing import Route, check_route, takeoff_run

log = logging.getLogger(__name__)


class ClearanceType(str, Enum):
    NONE = "NONE"
    LINE_UP = "LUP"
    CROSS = "CRS"
    TAKE_OFF = "TOF"
    LAND = "LND"


# Canonical order for naming a pair of clearance types.
_TYPE_ORDER = {
    ClearanceType.LINE_UP: 0,
    ClearanceType.CROSS: 1,
    ClearanceType.TAKE_OFF: 2,
    ClearanceType.LAND: 3,
}


def type_order(ctype: ClearanceType) -> int:
    return _TYPE_ORDER[ctype]


class MobileKind(str, Enum):
    AIRCRAFT = "aircraft"
    VEHICLE = "vehicle"


@dataclass(frozen=True)
class Clearance:
    """A clearance, optionally conditional on another mobile.

    A pending conditional clearance behaves like NONE until the
    condition is lifted; only line-up and crossing may be conditional.
    """

    ctype: ClearanceType = ClearanceType.NONE
    condition: str | None = None

    def __post_init__(self) -> None:
        if self.condition is not None and self.ctype not in (
            ClearanceType.LINE_UP,
            ClearanceType.CROSS,
        ):
            raise InvalidClearance(f"condition not allowed on {self.ctype.value}")


NO_CLEARANCE = Clearance()


def is_pending(clearance: Clearance) -> bool:
    return clearance.condition is not None


def is_effective(clearance: Clearance) -> bool:
    """Whether the clearance currently authorises anything."""
    return clearance.ctype is not ClearanceType.NONE and clearance.condition is None


@dataclass(frozen=True)
class Mobile:
    """An aircraft or vehicle, its route, and its current clearance.

    position is the segment the mobile occupies; None means airborne
    (an arrival that has not touched down yet). A present position is
    always the first segment of the route.
    """

    id: str
    kind: MobileKind
    route: Route
    position: str | None = None
    clearance: Clearance = field(default=NO_CLEARANCE)

    def __post_init__(self) -> None:
        if not self.id:
            raise ValueError("mobile needs an id")
        if self.position is not None and self.position != self.route.start:
            raise ValueError(
                f"mobile {self.id}: position {self.position} is not the route start"
            )
        if self.clearance.condition == self.id:
            raise InvalidClearance("condition references the mobile itself")

    @property
    def airborne(self) -> bool:
        return self.position is None


def validate_mobile(model: AirportModel, mobile: Mobile) -> list[str]:
    """Model-dependent soundness checks; returns violations."""
    v: list[str] = []
    try:
        check_route(model, mobile.route)
    except ValidationError as exc:
        v.extend(f"mobile {mobile.id}: {msg}" for msg in exc.violations)
        return v
    ctype = mobile.clearance.ctype
    if mobile.airborne:
        if ctype not in (ClearanceType.NONE, ClearanceType.LAND):
            v.append(f"mobile {mobile.id}: airborne with {ctype.value} clearance")
        if not is_runway_segment(model, mobile.route.start):
            v.append(f"mobile {mobile.id}: airborne route must start on a runway")
    if mobile.kind is MobileKind.VEHICLE and ctype not in (
        ClearanceType.NONE,
        ClearanceType.CROSS,
    ):
        v.append(f"mobile {mobile.id}: vehicle with {ctype.value} clearance")
    return v


NOTHING_CLEARED = -1


def cleared_boundary(model: AirportModel, route: Route, clearance: Clearance) -> int:
    """Index of the last cleared segment on the route.

    NOTHING_CLEARED (-1) means the mobile may not even leave its current
    segment. Raises NoRunwayOnRoute when the clearance needs a runway
    segment the route does not provide.
    """
    segs = route.segments
    on_runway = [is_runway_segment(model, s) for s in segs]
    last = len(segs) - 1
    ctype = clearance.ctype

    if ctype is ClearanceType.NONE or is_pending(clearance):
        for i, r in enumerate(on_runway):
            if r:
                return i - 1
        return last

    if ctype is ClearanceType.LINE_UP:
        for i, r in enumerate(on_runway):
            if r:
                return i
        raise NoRunwayOnRoute("no runway segment on the route")

    if ctype is ClearanceType.CROSS:
        first = next((i for i, r in enumerate(on_runway) if r), None)
        if first is None:
            raise NoRunwayOnRoute("no runway segment on the route")
        j = first
        while j + 1 <= last and on_runway[j + 1]:
            j += 1
        return min(j + 1, last)

    if ctype is ClearanceType.TAKE_OFF:
        if not any(on_runway):
            raise NoRunwayOnRoute("no runway segment on the route")
        return last

    # LND: the landing roll plus the first segment clear of the runway.
    if not on_runway[0]:
        raise NoRunwayOnRoute("landing route does not start on a runway")
    j = 0
    while j + 1 <= last and on_runway[j + 1]:
        j += 1
    return min(j + 1, last)


def cleared_segments(model: AirportModel, mobile: Mobile) -> tuple[str, ...]:
    """The cleared prefix of the mobile's route, possibly empty."""
    boundary = cleared_boundary(model, mobile.route, mobile.clearance)
    return mobile.route.segments[: boundary + 1]


def cleared_runway_segments(model: AirportModel, mobile: Mobile) -> frozenset[str]:
    """Runway segments inside the cleared part of the route.

    Empty unless the clearance is effective: NONE and pending
    conditional clearances never reach a runway segment.
    """
    if not is_effective(mobile.clearance):
        return frozenset()
    return frozenset(
        s for s in cleared_segments(model, mobile) if is_runway_segment(model, s)
    )


def apply_clearance(model: AirportModel, mobile: Mobile, clearance: Clearance) -> Mobile:
    """Give the mobile a clearance, validating it fits the mobile's state.

    Returns the updated mobile; raises InvalidClearance when the
    clearance makes no sense for this mobile on this route.
    """
    ctype = clearance.ctype
    if clearance.condition == mobile.id:
        raise InvalidClearance("condition references the mobile itself")
    if ctype is ClearanceType.NONE:
        return replace(mobile, clearance=clearance)
    if mobile.kind is MobileKind.VEHICLE and ctype is not ClearanceType.CROSS:
        raise InvalidClearance(f"vehicles cannot be cleared {ctype.value}")
    if mobile.airborne and ctype is not ClearanceType.LAND:
        raise InvalidClearance(f"airborne mobiles cannot be cleared {ctype.value}")

    if ctype in (ClearanceType.LINE_UP, ClearanceType.TAKE_OFF):
        try:
            run = takeoff_run(model, mobile.route)
        except NotADepartureRoute as exc:
            raise InvalidClearance(f"{ctype.value} needs a departure route: {exc}") from exc
        before_run = mobile.route.segments[: len(mobile.route.segments) - len(run)]
        if any(is_runway_segment(model, s) for s in before_run):
            log.warning(
                "mobile %s: route crosses a runway before the take-off run; "
                "that crossing needs its own clearance first",
                mobile.id,
            )
    elif ctype is ClearanceType.CROSS:
        segs = mobile.route.segments
        on_runway = [is_runway_segment(model, s) for s in segs]
        first = next((i for i, r in enumerate(on_runway) if r), None)
        if first is None:
            raise InvalidClearance("crossing needs a runway segment on the route")
        j = first
        while j + 1 < len(segs) and on_runway[j + 1]:
            j += 1
        if j == len(segs) - 1:
            raise InvalidClearance("route does not leave the runway after crossing")
    elif ctype is ClearanceType.LAND:
        if not is_runway_segment(model, mobile.route.start):
            raise InvalidClearance(
                "landing needs an airborne mobile or one on its landing runway"
            )
    return replace(mobile, clearance=clearance)


def next_expected_clearance(model: AirportModel, mobile: Mobile) -> ClearanceType:
    """The clearance an ATCO would give this mobile next.

    Departures go NONE, line up, take off; arrivals get their landing
    clearance while airborne; mobiles whose route crosses a runway get a
    crossing clearance. A pending conditional counts as already holding
    its type here, so the workflow looks one step further ahead.
    """
    ctype = mobile.clearance.ctype
    if mobile.airborne:
        return ClearanceType.LAND if ctype is ClearanceType.NONE else ClearanceType.NONE
    if ctype is ClearanceType.LINE_UP:
        return ClearanceType.TAKE_OFF
    if ctype is not ClearanceType.NONE:
        return ClearanceType.NONE
    try:
        takeoff_run(model, mobile.route)
    except NotADepartureRoute:
        pass
    else:
        return ClearanceType.LINE_UP
    first = next(
        (i for i, s in enumerate(mobile.route.segments) if is_runway_segment(model, s)),
        None,
    )
    if first is not None and first >= 1:
        return ClearanceType.CROSS
    return ClearanceType.NONE
