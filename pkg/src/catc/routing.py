"""Routes over the segment graph and the geometry derived from them.

A route is an ordered list of pairwise-adjacent segments. Routes always
start at the mobile's current position, so following surveillance means
cutting segments off the front.
"""

from __future__ import annotations

from dataclasses import dataclass

from .airport import AirportModel, Point, is_runway_segment
from .errors import (
    MissingCenterline,
    NoPath,
    NotADepartureRoute,
    NotOnRunway,
    OffRoute,
    UnknownSegment,
    ValidationError,
)


@dataclass(frozen=True)
class Route:
    """An ordered, non-empty sequence of segment ids."""

    segments: tuple[str, ...]

    def __post_init__(self) -> None:
        if not self.segments:
            raise ValueError("route must be non-empty")
        for a, b in zip(self.segments, self.segments[1:]):
            if a == b:
                raise ValueError(f"route repeats segment {a} consecutively")

    @property
    def start(self) -> str:
        return self.segments[0]

    @property
    def end(self) -> str:
        return self.segments[-1]


def check_route(model: AirportModel, route: Route) -> None:
    """Raise ValidationError unless every hop exists and is adjacent."""
    v: list[str] = []
    for s in route.segments:
        if s not in model.segments:
            v.append(f"unknown segment {s}")
    if not v:
        for a, b in zip(route.segments, route.segments[1:]):
            if b not in model.segments[a].neighbors:
                v.append(f"segments {a}/{b} not adjacent")
    if v:
        raise ValidationError(v)


def compute_route(model: AirportModel, start: str, goal: str) -> Route:
    """Shortest route between two segments, ties broken lexicographically."""
    model.segment(start)
    model.segment(goal)
    dist = {goal: 0}
    frontier = [goal]
    while frontier:
        nxt = []
        for s in frontier:
            for n in sorted(model.segments[s].neighbors):
                if n not in dist:
                    dist[n] = dist[s] + 1
                    nxt.append(n)
        frontier = nxt
    if start not in dist:
        raise NoPath(f"no route from {start} to {goal}")
    path = [start]
    while path[-1] != goal:
        here = path[-1]
        path.append(
            min(n for n in model.segments[here].neighbors if dist.get(n) == dist[here] - 1)
        )
    return Route(tuple(path))


def truncate_to_position(route: Route, position: str) -> Route:
    """The suffix of the route from the first occurrence of position."""
    try:
        i = route.segments.index(position)
    except ValueError:
        raise OffRoute(f"segment {position} is not on the route") from None
    return Route(route.segments[i:])


def takeoff_run(model: AirportModel, route: Route) -> tuple[str, ...]:
    """The trailing run of runway segments the route ends with.

    The run is the maximal suffix of runway segments that stay on one
    runway (segments shared between crossing runways keep the run going
    as long as some runway is common to all of it). Raises
    NotADepartureRoute when the route does not end on a runway.
    """
    segs = route.segments
    if not is_runway_segment(model, segs[-1]):
        raise NotADepartureRoute("route does not end on a runway")
    common = model.segment(segs[-1]).runways
    cut = len(segs) - 1
    for i in range(len(segs) - 2, -1, -1):
        seg = model.segment(segs[i])
        if seg.kind.value != "runway":
            break
        narrowed = common & seg.runways
        if not narrowed:
            break
        common = narrowed
        cut = i
    return segs[cut:]


def takeoff_runway_ids(model: AirportModel, route: Route) -> frozenset[str]:
    """Runway ids common to the whole take-off run of the route."""
    run = takeoff_run(model, route)
    common = model.segment(run[0]).runways
    for s in run[1:]:
        common = common & model.segment(s).runways
    return common


def centerline_path(model: AirportModel, route: Route) -> tuple[Point, ...]:
    """Concatenated centerline through the route, junction points deduped.

    Each segment's centerline is oriented so consecutive lines share an
    endpoint; a ValueError reports the first segment that fails to join.
    """
    lines: list[tuple[Point, ...]] = []
    for s in route.segments:
        cl = model.segment(s).centerline
        if cl is None:
            raise MissingCenterline(f"segment {s} has no centerline")
        lines.append(cl)
    if len(lines) == 1:
        return lines[0]
    first, second = lines[0], lines[1]
    if first[-1] in (second[0], second[-1]):
        path = list(first)
    elif first[0] in (second[0], second[-1]):
        path = list(reversed(first))
    else:
        raise ValueError(
            f"centerlines of {route.segments[0]} and {route.segments[1]} do not join"
        )
    for seg_id, line in zip(route.segments[1:], lines[1:]):
        if line[0] == path[-1]:
            ext = line
        elif line[-1] == path[-1]:
            ext = tuple(reversed(line))
        else:
            raise ValueError(f"centerline of segment {seg_id} does not join the path")
        path.extend(ext[1:])
    return tuple(path)


def _oriented_runway(model: AirportModel, runway_id: str, threshold: str) -> list[str]:
    rwy = model.runway(runway_id)
    if threshold == rwy.thresholds[0]:
        return list(rwy.segments)
    if threshold == rwy.thresholds[1]:
        return list(reversed(rwy.segments))
    raise UnknownSegment(f"runway {runway_id} has no threshold {threshold}")


def default_arrival_route(
    model: AirportModel, runway_id: str, threshold: str, stand: str | None = None
) -> Route:
    """Full-length landing roll from a threshold, then the nearest exit.

    With a stand, the route continues from the exit to the stand.
    """
    segs = _oriented_runway(model, runway_id, threshold)
    exits = sorted(
        n for n in model.segment(segs[-1]).neighbors if not is_runway_segment(model, n)
    )
    if exits:
        segs.append(exits[0])
    if stand is not None:
        tail = compute_route(model, segs[-1], stand)
        segs.extend(tail.segments[1:])
    return Route(tuple(segs))


def default_departure_route(
    model: AirportModel,
    stand: str,
    runway_id: str,
    threshold: str,
    entry: str | None = None,
) -> Route:
    """Taxi from a stand to a runway entry, then roll to the far end.

    The threshold names the departure direction; entry defaults to the
    threshold-end segment (a full-length departure).
    """
    ordered = _oriented_runway(model, runway_id, threshold)
    if entry is None:
        entry = ordered[0]
    if entry not in ordered:
        raise NotOnRunway(f"segment {entry} is not on runway {runway_id}")
    roll = ordered[ordered.index(entry):]
    taxi = compute_route(model, stand, entry)
    return Route(tuple(taxi.segments) + tuple(roll[1:]))
