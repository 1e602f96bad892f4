"""Static airport description: the segment graph and its runways.

The movement area is a partition into segments; adjacency is symmetric.
A runway is an ordered, adjacency-contiguous list of runway segments,
one end per threshold. Segments shared by two runways model runway
intersections and belong to both ordered lists.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from itertools import combinations

import yaml

from .errors import NotOnRunway, ParseError, UnknownSegment, ValidationError

Point = tuple[float, float]


class SegmentKind(str, Enum):
    RUNWAY = "runway"
    TAXIWAY = "taxiway"
    APRON = "apron"
    STAND = "stand"


@dataclass(frozen=True)
class Segment:
    """One cell of the movement-area partition."""

    id: str
    kind: SegmentKind
    neighbors: frozenset[str]
    runways: frozenset[str] = frozenset()
    polygon: tuple[Point, ...] | None = None
    centerline: tuple[Point, ...] | None = None


@dataclass(frozen=True)
class Runway:
    """A physical runway, ordered from thresholds[0] to thresholds[1]."""

    id: str
    segments: tuple[str, ...]
    thresholds: tuple[str, str]
    multiple_line_up_authorised: bool = False


@dataclass(frozen=True, eq=True)
class AirportModel:
    """Validated, immutable airport description."""

    segments: dict[str, Segment]
    runways: dict[str, Runway]
    name: str = ""

    def segment(self, segment_id: str) -> Segment:
        try:
            return self.segments[segment_id]
        except KeyError:
            raise UnknownSegment(f"unknown segment {segment_id}") from None

    def runway(self, runway_id: str) -> Runway:
        try:
            return self.runways[runway_id]
        except KeyError:
            raise UnknownSegment(f"unknown runway {runway_id}") from None


def is_runway_segment(model: AirportModel, segment_id: str) -> bool:
    return model.segment(segment_id).kind is SegmentKind.RUNWAY


def runway_index(model: AirportModel, runway_id: str, segment_id: str) -> int:
    """Position of a segment along a runway's ordered segment list."""
    rwy = model.runway(runway_id)
    model.segment(segment_id)
    try:
        return rwy.segments.index(segment_id)
    except ValueError:
        raise NotOnRunway(f"segment {segment_id} is not on runway {runway_id}") from None


def _parse_points(raw: object, where: str, least: int, what: str) -> tuple[Point, ...]:
    if not isinstance(raw, list):
        raise ParseError(f"{where}: {what} must be a list of points")
    points: list[Point] = []
    for p in raw:
        if not isinstance(p, list) or len(p) != 2:
            raise ParseError(f"{where}: each {what} point must be a pair of numbers")
        x, y = p
        if not isinstance(x, (int, float)) or not isinstance(y, (int, float)):
            raise ParseError(f"{where}: each {what} point must be a pair of numbers")
        points.append((float(x), float(y)))
    if len(points) < least:
        raise ParseError(f"{where}: {what} needs at least {least} points")
    return tuple(points)


def _parse_segment(raw: object) -> Segment:
    if not isinstance(raw, dict):
        raise ParseError("each segment must be a mapping")
    seg_id = raw.get("id")
    if not isinstance(seg_id, str) or not seg_id:
        raise ParseError("segment without a usable id")
    where = f"segment {seg_id}"
    kind_raw = raw.get("kind")
    try:
        kind = SegmentKind(kind_raw)
    except ValueError:
        raise ParseError(f"{where}: unknown kind {kind_raw!r}") from None
    neighbors = raw.get("neighbors", [])
    if not isinstance(neighbors, list) or not all(isinstance(n, str) for n in neighbors):
        raise ParseError(f"{where}: neighbors must be a list of segment ids")
    runways = raw.get("runways", [])
    if not isinstance(runways, list) or not all(isinstance(r, str) for r in runways):
        raise ParseError(f"{where}: runways must be a list of runway ids")
    polygon = raw.get("polygon")
    centerline = raw.get("centerline")
    return Segment(
        id=seg_id,
        kind=kind,
        neighbors=frozenset(neighbors),
        runways=frozenset(runways),
        polygon=None if polygon is None else _parse_points(polygon, where, 3, "polygon"),
        centerline=None if centerline is None else _parse_points(centerline, where, 2, "centerline"),
    )


def _parse_runway(raw: object) -> Runway:
    if not isinstance(raw, dict):
        raise ParseError("each runway must be a mapping")
    rwy_id = raw.get("id")
    if not isinstance(rwy_id, str) or not rwy_id:
        raise ParseError("runway without a usable id")
    where = f"runway {rwy_id}"
    segments = raw.get("segments", [])
    if not isinstance(segments, list) or not all(isinstance(s, str) for s in segments):
        raise ParseError(f"{where}: segments must be a list of segment ids")
    thresholds = raw.get("thresholds")
    if (
        not isinstance(thresholds, list)
        or len(thresholds) != 2
        or not all(isinstance(t, str) and t for t in thresholds)
    ):
        raise ParseError(f"{where}: thresholds must be a pair of designators")
    mlu = raw.get("multiple_line_up_authorised", False)
    if not isinstance(mlu, bool):
        raise ParseError(f"{where}: multiple_line_up_authorised must be a boolean")
    return Runway(
        id=rwy_id,
        segments=tuple(segments),
        thresholds=(thresholds[0], thresholds[1]),
        multiple_line_up_authorised=mlu,
    )


def validate_airport(model: AirportModel) -> list[str]:
    """All structural violations in the model, empty when it is sound."""
    v: list[str] = []
    segments, runways = model.segments, model.runways
    for seg in segments.values():
        for n in sorted(seg.neighbors):
            if n == seg.id:
                v.append(f"segment {seg.id} neighbors itself")
            elif n not in segments:
                v.append(f"segment {seg.id}: unknown neighbor {n}")
            elif seg.id not in segments[n].neighbors:
                v.append(f"asymmetric adjacency {seg.id}/{n}")
        for r in sorted(seg.runways):
            if r not in runways:
                v.append(f"segment {seg.id}: unknown runway {r}")
        if (seg.kind is SegmentKind.RUNWAY) != bool(seg.runways):
            v.append(f"segment {seg.id}: kind and runway membership disagree")
    for rwy in runways.values():
        if not rwy.segments:
            v.append(f"runway {rwy.id}: empty segment list")
            continue
        if rwy.thresholds[0] == rwy.thresholds[1]:
            v.append(f"runway {rwy.id}: identical threshold designators")
        if len(set(rwy.segments)) != len(rwy.segments):
            v.append(f"runway {rwy.id}: repeated segment")
        missing = [s for s in rwy.segments if s not in segments]
        for s in missing:
            v.append(f"runway {rwy.id}: unknown segment {s}")
        if missing:
            continue
        for s in rwy.segments:
            seg = segments[s]
            if seg.kind is not SegmentKind.RUNWAY:
                v.append(f"runway {rwy.id}: segment {s} is not a runway segment")
            elif rwy.id not in seg.runways:
                v.append(f"runway {rwy.id}: segment {s} does not list it")
        for a, b in zip(rwy.segments, rwy.segments[1:]):
            if b not in segments[a].neighbors:
                v.append(f"runway {rwy.id}: segments {a}/{b} not adjacent")
        listed = {s.id for s in segments.values() if rwy.id in s.runways}
        for s in sorted(listed - set(rwy.segments)):
            v.append(f"runway {rwy.id}: segment {s} lists it but is absent from the ordered list")
    # Two runways may only share one contiguous run of segments (an intersection).
    for a, b in combinations(sorted(runways), 2):
        shared = set(runways[a].segments) & set(runways[b].segments)
        if not shared:
            continue
        for w in (a, b):
            idxs = [i for i, s in enumerate(runways[w].segments) if s in shared]
            if idxs and idxs[-1] - idxs[0] + 1 != len(idxs):
                v.append(f"runways {a}/{b}: shared segments not contiguous on {w}")
    return v


def load_airport(text: str) -> AirportModel:
    """Parse and validate an airport document.

    Raises ParseError when the document shape is wrong and
    ValidationError (with the full violation list) when it is
    structurally unsound.
    """
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ParseError(f"invalid YAML: {exc}") from exc
    if not isinstance(doc, dict):
        raise ParseError("airport document must be a mapping")
    name = doc.get("name", "")
    if not isinstance(name, str):
        raise ParseError("airport name must be a string")
    raw_segments = doc.get("segments")
    raw_runways = doc.get("runways", [])
    if not isinstance(raw_segments, list) or not raw_segments:
        raise ParseError("airport needs a non-empty list of segments")
    if not isinstance(raw_runways, list):
        raise ParseError("runways must be a list")

    violations: list[str] = []
    segments: dict[str, Segment] = {}
    for raw in raw_segments:
        seg = _parse_segment(raw)
        if seg.id in segments:
            violations.append(f"duplicate segment id {seg.id}")
        segments[seg.id] = seg
    runways: dict[str, Runway] = {}
    for raw in raw_runways:
        rwy = _parse_runway(raw)
        if rwy.id in runways:
            violations.append(f"duplicate runway id {rwy.id}")
        runways[rwy.id] = rwy

    model = AirportModel(segments=segments, runways=runways, name=name)
    violations.extend(validate_airport(model))
    if violations:
        raise ValidationError(violations)
    return model


def _segment_to_dict(seg: Segment) -> dict:
    out: dict = {
        "id": seg.id,
        "kind": seg.kind.value,
        "neighbors": sorted(seg.neighbors),
    }
    if seg.runways:
        out["runways"] = sorted(seg.runways)
    if seg.polygon is not None:
        out["polygon"] = [[x, y] for x, y in seg.polygon]
    if seg.centerline is not None:
        out["centerline"] = [[x, y] for x, y in seg.centerline]
    return out


def serialize_airport(model: AirportModel) -> str:
    """Render a model back to a document load_airport accepts unchanged."""
    doc: dict = {}
    if model.name:
        doc["name"] = model.name
    doc["segments"] = [_segment_to_dict(model.segments[s]) for s in sorted(model.segments)]
    doc["runways"] = [
        {
            "id": rwy.id,
            "segments": list(rwy.segments),
            "thresholds": list(rwy.thresholds),
            "multiple_line_up_authorised": rwy.multiple_line_up_authorised,
        }
        for rwy in (model.runways[r] for r in sorted(model.runways))
    ]
    return yaml.safe_dump(doc, sort_keys=False)
