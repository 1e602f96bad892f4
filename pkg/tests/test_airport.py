from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from catc.airport import (
    SegmentKind,
    is_runway_segment,
    load_airport,
    runway_index,
    serialize_airport,
)
from catc.errors import NotOnRunway, ParseError, UnknownSegment, ValidationError
from conftest import fixture_text
from generators import gen_airport

MINIMAL = """
segments:
  - {id: R1, kind: runway, neighbors: [R2, T1], runways: [RW]}
  - {id: R2, kind: runway, neighbors: [R1], runways: [RW]}
  - {id: T1, kind: taxiway, neighbors: [R1]}
runways:
  - {id: RW, segments: [R1, R2], thresholds: ["A", "B"]}
"""


def test_minimal_airport_loads():
    model = load_airport(MINIMAL)
    assert set(model.segments) == {"R1", "R2", "T1"}
    assert model.runways["RW"].segments == ("R1", "R2")
    assert model.runways["RW"].thresholds == ("A", "B")
    assert model.runways["RW"].multiple_line_up_authorised is False


@pytest.mark.parametrize(
    "name",
    ["hamburg_ne.airport", "straight.airport", "straight_mlu.airport", "crossing.airport"],
)
def test_fixture_airports_load_and_round_trip(name):
    model = load_airport(fixture_text(name))
    again = load_airport(serialize_airport(model))
    assert again == model


def test_round_trip_preserves_geometry(hamburg):
    again = load_airport(serialize_airport(hamburg))
    seg = again.segment("R5")
    assert seg.polygon == hamburg.segment("R5").polygon
    assert seg.centerline == ((40.0, 1.0), (50.0, 1.0))


def test_segment_kinds(hamburg):
    assert hamburg.segment("R1").kind is SegmentKind.RUNWAY
    assert hamburg.segment("AP").kind is SegmentKind.APRON
    assert hamburg.segment("S1").kind is SegmentKind.STAND
    assert is_runway_segment(hamburg, "R3")
    assert not is_runway_segment(hamburg, "S1")
    with pytest.raises(UnknownSegment):
        is_runway_segment(hamburg, "NOPE")


def test_intersection_segment_belongs_to_both(crossing):
    assert crossing.segment("IX").runways == frozenset({"09/27", "18/36"})
    assert is_runway_segment(crossing, "IX")
    assert runway_index(crossing, "09/27", "IX") == 2
    assert runway_index(crossing, "18/36", "IX") == 2


def test_runway_index(hamburg):
    assert runway_index(hamburg, "05/23", "R1") == 0
    assert runway_index(hamburg, "05/23", "R9") == 8
    with pytest.raises(NotOnRunway):
        runway_index(hamburg, "05/23", "E1")
    with pytest.raises(UnknownSegment):
        runway_index(hamburg, "NOPE", "R1")


def _patched(base: str, old: str, new: str) -> str:
    assert old in base
    return base.replace(old, new)


def test_parse_rejects_unknown_kind():
    bad = _patched(MINIMAL, "kind: taxiway", "kind: motorway")
    with pytest.raises(ParseError, match="unknown kind"):
        load_airport(bad)


def test_parse_rejects_non_mapping_document():
    with pytest.raises(ParseError):
        load_airport("- just\n- a list\n")
    with pytest.raises(ParseError):
        load_airport(": not yaml: [")


def test_parse_rejects_bad_points():
    bad = _patched(
        MINIMAL,
        "{id: T1, kind: taxiway, neighbors: [R1]}",
        "{id: T1, kind: taxiway, neighbors: [R1], polygon: [[0, 0], [1]]}",
    )
    with pytest.raises(ParseError, match="pair of numbers"):
        load_airport(bad)


def test_validation_collects_all_violations():
    bad = """
segments:
  - {id: R1, kind: runway, neighbors: [R1, GHOST, T1], runways: [RW]}
  - {id: T1, kind: taxiway, neighbors: [], runways: [RW]}
runways:
  - {id: RW, segments: [R1, T1], thresholds: ["A", "A"]}
"""
    with pytest.raises(ValidationError) as err:
        load_airport(bad)
    text = "\n".join(err.value.violations)
    assert "segment R1 neighbors itself" in text
    assert "unknown neighbor GHOST" in text
    assert "asymmetric adjacency R1/T1" in text
    assert "segment T1: kind and runway membership disagree" in text
    assert "segment T1 is not a runway segment" in text
    assert "identical threshold designators" in text


def test_validation_rejects_gap_in_runway():
    bad = _patched(MINIMAL, "neighbors: [R2, T1]", "neighbors: [T1]")
    bad = _patched(bad, "{id: R2, kind: runway, neighbors: [R1], runways: [RW]}",
                   "{id: R2, kind: runway, neighbors: [], runways: [RW]}")
    with pytest.raises(ValidationError, match="not adjacent"):
        load_airport(bad)


def test_validation_rejects_membership_without_listing():
    bad = _patched(MINIMAL, "segments: [R1, R2]", "segments: [R1]")
    with pytest.raises(ValidationError, match="lists it but is absent"):
        load_airport(bad)


def test_validation_rejects_duplicate_ids():
    bad = MINIMAL.replace(
        "  - {id: T1, kind: taxiway, neighbors: [R1]}",
        "  - {id: T1, kind: taxiway, neighbors: [R1]}\n"
        "  - {id: T1, kind: taxiway, neighbors: [R1]}",
    )
    with pytest.raises(ValidationError, match="duplicate segment id T1"):
        load_airport(bad)


def test_validation_rejects_unknown_runway_segment():
    bad = _patched(MINIMAL, "segments: [R1, R2]", "segments: [R1, R2, R3]")
    with pytest.raises(ValidationError, match="unknown segment R3"):
        load_airport(bad)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**9))
def test_generated_airports_are_sound(seed):
    model = gen_airport(random.Random(seed))
    assert 1 <= len(model.runways) <= 3
    entries = [
        s
        for s in model.segments.values()
        if s.kind is SegmentKind.TAXIWAY
        and s.id != "HUB"
        and any(is_runway_segment(model, n) for n in s.neighbors)
    ]
    assert 4 <= len(entries) <= 10
    for rwy in model.runways.values():
        for a, b in zip(rwy.segments, rwy.segments[1:]):
            assert b in model.segment(a).neighbors
    again = load_airport(serialize_airport(model))
    assert again == model
