"""Conflicting-clearance detection for airport surface traffic."""

from .airport import AirportModel, Runway, Segment, SegmentKind, load_airport, serialize_airport
from .clearances import Clearance, ClearanceType, Mobile, MobileKind
from .detection import (
    Conflict,
    ConflictType,
    ProbeResult,
    World,
    detect_conflicts,
    probe,
    resolve_conditionals,
)
from .oracle import oracle_detect
from .routing import Route, compute_route
from .simulator import Simulation, load_scenario, run_scenario

__all__ = [
    "AirportModel",
    "Clearance",
    "ClearanceType",
    "Conflict",
    "ConflictType",
    "Mobile",
    "MobileKind",
    "ProbeResult",
    "Route",
    "Runway",
    "Segment",
    "SegmentKind",
    "Simulation",
    "World",
    "compute_route",
    "detect_conflicts",
    "load_airport",
    "load_scenario",
    "oracle_detect",
    "probe",
    "resolve_conditionals",
    "run_scenario",
    "serialize_airport",
]
