"""Exception types shared across the package."""

from __future__ import annotations


class CatcError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(CatcError):
    """A document could not be parsed into the expected shape."""


class ValidationError(CatcError):
    """One or more structural invariants are violated.

    Carries the full list of violations so callers can report them all
    at once instead of fixing them one by one.
    """

    def __init__(self, violations: list[str]):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class UnknownSegment(CatcError):
    """A segment id does not exist in the airport model."""


class UnknownMobile(CatcError):
    """A mobile id does not exist in the world."""


class NotOnRunway(CatcError):
    """A segment does not belong to the runway it was looked up on."""


class NoPath(CatcError):
    """No route exists between the requested segments."""


class OffRoute(CatcError):
    """A position does not occur on the route it was matched against."""


class NotADepartureRoute(CatcError):
    """A route does not end with a usable take-off run."""


class MissingCenterline(CatcError):
    """A segment on the route has no centerline geometry."""


class NoRunwayOnRoute(CatcError):
    """A clearance needs a runway segment the route does not contain."""


class InvalidClearance(CatcError):
    """A clearance cannot be given to this mobile in its current state."""


class SegmentNotOnRoute(CatcError):
    """A segment was expected on a route but is absent."""


class OracleDomainError(CatcError):
    """The world is outside the domain the reference oracle is defined on."""

    def __init__(self, violations: list[str]):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class ScenarioError(CatcError):
    """A scenario command could not be executed."""
