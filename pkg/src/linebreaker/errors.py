"""Exception types shared across the package."""

from __future__ import annotations


class LinebreakerError(Exception):
    """Base class for all package-specific errors."""


class SchemaError(LinebreakerError):
    """A required field is missing or has an invalid value in an input file."""


class BoundsError(LinebreakerError):
    """A coordinate lies outside the pitch bounds plus tolerance."""


class SyncError(LinebreakerError):
    """An event cannot be matched to any tracking frame within tolerance."""


class OrientationError(LinebreakerError):
    """Attack direction is absent from metadata and cannot be inferred."""


class MissingPlayerError(LinebreakerError):
    """A player referenced by an event is absent from the required frame."""


class EmptyOpponentsError(LinebreakerError):
    """An operation requiring at least one opponent received none."""


class UnknownMetricError(LinebreakerError):
    """A table was queried for a metric column that does not exist."""


class PlanInfeasibleError(LinebreakerError):
    """A synthetic plan's scenarios cannot be placed within pitch bounds."""


class MissingInputError(LinebreakerError):
    """A report or pipeline stage is missing its required input files."""
