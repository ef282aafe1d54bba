"""Exception types raised across the package."""


class ChoquetError(Exception):
    """Base class for all package errors."""


class InvalidSubsetError(ChoquetError, ValueError):
    """A subset refers to attributes outside the ground set."""


class CapacityError(ChoquetError, ValueError):
    """An exhaustive operation was requested on a ground set that is too large."""


class DimensionError(ChoquetError, ValueError):
    """Input vectors do not match each other or the measure's ground set."""


class DomainError(ChoquetError, ValueError):
    """A parameter or input value lies outside its admissible range."""


class DegenerateDecisionError(ChoquetError, ValueError):
    """The decision attribute takes a single value, so dependency is undefined."""


class InsufficientDataError(ChoquetError, ValueError):
    """Too few instances to fit a model."""


class DatasetError(ChoquetError, ValueError):
    """A dataset could not be parsed or is structurally invalid."""


class MeasureFormatError(ChoquetError, ValueError):
    """A measure file is malformed."""
