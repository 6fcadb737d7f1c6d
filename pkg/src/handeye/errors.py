"""Exception hierarchy shared by the solvers, the file loaders and the CLI."""

from __future__ import annotations


class HandEyeError(Exception):
    """Base class for every error raised by this package."""

    category = "error"
    exit_code = 1


class DimensionError(HandEyeError, ValueError):
    category = "dimension"
    exit_code = 6


class ValidationError(HandEyeError, ValueError):
    """Input data failed a structural or geometric check."""

    category = "validation"
    exit_code = 3


class ParseError(ValidationError):
    category = "parse"
    exit_code = 3


class InsufficientMotionError(HandEyeError):
    """The motions do not carry enough information for the requested solve."""

    category = "insufficient-motion"
    exit_code = 4


class ClassificationError(InsufficientMotionError):
    """A solver was forced onto a sequence of the wrong motion class."""

    category = "classification"


class DegenerateDataError(HandEyeError):
    category = "degenerate"
    exit_code = 5


class NoInformationError(DegenerateDataError):
    """Every motion is (numerically) the identity."""

    category = "no-information"


class DegeneracyError(DegenerateDataError):
    """A matrix that must be invertible is singular."""

    category = "singular"


class NumericalError(HandEyeError):
    category = "numerical"
    exit_code = 6


class UnsupportedKindError(HandEyeError, ValueError):
    """An operation needs a fully determined solution but got a partial one."""

    category = "unsupported-kind"
    exit_code = 6
