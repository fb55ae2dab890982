"""Exception hierarchy shared by every module in the package."""

from __future__ import annotations


class VecMKError(Exception):
    """Base class for all errors raised by vecmk."""


class InputError(VecMKError, ValueError):
    """Malformed or inconsistent input data."""


class DomainError(VecMKError, ValueError):
    """Well-formed input outside the domain of an operation."""


# -- metric spaces ---------------------------------------------------------

class MetricAxiomError(InputError):
    """A distance matrix fails one of the metric axioms."""

    def __init__(self, message: str, indices: tuple[int, ...] = ()):
        super().__init__(message)
        self.indices = indices


class TooFewPoints(MetricAxiomError):
    pass


class NonzeroDiagonal(MetricAxiomError):
    pass


class NotSymmetric(MetricAxiomError):
    pass


class ZeroOffDiagonal(MetricAxiomError):
    pass


class TriangleViolation(MetricAxiomError):
    pass


class BadGridSize(InputError):
    pass


class EmptySet(InputError):
    pass


class UnknownPoint(InputError, KeyError):
    def __str__(self) -> str:  # KeyError would repr() the message
        return str(self.args[0]) if self.args else ""


# -- vectors, measures, functions -----------------------------------------

class DimensionMismatch(InputError):
    pass


class FieldMismatch(InputError):
    pass


class SpaceMismatch(InputError):
    pass


class EmptyH(InputError):
    pass


class DIsWholeSpace(InputError):
    pass


class HNotInsideD(InputError):
    pass


class EqualPoints(InputError):
    pass


class NotUnitVector(InputError):
    pass


# -- solvers and norms -----------------------------------------------------

class NotBalanced(DomainError):
    """The measure has nonzero total mass where a balanced one is required."""


class MassNotZero(NotBalanced):
    """The modified MK norm of a measure with nonzero total mass is infinite."""


class NotScalar(DomainError):
    pass


class BadParameters(InputError):
    pass


class NonConvergence(VecMKError):
    """Iteration cap reached before the duality gap closed.

    ``certificate`` holds the best bracket found, so callers can still use it.
    """

    def __init__(self, message: str, certificate=None):
        super().__init__(message)
        self.certificate = certificate


# -- command line ----------------------------------------------------------

class ParseError(InputError):
    pass


class UnknownName(InputError, KeyError):
    def __str__(self) -> str:
        return str(self.args[0]) if self.args else ""
