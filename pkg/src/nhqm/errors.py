"""Exception types shared across the package."""

from __future__ import annotations


class NHQMError(Exception):
    """Base class for all package errors."""


class NonFinite(NHQMError):
    """A computation produced NaN or Inf."""


class NotHPD(NHQMError):
    """A matrix required to be Hermitian positive definite is not."""


class NotUnitaryInput(NHQMError):
    """A conventional unitary was expected but V†V != 1."""


class IncompleteSet(NHQMError):
    """A measurement set fails its completeness relation."""


class IncompleteBasis(NHQMError):
    """A basis fails the generalized completeness relation."""


class PositivityLost(NHQMError):
    """An integrated metric lost positive definiteness at some time."""

    def __init__(self, t: float, min_eigenvalue: float):
        self.t = float(t)
        self.min_eigenvalue = float(min_eigenvalue)
        super().__init__(
            f"metric lost positivity at t={t!r} (min eigenvalue {min_eigenvalue!r})"
        )


class NoStationaryMetric(NHQMError):
    """No Hermitian positive-definite solution of the intertwining relation exists."""


class SingularBasis(NHQMError):
    """Basis kets do not span the space (rank-deficient Gram construction)."""


class NonProductMetric(NHQMError):
    """A composite metric does not factor as G_A ⊗ G_B."""


class UnnormalizedMember(NHQMError):
    """An ensemble member is not normalized in the generalized inner product."""


class BadWeights(NHQMError):
    """Ensemble probabilities are negative or do not sum to one."""


class RankTooLarge(NHQMError):
    """Requested ensemble size is smaller than the state's rank."""


class UnnormalizedState(NHQMError):
    """A pure state is not normalized in the generalized inner product."""


class BadShape(NHQMError):
    """An array does not have the required shape."""


class OrthogonalInput(NHQMError):
    """Orthogonal states were supplied where non-orthogonal ones are required."""


class DegenerateSpectrum(NHQMError):
    """Closed-form eigenvalues requested at an exceptional point (defective matrix)."""


class ConstraintViolated(NHQMError):
    """Closed-form metric coefficients violate their positivity constraints."""


class ParseError(NHQMError):
    """Configuration text is not well-formed JSON."""

    def __init__(self, line: int, message: str):
        self.line = int(line)
        self.message = message
        super().__init__(f"line {line}: {message}")


class ValidationError(NHQMError):
    """A configuration field is missing, unknown, or invalid."""

    def __init__(self, field: str, message: str):
        self.field = field
        self.message = message
        super().__init__(f"{field}: {message}")
