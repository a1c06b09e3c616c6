"""Hamiltonian representations, including the 2x2 PT-symmetric family."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Union

import numpy as np

from .errors import DegenerateSpectrum, ValidationError
from .linalg import as_complex_matrix


class PTRegime(Enum):
    UNBROKEN = "unbroken"
    BROKEN = "broken"
    EXCEPTIONAL_POINT = "exceptional_point"


@dataclass(frozen=True)
class PTParams:
    """Parameters of the PT-symmetric qubit H = [[r e^{iθ}, s], [s, r e^{-iθ}]]."""

    r: float
    s: float
    theta: float

    def __post_init__(self):
        if self.r < 0:
            raise ValueError("r must be non-negative")
        if self.s == 0:
            raise ValueError("s must be nonzero")

    @property
    def sin_alpha(self) -> float:
        """sin α = (r/s) sin θ."""
        return (self.r / self.s) * math.sin(self.theta)

    @property
    def cos_alpha(self) -> float:
        """cos α = sqrt(1 - (r/s)² sin²θ); real only in the unbroken regime."""
        val = 1.0 - self.sin_alpha**2
        if val < 0.0:
            raise ValueError("cos α is imaginary outside the PT-unbroken regime")
        return math.sqrt(val)

    @property
    def discriminant(self) -> float:
        """s² − r² sin²θ; positive in the unbroken regime, negative in the broken one."""
        return self.s**2 - (self.r * math.sin(self.theta)) ** 2


@dataclass(frozen=True)
class Constant:
    """Time-independent Hamiltonian given as an explicit matrix."""

    matrix: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "matrix", as_complex_matrix(self.matrix, "hamiltonian"))


@dataclass(frozen=True)
class TimeDependent:
    """Hamiltonian given as a map t -> matrix of fixed dimension."""

    func: Callable[[float], np.ndarray]
    dim: int

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dim must be >= 1")


@dataclass(frozen=True)
class PTQubit:
    """The 2x2 PT-symmetric family."""

    params: PTParams


@dataclass(frozen=True)
class DecayMode:
    """One-dimensional decaying mode H = ω − iΓ/2."""

    omega: float
    gamma: float

    def __post_init__(self):
        if self.gamma < 0:
            raise ValueError("gamma must be non-negative")


HamiltonianModel = Union[Constant, TimeDependent, PTQubit, DecayMode]


def pt_matrix(p: PTParams) -> np.ndarray:
    """Materialize the PT-qubit matrix."""
    e = cmath.exp(1j * p.theta)
    return np.array([[p.r * e, p.s], [p.s, p.r * e.conjugate()]], dtype=complex)


def materialize(h: HamiltonianModel, t: float = 0.0) -> np.ndarray:
    """Hamiltonian matrix at time ``t``."""
    if isinstance(h, Constant):
        return h.matrix
    if isinstance(h, TimeDependent):
        return as_complex_matrix(h.func(t), "hamiltonian")
    if isinstance(h, PTQubit):
        return pt_matrix(h.params)
    if isinstance(h, DecayMode):
        return np.array([[h.omega - 0.5j * h.gamma]], dtype=complex)
    raise TypeError(f"not a HamiltonianModel: {h!r}")


def dim_of(h: HamiltonianModel) -> int:
    if isinstance(h, TimeDependent):
        return h.dim
    if isinstance(h, PTQubit):
        return 2
    if isinstance(h, DecayMode):
        return 1
    return h.matrix.shape[0]


def is_time_dependent(h: HamiltonianModel) -> bool:
    return isinstance(h, TimeDependent)


def regime_tolerance(p: PTParams) -> float:
    """Default width of the exceptional-point band: 1e-12·max(s², r²sin²θ)."""
    return 1e-12 * max(p.s**2, (p.r * math.sin(p.theta)) ** 2)


def classify_regime(p: PTParams, tol_regime: float | None = None) -> PTRegime:
    """Sign of s² − r² sin²θ, with a tolerance band for the exceptional point."""
    tol = regime_tolerance(p) if tol_regime is None else tol_regime
    d = p.discriminant
    if abs(d) <= tol:
        return PTRegime.EXCEPTIONAL_POINT
    return PTRegime.UNBROKEN if d > 0 else PTRegime.BROKEN


def pt_eigenvalues(p: PTParams, tol_regime: float | None = None) -> tuple[complex, complex]:
    """Closed-form eigenvalue pair λ± = r cosθ ± sqrt(s² − r² sin²θ).

    Real in the unbroken regime, a complex-conjugate pair in the broken one.
    Raises :class:`DegenerateSpectrum` at the exceptional point, where the
    matrix is defective and has the single eigenvalue r cosθ.
    """
    regime = classify_regime(p, tol_regime)
    if regime is PTRegime.EXCEPTIONAL_POINT:
        raise DegenerateSpectrum(
            f"defective at the exceptional point; single eigenvalue {p.r * math.cos(p.theta)!r}"
        )
    base = p.r * math.cos(p.theta)
    if regime is PTRegime.UNBROKEN:
        gap = math.sqrt(p.discriminant)
        return complex(base + gap), complex(base - gap)
    gap = math.sqrt(-p.discriminant)
    return base + 1j * gap, base - 1j * gap


# -- JSON codec ---------------------------------------------------------------


def matrix_to_json(m: np.ndarray) -> list:
    """Nested rows of [re, im] pairs."""
    return [[[float(x.real), float(x.imag)] for x in row] for row in np.asarray(m, dtype=complex)]


def matrix_from_json(rows, field: str = "matrix") -> np.ndarray:
    try:
        m = np.asarray(
            [[complex(float(x[0]), float(x[1])) for x in row] for row in rows], dtype=complex
        )
    except (TypeError, ValueError, IndexError) as exc:
        raise ValidationError(field, f"expected nested rows of [re, im] pairs: {exc}") from exc
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValidationError(field, f"matrix must be square, got shape {m.shape}")
    return m


def _require_keys(obj: dict, required: set[str], optional: set[str], field: str) -> None:
    keys = set(obj)
    missing = required - keys
    if missing:
        raise ValidationError(f"{field}.{sorted(missing)[0]}", "required")
    unknown = keys - required - optional
    if unknown:
        raise ValidationError(f"{field}.{sorted(unknown)[0]}", "unknown key")


def hamiltonian_from_json(obj: dict, field: str = "hamiltonian") -> HamiltonianModel:
    """Parse {"kind": "pt_qubit"|"constant"|"decay", ...} strictly."""
    if not isinstance(obj, dict):
        raise ValidationError(field, "expected an object")
    kind = obj.get("kind")
    if kind == "pt_qubit":
        _require_keys(obj, {"kind", "r", "s", "theta"}, set(), field)
        try:
            return PTQubit(PTParams(float(obj["r"]), float(obj["s"]), float(obj["theta"])))
        except (TypeError, ValueError) as exc:
            raise ValidationError(field, str(exc)) from exc
    if kind == "constant":
        _require_keys(obj, {"kind", "matrix"}, set(), field)
        return Constant(matrix_from_json(obj["matrix"], f"{field}.matrix"))
    if kind == "decay":
        _require_keys(obj, {"kind", "omega", "gamma"}, set(), field)
        try:
            return DecayMode(float(obj["omega"]), float(obj["gamma"]))
        except (TypeError, ValueError) as exc:
            raise ValidationError(field, str(exc)) from exc
    raise ValidationError(f"{field}.kind", f"unknown kind {kind!r}")


def hamiltonian_to_json(h: HamiltonianModel) -> dict:
    if isinstance(h, PTQubit):
        return {"kind": "pt_qubit", "r": h.params.r, "s": h.params.s, "theta": h.params.theta}
    if isinstance(h, Constant):
        return {"kind": "constant", "matrix": matrix_to_json(h.matrix)}
    if isinstance(h, DecayMode):
        return {"kind": "decay", "omega": h.omega, "gamma": h.gamma}
    raise TypeError("time-dependent Hamiltonians have no JSON form")
