"""Closed-form metric trajectories for the solvable reference models.

These are the ground-truth oracles used to validate the metric ODE
integrator: the exponential metric of the one-dimensional decaying mode, and
the three coefficient families of the PT-symmetric qubit (oscillatory in the
unbroken regime, exponential in the broken regime, polynomial at the
exceptional point).  Coefficient constraints are checked before evaluation
and violations are rejected, never clamped.

The completeness-relation coefficient formulas were re-derived from the
basis-ket constructions and cross-checked against direct numerical inversion
of the ket sums; the derived forms used here are the ones that reproduce
those constructions exactly.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConstraintViolated
from .hamiltonian import PTParams, PTRegime, classify_regime

__all__ = [
    "UnbrokenMetricParams",
    "BrokenMetricParams",
    "EPMetricParams",
    "decay_metric",
    "unbroken_metric",
    "broken_metric",
    "ep_metric",
    "cpt_metric_coeffs",
    "cpt_metric",
    "standard_basis_coeffs",
    "instant_diagonal_coeffs",
    "unbroken_metric_from_bases",
    "broken_completeness_coeffs",
    "ep_completeness_coeffs",
    "standard_basis_kets",
    "instant_diagonal_kets",
    "broken_basis_kets",
    "ep_basis_kets",
    "unbroken_coeffs_from_value",
    "broken_coeffs_from_value",
    "ep_coeffs_from_value",
    "oracle_coeffs_from_value",
    "oracle_metric_fn",
]


def _require_regime(p: PTParams, want: PTRegime) -> None:
    got = classify_regime(p)
    if got is not want:
        raise ConstraintViolated(f"parameters are in the {got.value} regime, need {want.value}")


def _herm2(g11: float, g22: float, g12: complex) -> np.ndarray:
    return np.array([[g11, g12], [np.conj(g12), g22]], dtype=complex)


# -- one-dimensional decaying mode ---------------------------------------------


def decay_metric(g0: float, gamma: float, t: float) -> float:
    """Metric G(t) = G0·exp(Γt) of the decaying mode H = ω − iΓ/2.

    Unbounded for Γ > 0; only the inner product it defines is physical, and
    the paired-state norm |ψ0|²·G0 stays constant.
    """
    if g0 <= 0:
        raise ConstraintViolated("initial metric must be positive")
    return g0 * math.exp(gamma * t)


# -- PT-unbroken regime --------------------------------------------------------


@dataclass(frozen=True)
class UnbrokenMetricParams:
    """Coefficients (a, b, c, d) of the oscillatory unbroken-regime family.

    Positivity requires c > sqrt(a² + b²) and (c² − a² − b²)·cos²α > d².
    The constant sub-family is a = b = 0.
    """

    a: float
    b: float
    c: float
    d: float

    def validate(self, p: PTParams) -> None:
        cos_a = p.cos_alpha
        if self.c <= math.hypot(self.a, self.b):
            raise ConstraintViolated("requires c > sqrt(a² + b²)")
        if (self.c**2 - self.a**2 - self.b**2) * cos_a**2 <= self.d**2:
            raise ConstraintViolated("requires (c² − a² − b²)·cos²α > d²")


def unbroken_metric(p: PTParams, coeffs: UnbrokenMetricParams, t: float) -> np.ndarray:
    """Evaluate the unbroken-regime closed form at time ``t``."""
    _require_regime(p, PTRegime.UNBROKEN)
    coeffs.validate(p)
    sin_a, cos_a = p.sin_alpha, p.cos_alpha
    phi0 = 2.0 * t * p.s * cos_a
    phi_p, phi_m = phi0 + math.asin(sin_a), phi0 - math.asin(sin_a)
    a, b, c, d = coeffs.a, coeffs.b, coeffs.c, coeffs.d
    g11 = -a * math.cos(phi_p) + b * math.sin(phi_p) + c
    g22 = a * math.cos(phi_m) - b * math.sin(phi_m) + c
    g12 = d - 1j * (a * math.sin(phi0) + b * math.cos(phi0) + c * sin_a)
    return _herm2(g11, g22, g12)


def cpt_metric_coeffs(p: PTParams) -> UnbrokenMetricParams:
    """Coefficients reproducing the CPT inner product: a = b = d = 0, c = 1/cosα."""
    return UnbrokenMetricParams(0.0, 0.0, 1.0 / p.cos_alpha, 0.0)


def cpt_metric(p: PTParams) -> np.ndarray:
    """The stationary CPT metric (1/cosα)·[[1, −i sinα], [i sinα, 1]]."""
    return unbroken_metric(p, cpt_metric_coeffs(p), 0.0)


def standard_basis_coeffs(p: PTParams, a: complex, b: complex) -> UnbrokenMetricParams:
    """Constant-metric coefficients from the eigenbasis completeness relation.

    With eigenvector normalizations a, b the metric is constant with
    c = (|a|² + |b|²)/(4|a|²|b|²cos²α) and d = (|b|² − |a|²)/(4|a|²|b|²cosα).
    """
    if a == 0 or b == 0:
        raise ConstraintViolated("basis normalizations must be nonzero")
    cos_a = p.cos_alpha
    aa, bb = abs(a) ** 2, abs(b) ** 2
    c = (aa + bb) / (4.0 * aa * bb * cos_a**2)
    d = (bb - aa) / (4.0 * aa * bb * cos_a)
    return UnbrokenMetricParams(0.0, 0.0, c, d)


def instant_diagonal_coeffs(p: PTParams, a: complex, b: complex) -> UnbrokenMetricParams:
    """Coefficients for the basis that makes the metric diagonal at t = 0.

    a_plus = (|a|² + |b|²)/(2|ab|²cos²α) enters as the constant term, the
    oscillating coefficients are (|a|² − |b|²)/(2|ab|²cosα) and
    −a_plus·sinα, and the real off-diagonal offset vanishes.  With
    a = b = 1 the metric is the identity at t = 0.
    """
    if a == 0 or b == 0:
        raise ConstraintViolated("basis normalizations must be nonzero")
    sin_a, cos_a = p.sin_alpha, p.cos_alpha
    aa, bb = abs(a) ** 2, abs(b) ** 2
    a_plus = (aa + bb) / (2.0 * aa * bb * cos_a**2)
    a_minus = (aa - bb) / (2.0 * aa * bb * cos_a)
    return UnbrokenMetricParams(a_minus, -a_plus * sin_a, a_plus, 0.0)


def unbroken_metric_from_bases(
    p: PTParams, a: complex, b: complex, choice: str, t: float
) -> np.ndarray:
    """Closed-form metric from a basis choice: "standard" or "instant_diagonal"."""
    if choice == "standard":
        return unbroken_metric(p, standard_basis_coeffs(p, a, b), t)
    if choice == "instant_diagonal":
        return unbroken_metric(p, instant_diagonal_coeffs(p, a, b), t)
    raise ValueError(f"unknown basis choice {choice!r}")


def standard_basis_kets(
    p: PTParams, a: complex, b: complex, t: float
) -> tuple[np.ndarray, np.ndarray]:
    """Propagated eigenbasis kets of the unbroken regime."""
    _require_regime(p, PTRegime.UNBROKEN)
    alpha = math.asin(p.sin_alpha)
    lam_p = p.r * math.cos(p.theta) + p.s * p.cos_alpha
    lam_m = p.r * math.cos(p.theta) - p.s * p.cos_alpha
    e = cmath.exp(0.5j * alpha)
    k1 = a * cmath.exp(-1j * lam_p * t) * np.array([e, e.conjugate()])
    k2 = b * cmath.exp(-1j * lam_m * t) * np.array([e.conjugate(), -e])
    return k1, k2


def instant_diagonal_kets(
    p: PTParams, a: complex, b: complex, t: float
) -> tuple[np.ndarray, np.ndarray]:
    """Propagated kets that are the standard basis vectors at t = 0."""
    _require_regime(p, PTRegime.UNBROKEN)
    alpha = math.asin(p.sin_alpha)
    cos_a = p.cos_alpha
    tau = t * p.s * cos_a
    phase = cmath.exp(-1j * p.r * math.cos(p.theta) * t)
    k1 = (a * phase / cos_a) * np.array([math.cos(tau - alpha), -1j * math.sin(tau)])
    k2 = (b * phase / cos_a) * np.array([-1j * math.sin(tau), math.cos(tau + alpha)])
    return k1, k2


# -- PT-broken regime ----------------------------------------------------------


@dataclass(frozen=True)
class BrokenMetricParams:
    """Coefficients of the exponential broken-regime family.

    With k = (r/s)·sinθ, positivity requires a_plus·k > 0, a_minus·k > 0,
    b > −(a_plus + a_minus)·sgn(k) and (4·a_plus·a_minus − b²)·λ² > c²·s².
    """

    a_plus: float
    a_minus: float
    b: float
    c: float

    def validate(self, p: PTParams) -> None:
        lam = math.sqrt(-p.discriminant)
        k = p.sin_alpha
        if self.a_plus * k <= 0 or self.a_minus * k <= 0:
            raise ConstraintViolated("requires a_plus·(r/s)sinθ > 0 and a_minus·(r/s)sinθ > 0")
        if self.b <= -(self.a_plus + self.a_minus) * math.copysign(1.0, k):
            raise ConstraintViolated("requires b > −(a_plus + a_minus)·sgn((r/s)sinθ)")
        if (4.0 * self.a_plus * self.a_minus - self.b**2) * lam**2 <= (self.c * p.s) ** 2:
            raise ConstraintViolated("requires (4·a_plus·a_minus − b²)·λ² > c²·s²")


def broken_lambda(p: PTParams) -> float:
    """Exponential rate λ = sqrt(r² sin²θ − s²) of the broken regime."""
    return math.sqrt(-p.discriminant)


def broken_metric(p: PTParams, coeffs: BrokenMetricParams, t: float) -> np.ndarray:
    """Evaluate the broken-regime closed form at time ``t``."""
    _require_regime(p, PTRegime.BROKEN)
    coeffs.validate(p)
    lam = broken_lambda(p)
    k = p.sin_alpha
    lam_p, lam_m = lam / p.s + k, lam / p.s - k
    ep, em = math.exp(2.0 * lam * t), math.exp(-2.0 * lam * t)
    ap, am, b, c = coeffs.a_plus, coeffs.a_minus, coeffs.b, coeffs.c
    g11 = -ap * lam_m * ep + am * lam_p * em + b
    g22 = ap * lam_p * ep - am * lam_m * em + b
    g12 = -1j * (ap * ep + am * em + b * k) + c
    return _herm2(g11, g22, g12)


def broken_completeness_coeffs(p: PTParams, a: complex, b: complex) -> BrokenMetricParams:
    """Coefficients from the broken-regime eigenbasis: a_plus = A_b, a_minus = A_a,
    with A_x = s/(2|x|²·r·sinθ) and no constant offsets."""
    if a == 0 or b == 0:
        raise ConstraintViolated("basis normalizations must be nonzero")
    denom = 2.0 * p.r * math.sin(p.theta)
    return BrokenMetricParams(p.s / (abs(b) ** 2 * denom), p.s / (abs(a) ** 2 * denom), 0.0, 0.0)


def broken_basis_kets(
    p: PTParams, a: complex, b: complex, t: float
) -> tuple[np.ndarray, np.ndarray]:
    """Propagated eigenbasis kets of the broken regime."""
    _require_regime(p, PTRegime.BROKEN)
    lam = broken_lambda(p)
    w = p.r * math.sin(p.theta) - lam
    rot = cmath.exp(-1j * t * p.r * math.cos(p.theta))
    k1 = a * rot * math.exp(t * lam) * np.array([p.s, -1j * w])
    k2 = b * rot * math.exp(-t * lam) * np.array([1j * w, p.s])
    return k1, k2


# -- exceptional point -----------------------------------------------------------


@dataclass(frozen=True)
class EPMetricParams:
    """Coefficients of the polynomial exceptional-point family.

    Positivity requires a > 0, a² − b² − c² − d² > 0 and
    (a² − c²)·r²sin²θ > s²·b².
    """

    a: float
    b: float
    c: float
    d: float

    def validate(self, p: PTParams) -> None:
        rs = p.r * math.sin(p.theta)
        if self.a <= 0:
            raise ConstraintViolated("requires a > 0")
        if self.a**2 - self.b**2 - self.c**2 - self.d**2 <= 0:
            raise ConstraintViolated("requires a² − b² − c² − d² > 0")
        if (self.a**2 - self.c**2) * rs**2 <= (p.s * self.b) ** 2:
            raise ConstraintViolated("requires (a² − c²)·r²sin²θ > s²·b²")


def ep_metric(p: PTParams, coeffs: EPMetricParams, t: float) -> np.ndarray:
    """Evaluate the exceptional-point closed form (quadratic in t) at ``t``."""
    _require_regime(p, PTRegime.EXCEPTIONAL_POINT)
    coeffs.validate(p)
    rs = p.r * math.sin(p.theta)
    a, b, c, d = coeffs.a, coeffs.b, coeffs.c, coeffs.d
    q = a * rs + p.s * b
    g11 = 2.0 * rs * q * t * t - 2.0 * (rs * (a + c) + p.s * b) * t + (a + c)
    g22 = 2.0 * rs * q * t * t + 2.0 * (rs * (a - c) + p.s * b) * t + (a - c)
    g12 = d - 1j * (2.0 * p.s * q * t * t - 2.0 * c * p.s * t - b)
    return _herm2(g11, g22, g12)


def ep_completeness_coeffs(p: PTParams, a: complex, b: complex) -> EPMetricParams:
    """Coefficients from the eigenvector + generalized-eigenvector basis."""
    if a == 0:
        raise ConstraintViolated("eigenvector normalization must be nonzero")
    rs = p.r * math.sin(p.theta)
    aa = abs(a) ** 2
    ab = a * np.conj(b)
    coeff_a = (3.0 * aa + 2.0 * abs(b) ** 2 - 2.0 * ab.real) / (2.0 * aa**2)
    coeff_b = -rs * (aa + abs(b) ** 2 - ab.real) / (aa**2 * p.s)
    coeff_c = (-aa + 2.0 * ab.real) / (2.0 * aa**2)
    coeff_d = -rs * ab.imag / (aa**2 * p.s)
    return EPMetricParams(coeff_a, coeff_b, coeff_c, coeff_d)


def ep_basis_kets(p: PTParams, a: complex, b: complex, t: float) -> tuple[np.ndarray, np.ndarray]:
    """Propagated eigenvector and generalized eigenvector at the exceptional point."""
    _require_regime(p, PTRegime.EXCEPTIONAL_POINT)
    k = p.sin_alpha
    rot = cmath.exp(-1j * p.r * t * math.cos(p.theta))
    k1 = a * rot * np.array([1j * k, 1.0])
    k2 = rot * np.array(
        [a * p.r * t * math.sin(p.theta) + a - b, 1j * (-a * p.s * t + b * k)]
    )
    return k1, k2


# -- coefficient extraction from a metric value ---------------------------------


def unbroken_coeffs_from_value(p: PTParams, g0: np.ndarray) -> UnbrokenMetricParams:
    """Coefficients whose trajectory passes through ``g0`` at t = 0."""
    sin_a, cos_a = p.sin_alpha, p.cos_alpha
    g11, g22, g12 = g0[0, 0].real, g0[1, 1].real, g0[0, 1]
    a = (g22 - g11) / (2.0 * cos_a)
    u = 0.5 * (g11 + g22)
    v = -g12.imag
    b = (v - u * sin_a) / cos_a**2
    c = (u - v * sin_a) / cos_a**2
    coeffs = UnbrokenMetricParams(a, b, c, g12.real)
    _check_reconstruction(unbroken_metric(p, coeffs, 0.0), g0)
    return coeffs


def broken_coeffs_from_value(p: PTParams, g0: np.ndarray) -> BrokenMetricParams:
    """Coefficients whose trajectory passes through ``g0`` at t = 0."""
    lam = broken_lambda(p)
    k = p.sin_alpha
    lam_p, lam_m = lam / p.s + k, lam / p.s - k
    mat = np.array([[-lam_m, lam_p, 1.0], [lam_p, -lam_m, 1.0], [1.0, 1.0, k]])
    rhs = np.array([g0[0, 0].real, g0[1, 1].real, -g0[0, 1].imag])
    ap, am, b = np.linalg.solve(mat, rhs)
    coeffs = BrokenMetricParams(float(ap), float(am), float(b), float(g0[0, 1].real))
    _check_reconstruction(broken_metric(p, coeffs, 0.0), g0)
    return coeffs


def ep_coeffs_from_value(p: PTParams, g0: np.ndarray) -> EPMetricParams:
    """Coefficients whose trajectory passes through ``g0`` at t = 0."""
    g11, g22, g12 = g0[0, 0].real, g0[1, 1].real, g0[0, 1]
    coeffs = EPMetricParams(
        0.5 * (g11 + g22), g12.imag, 0.5 * (g11 - g22), g12.real
    )
    _check_reconstruction(ep_metric(p, coeffs, 0.0), g0)
    return coeffs


def oracle_coeffs_from_value(p: PTParams, g0: np.ndarray):
    """Dispatch coefficient extraction on the regime of ``p``."""
    regime = classify_regime(p)
    if regime is PTRegime.UNBROKEN:
        return unbroken_coeffs_from_value(p, g0)
    if regime is PTRegime.BROKEN:
        return broken_coeffs_from_value(p, g0)
    return ep_coeffs_from_value(p, g0)


def oracle_metric_fn(p: PTParams, coeffs):
    """Closed-form map t -> G(t) for any of the three coefficient families."""
    if isinstance(coeffs, UnbrokenMetricParams):
        return lambda t: unbroken_metric(p, coeffs, t)
    if isinstance(coeffs, BrokenMetricParams):
        return lambda t: broken_metric(p, coeffs, t)
    if isinstance(coeffs, EPMetricParams):
        return lambda t: ep_metric(p, coeffs, t)
    raise TypeError(f"not a metric coefficient set: {coeffs!r}")


def _check_reconstruction(rebuilt: np.ndarray, g0: np.ndarray) -> None:
    if np.linalg.norm(rebuilt - g0) > 1e-10 * max(1.0, float(np.linalg.norm(g0))):
        raise ConstraintViolated("value is not attainable by this coefficient family")
