"""Dense complex linear-algebra kernels used by every other module."""

from __future__ import annotations

from typing import Callable

import numpy as np
import scipy.linalg

from .errors import BadShape, NonFinite, NotHPD

# Relative floor for positive-definiteness checks: min eigenvalue must exceed
# TOL_PD_REL times the max eigenvalue.
TOL_PD_REL = 1e-12

# Hermiticity residual above which a matrix is rejected as a metric.
TOL_HERMITICITY = 1e-10


def dagger(a: np.ndarray) -> np.ndarray:
    """Conjugate transpose."""
    return a.conj().T


def herm_part(a: np.ndarray) -> np.ndarray:
    """Hermitian part (A + A†)/2."""
    return 0.5 * (a + a.conj().T)


def frobenius(a: np.ndarray) -> float:
    """Frobenius norm."""
    return float(np.linalg.norm(a))


def hermiticity_residual(a: np.ndarray) -> float:
    """Frobenius norm of A − A†."""
    return float(np.linalg.norm(a - a.conj().T))


def as_complex_matrix(a, name: str = "matrix") -> np.ndarray:
    """Validate and return a square, finite complex matrix."""
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
        raise BadShape(f"{name} must be a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m.view(float))):
        raise NonFinite(f"{name} contains NaN/Inf entries")
    return m


def as_complex_vector(a, name: str = "vector") -> np.ndarray:
    """Validate and return a finite complex vector."""
    v = np.asarray(a, dtype=complex).reshape(-1)
    if v.size < 1:
        raise BadShape(f"{name} must have at least one entry")
    if not np.all(np.isfinite(v.view(float))):
        raise NonFinite(f"{name} contains NaN/Inf entries")
    return v


def require_hpd(g, name: str = "metric") -> np.ndarray:
    """Validate that ``g`` is Hermitian positive definite and return it.

    Hermiticity is accepted up to Frobenius residual 1e-10; the smallest
    eigenvalue must exceed ``TOL_PD_REL`` times the largest.
    """
    g = as_complex_matrix(g, name)
    res = hermiticity_residual(g)
    if res > TOL_HERMITICITY * max(1.0, frobenius(g)):
        raise NotHPD(f"{name} is not Hermitian (residual {res:.3e})")
    w = np.linalg.eigvalsh(herm_part(g))
    if w[0] <= TOL_PD_REL * w[-1] or w[-1] <= 0.0:
        raise NotHPD(f"{name} is not positive definite (eigenvalues in [{w[0]:.3e}, {w[-1]:.3e}])")
    return g


def is_hpd(g) -> bool:
    """True if ``g`` passes the Hermitian-positive-definite check."""
    try:
        require_hpd(g)
    except (NotHPD, BadShape, NonFinite):
        return False
    return True


def expm(a: np.ndarray, scale: complex = 1.0) -> np.ndarray:
    """Matrix exponential exp(scale·A) by scaling-and-squaring with a Padé core."""
    a = as_complex_matrix(a, "matrix")
    out = scipy.linalg.expm(scale * a)
    if not np.all(np.isfinite(out.view(float))):
        raise NonFinite("matrix exponential overflowed")
    return out


def hpd_sqrt(a: np.ndarray) -> np.ndarray:
    """Unique Hermitian positive-definite square root of an HPD matrix."""
    a = require_hpd(a, "matrix")
    w, v = np.linalg.eigh(herm_part(a))
    return herm_part((v * np.sqrt(w)) @ v.conj().T)


def hpd_inv_sqrt(a: np.ndarray) -> np.ndarray:
    """Inverse square root A^{-1/2} of an HPD matrix."""
    a = require_hpd(a, "matrix")
    w, v = np.linalg.eigh(herm_part(a))
    return herm_part((v / np.sqrt(w)) @ v.conj().T)


def rk4_step(
    rhs: Callable[[float, np.ndarray], np.ndarray],
    t: float,
    x: np.ndarray,
    h: float,
    k1: np.ndarray | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """One classic fourth-order Runge–Kutta step.

    Returns ``(x_next, k1)`` where ``k1 = rhs(t, x)`` so callers can reuse the
    first stage as the cached derivative at ``t``.
    """
    if k1 is None:
        k1 = rhs(t, x)
    k2 = rhs(t + 0.5 * h, x + (0.5 * h) * k1)
    k3 = rhs(t + 0.5 * h, x + (0.5 * h) * k2)
    k4 = rhs(t + h, x + h * k3)
    return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4), k1


def integrate_matrix_ode(
    rhs: Callable[[float, np.ndarray], np.ndarray],
    x0: np.ndarray,
    t0: float,
    t1: float,
    step: float,
) -> np.ndarray:
    """Integrate dX/dt = rhs(t, X) from t0 to t1 with fixed-step RK4.

    The final partial step is shortened to land exactly on ``t1``.  Works for
    matrix- or vector-valued states; raises :class:`NonFinite` if any stage
    produces NaN/Inf.
    """
    if step <= 0.0:
        raise ValueError("step must be positive")
    x = np.asarray(x0, dtype=complex)
    span = t1 - t0
    if span == 0.0:
        return x.copy()
    h = step if span > 0 else -step
    n_full = int(abs(span) // step)
    t = t0
    for _ in range(n_full):
        x, _ = rk4_step(rhs, t, x, h)
        t += h
    rem = t1 - t
    if abs(rem) > 1e-15 * max(1.0, abs(t1)):
        x, _ = rk4_step(rhs, t, x, rem)
    if not np.all(np.isfinite(x.view(float))):
        raise NonFinite("RK4 integration produced NaN/Inf")
    return x
