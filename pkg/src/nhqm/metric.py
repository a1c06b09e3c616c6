"""Metric operators G(t): construction, integration, validation, transitions."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
import scipy.optimize

from ._flow import CachedFlow
from .errors import NoStationaryMetric, PositivityLost, SingularBasis
from .hamiltonian import HamiltonianModel, TimeDependent, dim_of, materialize
from .linalg import (
    TOL_PD_REL,
    as_complex_matrix,
    frobenius,
    herm_part,
    hermiticity_residual,
    require_hpd,
)

__all__ = [
    "metric_rhs",
    "MetricTrajectory",
    "solve_metric",
    "stationary_metric",
    "metric_from_basis",
    "TransitionFunction",
    "propagate_transition",
    "MetricCheck",
    "check_metric",
    "metric_csv",
]


def metric_rhs(h: HamiltonianModel, t: float, g: np.ndarray) -> np.ndarray:
    """Flow equation right-hand side i·(G·H(t) − H†(t)·G)."""
    hm = materialize(h, t)
    return 1j * (g @ hm - hm.conj().T @ g)


def _positivity_guard(t: float, g: np.ndarray) -> None:
    w = np.linalg.eigvalsh(g)
    if w[0] <= TOL_PD_REL * w[-1] or w[-1] <= 0.0:
        raise PositivityLost(t, float(w[0]))


class MetricTrajectory:
    """G(t) as a stationary matrix, a closed form, or an integrated path.

    Integrated trajectories cache RK4 samples on the step grid, symmetrize
    after every step, re-check positivity at every cached sample, and
    interpolate with cubic Hermite polynomials between samples.  Queries
    beyond the cached range trigger further integration.
    """

    def __init__(self, kind: str, at_fn: Callable[[float], np.ndarray], label: str = "",
                 flow: CachedFlow | None = None):
        self.kind = kind
        self.label = label
        self._at = at_fn
        self.flow = flow

    @classmethod
    def stationary(cls, g: np.ndarray) -> "MetricTrajectory":
        g = require_hpd(g, "stationary metric")
        return cls("stationary", lambda t: g.copy(), "stationary")

    @classmethod
    def closed_form(cls, fn: Callable[[float], np.ndarray], label: str = "closed_form"
                    ) -> "MetricTrajectory":
        return cls("closed_form", fn, label)

    @classmethod
    def integrated(cls, h: HamiltonianModel, g0: np.ndarray, t0: float, step: float
                   ) -> "MetricTrajectory":
        g0 = require_hpd(g0, "initial metric")
        if g0.shape[0] != dim_of(h):
            raise ValueError("metric dimension does not match the Hamiltonian")
        flow = CachedFlow(
            lambda t, g: metric_rhs(h, t, g),
            t0,
            herm_part(g0),
            step,
            post_step=herm_part,
            on_sample=_positivity_guard,
        )
        return cls("integrated", flow.at, "integrated", flow=flow)

    def at(self, t: float) -> np.ndarray:
        """Metric at time ``t``."""
        return self._at(t)


def solve_metric(
    h: HamiltonianModel, g0: np.ndarray, t0: float, t1: float, step: float
) -> MetricTrajectory:
    """Integrate the metric flow from ``g0`` at ``t0`` through ``t1``.

    Raises :class:`PositivityLost` if any cached sample stops being positive
    definite (an invalid initial condition or a step too large).
    """
    traj = MetricTrajectory.integrated(h, g0, t0, step)
    traj.flow.ensure(t1)
    return traj


# -- stationary metrics ---------------------------------------------------------


def _hermitian_null_basis(hm: np.ndarray, tol_rel: float = 1e-10) -> list[np.ndarray]:
    """Orthonormal real basis of Hermitian solutions of G·H = H†·G."""
    d = hm.shape[0]
    eye = np.eye(d)
    # Row-major vectorization: G·H -> kron(I, H^T), H†·G -> kron(conj(H), I).
    m = np.kron(eye, hm.T) - np.kron(hm.conj().T, eye)
    _, sv, vh = np.linalg.svd(m)
    smax = sv[0] if sv.size and sv[0] > 0 else 1.0
    null_mats = [vh[i].conj().reshape(d, d) for i in range(d * d) if sv[i] <= tol_rel * smax]
    if not null_mats:
        return []
    # The null space is closed under conjugate transpose, so its Hermitian
    # part is spanned by the Hermitian and anti-Hermitian splits.
    cands = []
    for n in null_mats:
        cands.append(herm_part(n))
        cands.append(herm_part(1j * n))
    rows = np.array([np.concatenate([c.real.ravel(), c.imag.ravel()]) for c in cands])
    _, rv, rvh = np.linalg.svd(rows, full_matrices=False)
    basis = []
    for i, s in enumerate(rv):
        if s > 1e-10 * rv[0]:
            vec = rvh[i]
            mat = vec[: d * d].reshape(d, d) + 1j * vec[d * d :].reshape(d, d)
            basis.append(herm_part(mat) / np.linalg.norm(mat))
    return basis


def _max_min_eig_direction(basis: list[np.ndarray]) -> np.ndarray:
    """Element of span(basis) with unit Frobenius norm maximizing the smallest eigenvalue."""
    k = len(basis)
    stack = np.stack(basis)

    def assemble(x: np.ndarray) -> np.ndarray:
        return np.tensordot(x, stack, axes=1)

    def min_eig(x: np.ndarray) -> float:
        return float(np.linalg.eigvalsh(assemble(x))[0])

    if k == 1:
        return max((basis[0], -basis[0]), key=lambda g: np.linalg.eigvalsh(g)[0])

    if k == 2:
        # One-dimensional search over the circle, then a secant polish on the
        # eigenvalue derivative when the smallest eigenvalue is simple.
        def f(th):
            return min_eig(np.array([np.cos(th), np.sin(th)]))

        thetas = np.linspace(0.0, 2.0 * np.pi, 1441, endpoint=False)
        best = max(thetas, key=f)
        lo, hi = best - np.pi / 720, best + np.pi / 720
        golden = 0.5 * (np.sqrt(5.0) - 1.0)
        a_, b_ = lo, hi
        c_, d_ = b_ - golden * (b_ - a_), a_ + golden * (b_ - a_)
        for _ in range(80):
            if f(c_) > f(d_):
                b_, d_ = d_, c_
                c_ = b_ - golden * (b_ - a_)
            else:
                a_, c_ = c_, d_
                d_ = a_ + golden * (b_ - a_)
        th = 0.5 * (a_ + b_)

        def dmin(th):
            x = np.array([np.cos(th), np.sin(th)])
            g = assemble(x)
            w, v = np.linalg.eigh(g)
            if w.size > 1 and (w[1] - w[0]) < 1e-9 * max(1.0, abs(w[-1])):
                return None
            vec = v[:, 0]
            gprime = assemble(np.array([-np.sin(th), np.cos(th)]))
            return float(np.real(vec.conj() @ gprime @ vec))

        d_th = dmin(th)
        t0, t1 = th - 1e-5, th
        d0, d1 = dmin(t0), dmin(t1)
        if d_th is not None and d0 is not None and d1 is not None:
            for _ in range(60):
                if d1 == d0:
                    break
                t2 = t1 - d1 * (t1 - t0) / (d1 - d0)
                if not np.isfinite(t2) or abs(t2 - th) > 0.01:
                    break
                d2 = dmin(t2)
                if d2 is None:
                    break
                t0, d0, t1, d1 = t1, d1, t2, d2
                if abs(t1 - t0) < 1e-15:
                    break
            # Judge the polish by the stationarity defect; near the optimum the
            # function values only differ by floating noise.
            if abs(d1) <= abs(d_th) and f(t1) >= f(th) - 1e-10 * max(1.0, abs(f(th))):
                th = t1
        return assemble(np.array([np.cos(th), np.sin(th)]))

    # k >= 3: concave maximization of the smallest eigenvalue over the unit ball.
    starts = [np.eye(k)[i] for i in range(k)] + [-np.eye(k)[i] for i in range(k)]
    starts.append(np.ones(k) / np.sqrt(k))
    best_x, best_val = None, -np.inf
    for x0 in starts:
        res = scipy.optimize.minimize(
            lambda x: -min_eig(x),
            x0,
            method="SLSQP",
            constraints=[{"type": "ineq", "fun": lambda x: 1.0 - x @ x}],
            options={"maxiter": 300, "ftol": 1e-14},
        )
        x = res.x / max(np.linalg.norm(res.x), 1e-300)
        val = min_eig(x)
        if val > best_val:
            best_x, best_val = x, val
    # Fixed-point polish on the stationarity condition x_k ∝ <v|B_k|v>.
    x = best_x
    for _ in range(50):
        g = assemble(x)
        w, v = np.linalg.eigh(g)
        if w.size > 1 and (w[1] - w[0]) < 1e-9 * max(1.0, abs(w[-1])):
            break
        vec = v[:, 0]
        grad = np.array([float(np.real(vec.conj() @ bmat @ vec)) for bmat in stack])
        nrm = np.linalg.norm(grad)
        if nrm < 1e-14:
            break
        xn = grad / nrm
        if min_eig(xn) < min_eig(x):
            break
        if np.linalg.norm(xn - x) < 1e-16:
            x = xn
            break
        x = xn
    return assemble(x)


def stationary_metric(h: HamiltonianModel) -> np.ndarray:
    """Hermitian positive-definite solution of G·H = H†·G, unit-determinant normalized.

    The intertwining relation is vectorized, its null space extracted, and
    the Hermitian element maximizing the smallest eigenvalue (at unit
    Frobenius norm) is selected as the canonical representative.  Raises
    :class:`NoStationaryMetric` when the null space has no positive-definite
    Hermitian element, e.g. in the PT-broken regime.
    """
    if isinstance(h, TimeDependent):
        raise ValueError("stationary metrics require a time-independent Hamiltonian")
    hm = materialize(h, 0.0)
    basis = _hermitian_null_basis(hm)
    if not basis:
        raise NoStationaryMetric("intertwining relation has no Hermitian solutions")
    g = _max_min_eig_direction(basis)
    w = np.linalg.eigvalsh(g)
    if w[0] <= TOL_PD_REL * max(w[-1], 0.0) or w[-1] <= 0.0:
        raise NoStationaryMetric(
            f"no positive-definite element (best smallest eigenvalue {w[0]:.3e})"
        )
    det = np.linalg.det(g).real
    return herm_part(g / det ** (1.0 / hm.shape[0]))


# -- metrics from bases -----------------------------------------------------------


def metric_from_basis(kets: Sequence[np.ndarray]) -> np.ndarray:
    """Metric G = (Σ_n |n⟩⟨n|)^{-1} from a complete set of basis kets."""
    if not kets:
        raise SingularBasis("empty basis")
    vs = [np.asarray(k, dtype=complex).reshape(-1) for k in kets]
    d = vs[0].size
    s = np.zeros((d, d), dtype=complex)
    for v in vs:
        s += np.outer(v, v.conj())
    s = herm_part(s)
    w, v = np.linalg.eigh(s)
    if w[0] <= 0.0 or w[-1] / w[0] > 1e12:
        raise SingularBasis(
            f"Gram construction is rank-deficient (condition {w[-1] / max(w[0], 1e-300):.2e})"
        )
    return herm_part((v / w) @ v.conj().T)


# -- transition functions -----------------------------------------------------------


@dataclass
class TransitionFunction:
    """Covariantly constant transition T(t) between metric choices.

    Satisfies dT/dt = −i·[H(t), T]; two metric trajectories related at one
    instant by G2 = T†·G1·T stay related the same way along the flow.
    """

    t0: float
    T0: np.ndarray
    _flow: CachedFlow = field(repr=False)

    def at(self, t: float) -> np.ndarray:
        return self._flow.at(t)


def propagate_transition(
    h: HamiltonianModel, t0_matrix: np.ndarray, t0: float, t1: float, step: float
) -> TransitionFunction:
    """Integrate the commutator flow of a transition function through ``t1``."""
    m0 = as_complex_matrix(t0_matrix, "transition")
    if np.linalg.cond(m0) > 1e12:
        raise ValueError("initial transition function must be invertible")

    def rhs(t: float, x: np.ndarray) -> np.ndarray:
        hm = materialize(h, t)
        return -1j * (hm @ x - x @ hm)

    flow = CachedFlow(rhs, t0, m0, step)
    flow.ensure(t1)
    return TransitionFunction(t0, m0, flow)


# -- validity reporting ------------------------------------------------------------


@dataclass(frozen=True)
class MetricCheck:
    hermiticity_residual: float
    min_eigenvalue: float
    max_eigenvalue: float
    positive_definite: bool


def check_metric(g: np.ndarray) -> MetricCheck:
    """Report Hermiticity residual and spectrum bounds of a candidate metric."""
    g = as_complex_matrix(g, "metric")
    res = hermiticity_residual(g)
    w = np.linalg.eigvalsh(herm_part(g))
    ok = res <= 1e-10 * max(1.0, frobenius(g)) and w[0] > TOL_PD_REL * w[-1] and w[-1] > 0
    return MetricCheck(res, float(w[0]), float(w[-1]), bool(ok))


def metric_csv(traj: MetricTrajectory, times: Sequence[float]) -> str:
    """CSV of metric samples: columns t, re(g_11), im(g_11), ... row-major."""
    times = list(times)
    g0 = traj.at(times[0])
    d = g0.shape[0]
    header = ["t"]
    for i in range(d):
        for j in range(d):
            header.append(f"re(g_{i + 1}{j + 1})")
            header.append(f"im(g_{i + 1}{j + 1})")
    lines = [",".join(header)]
    for t in times:
        g = traj.at(t)
        row = [repr(float(t))]
        for i in range(d):
            for j in range(d):
                row.append(repr(float(g[i, j].real)))
                row.append(repr(float(g[i, j].imag)))
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"
