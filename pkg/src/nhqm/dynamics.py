"""State and density-matrix time evolution, generalized inner products, norms."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from ._flow import CachedFlow
from .errors import NonFinite
from .hamiltonian import HamiltonianModel, TimeDependent, materialize
from .linalg import as_complex_matrix, as_complex_vector, expm, require_hpd

__all__ = [
    "propagate_state",
    "StateTrajectory",
    "state_trajectory",
    "inner",
    "gnorm",
    "evolve_gdm",
    "gdm_flow",
    "evolve_normalized_density",
    "evolution_csv",
]


def _state_rhs(h: HamiltonianModel):
    def rhs(t: float, psi: np.ndarray) -> np.ndarray:
        return -1j * (materialize(h, t) @ psi)

    return rhs


def propagate_state(
    h: HamiltonianModel,
    psi0: np.ndarray,
    t0: float,
    t1: float,
    step: float = 1e-3,
) -> np.ndarray:
    """Solve i·dψ/dt = H(t)ψ from t0 to t1.

    Time-independent Hamiltonians use the exact propagator exp(−iH·(t1−t0));
    time-dependent ones are integrated with fixed-step RK4.
    """
    psi0 = as_complex_vector(psi0, "state")
    if not isinstance(h, TimeDependent):
        out = expm(materialize(h, t0), -1j * (t1 - t0)) @ psi0
    else:
        flow = CachedFlow(_state_rhs(h), t0, psi0, step)
        out = flow.at(t1)
    if not np.all(np.isfinite(out.view(float))):
        raise NonFinite("state propagation produced NaN/Inf")
    return out


class StateTrajectory:
    """ψ(t) integrated with RK4 on a fixed grid, with Hermite interpolation."""

    def __init__(self, h: HamiltonianModel, psi0: np.ndarray, t0: float, step: float):
        self.h = h
        self.psi0 = as_complex_vector(psi0, "state")
        self.step = float(step)
        self._flow = CachedFlow(_state_rhs(h), t0, self.psi0, step)

    def at(self, t: float) -> np.ndarray:
        return self._flow.at(t)


def state_trajectory(
    h: HamiltonianModel, psi0: np.ndarray, t0: float, step: float
) -> StateTrajectory:
    return StateTrajectory(h, psi0, t0, step)


def inner(psi: np.ndarray, phi: np.ndarray, g: np.ndarray) -> complex:
    """Generalized inner product ⟨ψ|G|φ⟩."""
    psi = as_complex_vector(psi, "psi")
    phi = as_complex_vector(phi, "phi")
    g = require_hpd(g, "metric")
    return complex(psi.conj() @ g @ phi)


def gnorm(psi: np.ndarray, g: np.ndarray) -> float:
    """Generalized norm sqrt(⟨ψ|G|ψ⟩)."""
    val = inner(psi, psi, g).real
    return float(np.sqrt(max(val, 0.0)))


def _liouville_rhs(h: HamiltonianModel):
    def rhs(t: float, rho: np.ndarray) -> np.ndarray:
        hm = materialize(h, t)
        return -1j * (hm @ rho - rho @ hm)

    return rhs


def gdm_flow(h: HamiltonianModel, rho0: np.ndarray, t0: float, step: float) -> CachedFlow:
    """Trajectory of dρ/dt = −i·[H(t), ρ] with cached samples."""
    rho0 = as_complex_matrix(rho0, "density matrix")
    return CachedFlow(_liouville_rhs(h), t0, rho0, step)


def evolve_gdm(
    h: HamiltonianModel, rho0: np.ndarray, t0: float, t1: float, step: float
) -> np.ndarray:
    """Evolve a generalized density matrix by the commutator flow −i[H, ρ].

    The plain matrix trace is conserved along the flow for any Hamiltonian,
    Hermitian or not.
    """
    flow = gdm_flow(h, rho0, t0, step)
    return flow.at(t1)


def evolve_normalized_density(
    h: HamiltonianModel, rho_n0: np.ndarray, t0: float, t1: float, step: float
) -> np.ndarray:
    """Evolve the trace-normalized conventional density matrix.

    Integrates i·dρ/dt = Hρ − ρH† + tr{ρ(H† − H)}·ρ, the nonlinear equation
    obtained by normalizing ρ by its trace at every instant.
    """
    rho_n0 = as_complex_matrix(rho_n0, "density matrix")
    if abs(np.trace(rho_n0) - 1.0) > 1e-10:
        raise ValueError("normalized density must have unit trace")

    def rhs(t: float, rho: np.ndarray) -> np.ndarray:
        hm = materialize(h, t)
        hdag = hm.conj().T
        return -1j * (hm @ rho - rho @ hdag + np.trace(rho @ (hdag - hm)) * rho)

    flow = CachedFlow(rhs, t0, rho_n0, step)
    return flow.at(t1)


def evolution_csv(
    times: Sequence[float],
    states: Sequence[np.ndarray],
    metrics: Sequence[np.ndarray],
) -> str:
    """CSV rows: t, re/im of state components, generalized norm, conventional norm."""
    d = int(np.asarray(states[0]).size)
    header = ["t"]
    for i in range(d):
        header.append(f"re(psi_{i + 1})")
        header.append(f"im(psi_{i + 1})")
    header += ["norm_g", "norm_conv"]
    lines = [",".join(header)]
    for t, psi, g in zip(times, states, metrics):
        psi = np.asarray(psi, dtype=complex).reshape(-1)
        row = [repr(float(t))]
        for x in psi:
            row.append(repr(float(x.real)))
            row.append(repr(float(x.imag)))
        row.append(repr(float(np.sqrt(max((psi.conj() @ g @ psi).real, 0.0)))))
        row.append(repr(float(np.linalg.norm(psi))))
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"
