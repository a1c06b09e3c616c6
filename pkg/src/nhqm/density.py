"""Generalized density matrices: construction, dressing, traces, expectations.

A generalized density matrix carries its trailing metric factor inside the
stored matrix, ρ = Σ_i p_i |ψ_i⟩⟨ψ_i|·G, so the plain matrix trace is the
physically meaningful one.  The bare matrix ρ·G^{-1} is a derived view, and
the dressing G^{1/2}·ρ·G^{-1/2} is a *-isomorphism onto conventional density
matrices (Hermitian, positive semidefinite, unit trace, same spectrum).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (
    BadShape,
    BadWeights,
    IncompleteBasis,
    NonProductMetric,
    UnnormalizedMember,
)
from .hamiltonian import matrix_from_json, matrix_to_json
from .linalg import as_complex_matrix, herm_part, hpd_inv_sqrt, hpd_sqrt, require_hpd

__all__ = [
    "GeneralizedDensityMatrix",
    "gdm_from_ensemble",
    "gdm_from_conventional",
    "dress",
    "g_orthonormal_basis",
    "generalized_trace",
    "partial_trace",
    "expectation",
    "gdm_to_json",
    "gdm_from_json",
]


@dataclass
class GeneralizedDensityMatrix:
    """ρ = Σ p_i |ψ_i⟩⟨ψ_i|·G together with the metric G it was built against.

    ``weights`` is optional metadata; no operation may rely on a known
    ensemble.
    """

    rho: np.ndarray
    metric: np.ndarray
    weights: list[tuple[float, np.ndarray]] | None = None

    @property
    def dim(self) -> int:
        return self.rho.shape[0]

    def bare(self) -> np.ndarray:
        """The metric-stripped matrix ρ·G^{-1}."""
        return np.linalg.solve(self.metric.conj().T, self.rho.conj().T).conj().T

    def self_adjoint_residual(self) -> float:
        return float(np.linalg.norm(self.rho.conj().T @ self.metric - self.metric @ self.rho))

    def eigenvalues(self) -> np.ndarray:
        """Real spectrum of ρ (equal to that of the dressed matrix)."""
        return np.linalg.eigvalsh(herm_part(dress(self)))


def gdm_from_ensemble(
    ensemble: Sequence[tuple[float, np.ndarray]], g: np.ndarray
) -> GeneralizedDensityMatrix:
    """Build ρ = Σ p_i |ψ_i⟩⟨ψ_i|·G from a normalized ensemble.

    Probabilities must be non-negative and sum to one; every member must have
    unit generalized norm ⟨ψ|G|ψ⟩ = 1.
    """
    g = require_hpd(g, "metric")
    if not ensemble:
        raise BadWeights("empty ensemble")
    probs = np.array([p for p, _ in ensemble], dtype=float)
    if np.any(probs < 0):
        raise BadWeights("negative probability")
    if abs(probs.sum() - 1.0) > 1e-12:
        raise BadWeights(f"probabilities sum to {probs.sum()!r}, not 1")
    rho = np.zeros_like(g)
    members = []
    for p, psi in ensemble:
        v = np.asarray(psi, dtype=complex).reshape(-1)
        nrm = (v.conj() @ g @ v).real
        if abs(nrm - 1.0) > 1e-10:
            raise UnnormalizedMember(f"member has squared norm {nrm!r}")
        rho += p * np.outer(v, v.conj())
        members.append((float(p), v))
    return GeneralizedDensityMatrix(rho @ g, g, members)


def dress(gdm: GeneralizedDensityMatrix) -> np.ndarray:
    """Conventional density matrix G^{1/2}·ρ·G^{-1/2}."""
    g_sqrt, g_isqrt = hpd_sqrt(gdm.metric), hpd_inv_sqrt(gdm.metric)
    return herm_part(g_sqrt @ gdm.rho @ g_isqrt)


def gdm_from_conventional(rho_hat: np.ndarray, g: np.ndarray) -> GeneralizedDensityMatrix:
    """Inverse dressing: the GDM whose dressed form is ``rho_hat``."""
    rho_hat = as_complex_matrix(rho_hat, "density matrix")
    g = require_hpd(g, "metric")
    rho = hpd_inv_sqrt(g) @ rho_hat @ hpd_sqrt(g)
    return GeneralizedDensityMatrix(rho, g, None)


def g_orthonormal_basis(g: np.ndarray) -> list[np.ndarray]:
    """Kets satisfying the generalized completeness relation Σ|n⟩⟨n|·G = 1."""
    g_isqrt = hpd_inv_sqrt(g)
    return [g_isqrt[:, i].copy() for i in range(g.shape[0])]


def generalized_trace(a: np.ndarray, basis: Sequence[np.ndarray], g: np.ndarray) -> complex:
    """Trace Σ_n ⟨n|G·A|n⟩ over a basis satisfying Σ|n⟩⟨n|·G = 1.

    Equals the plain matrix trace as a consequence of the completeness
    relation and the cyclic property.
    """
    a = as_complex_matrix(a, "operator")
    g = require_hpd(g, "metric")
    vs = [np.asarray(k, dtype=complex).reshape(-1) for k in basis]
    s = np.zeros_like(g)
    for v in vs:
        s += np.outer(v, v.conj())
    if np.linalg.norm(s @ g - np.eye(g.shape[0])) > 1e-10:
        raise IncompleteBasis("basis does not satisfy Σ|n⟩⟨n|G = 1")
    return complex(sum(v.conj() @ g @ a @ v for v in vs))


def _split_dims(total: int, dim_a: int, dim_b: int) -> None:
    if dim_a * dim_b != total or dim_a < 1 or dim_b < 1:
        raise BadShape(f"dimensions ({dim_a}, {dim_b}) do not factor a {total}-dim space")


def partial_trace(
    gdm: GeneralizedDensityMatrix,
    g_a: np.ndarray,
    g_b: np.ndarray,
    over: str,
) -> GeneralizedDensityMatrix:
    """Reduced generalized density matrix on the kept subsystem.

    Requires the composite metric to factor as G_A ⊗ G_B.  The bare matrix is
    contracted against the traced subsystem's metric:
    ρ_A = tr_B[ρ·G^{-1}·(1_A ⊗ G_B)]·G_A and symmetrically for B.
    """
    g_a = require_hpd(g_a, "metric A")
    g_b = require_hpd(g_b, "metric B")
    da, db = g_a.shape[0], g_b.shape[0]
    _split_dims(gdm.dim, da, db)
    product = np.kron(g_a, g_b)
    if np.linalg.norm(gdm.metric - product) > 1e-10 * max(1.0, float(np.linalg.norm(product))):
        raise NonProductMetric("composite metric does not factor as G_A ⊗ G_B")
    bare = gdm.bare().reshape(da, db, da, db)
    if over == "B":
        reduced_bare = np.einsum("aibj,ji->ab", bare, g_b)
        return GeneralizedDensityMatrix(reduced_bare @ g_a, g_a, None)
    if over == "A":
        reduced_bare = np.einsum("aibj,ba->ij", bare, g_a)
        return GeneralizedDensityMatrix(reduced_bare @ g_b, g_b, None)
    raise ValueError("over must be 'A' or 'B'")


def expectation(gdm: GeneralizedDensityMatrix, op: np.ndarray) -> complex:
    """Expectation value tr(ρ·O); real when O is self-adjoint against G."""
    op = as_complex_matrix(op, "observable")
    return complex(np.trace(gdm.rho @ op))


# -- JSON round-trip -----------------------------------------------------------


def gdm_to_json(gdm: GeneralizedDensityMatrix, dim_a: int, dim_b: int) -> dict:
    _split_dims(gdm.dim, dim_a, dim_b)
    return {
        "dim_a": int(dim_a),
        "dim_b": int(dim_b),
        "rho": matrix_to_json(gdm.rho),
        "metric": matrix_to_json(gdm.metric),
    }


def gdm_from_json(obj: dict) -> tuple[GeneralizedDensityMatrix, int, int]:
    from .errors import ValidationError

    if not isinstance(obj, dict):
        raise ValidationError("gdm", "expected an object")
    keys = set(obj)
    required = {"dim_a", "dim_b", "rho", "metric"}
    missing = required - keys
    if missing:
        raise ValidationError(f"gdm.{sorted(missing)[0]}", "required")
    unknown = keys - required
    if unknown:
        raise ValidationError(f"gdm.{sorted(unknown)[0]}", "unknown key")
    dim_a, dim_b = int(obj["dim_a"]), int(obj["dim_b"])
    rho = matrix_from_json(obj["rho"], "gdm.rho")
    metric = matrix_from_json(obj["metric"], "gdm.metric")
    _split_dims(rho.shape[0], dim_a, dim_b)
    if metric.shape != rho.shape:
        raise ValidationError("gdm.metric", "shape mismatch with rho")
    return GeneralizedDensityMatrix(rho, require_hpd(metric, "gdm.metric"), None), dim_a, dim_b
