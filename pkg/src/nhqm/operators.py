"""Generalized adjoints, self-adjointness and unitarity tests, dressing maps.

Against a metric G the adjoint of an operator is G^{-1}·O†·G, observables
satisfy O†G = GO, and the operators preserving all generalized inner
products satisfy U†GU = G.  The dressing map X -> G^{-1/2}·X·G^{1/2} carries
conventional operators isometrically onto compliant ones, which is the
canonical way to manufacture them.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from .errors import IncompleteSet, NotUnitaryInput
from .linalg import as_complex_matrix, frobenius, hpd_inv_sqrt, hpd_sqrt, require_hpd


class OperatorRole(Enum):
    OBSERVABLE = "observable"
    UNITARY = "unitary"
    MEASUREMENT = "measurement"


@dataclass(frozen=True)
class DressedOperator:
    """An operator validated against a metric snapshot."""

    matrix: np.ndarray
    metric_at: np.ndarray
    role: OperatorRole


def sharp_adjoint(op: np.ndarray, g: np.ndarray) -> np.ndarray:
    """Generalized adjoint G^{-1}·O†·G."""
    op = as_complex_matrix(op, "operator")
    g = require_hpd(g, "metric")
    return np.linalg.solve(g, op.conj().T @ g)


def self_adjoint_residual(op: np.ndarray, g: np.ndarray) -> float:
    """Frobenius norm of O†·G − G·O."""
    return frobenius(op.conj().T @ g - g @ op)


def is_self_adjoint(op: np.ndarray, g: np.ndarray, tol: float = 1e-10) -> tuple[bool, float]:
    """Whether O is a generalized observable against G, with the residual."""
    op = as_complex_matrix(op, "operator")
    g = require_hpd(g, "metric")
    res = self_adjoint_residual(op, g)
    return res <= tol, res


def unitarity_residual(u: np.ndarray, g: np.ndarray) -> float:
    """Frobenius norm of U†·G·U − G."""
    return frobenius(u.conj().T @ g @ u - g)


def dress_operator(x: np.ndarray, g: np.ndarray) -> np.ndarray:
    """Similarity transform G^{-1/2}·X·G^{1/2} into the metricized frame."""
    return hpd_inv_sqrt(g) @ x @ hpd_sqrt(g)


def undress_operator(x: np.ndarray, g: np.ndarray) -> np.ndarray:
    """Inverse dressing G^{1/2}·X·G^{-1/2} back to the conventional frame."""
    return hpd_sqrt(g) @ x @ hpd_inv_sqrt(g)


def dress_unitary(v: np.ndarray, g: np.ndarray) -> DressedOperator:
    """Generalized unitary G^{-1/2}·V·G^{1/2} from a conventional unitary V.

    The output leaves the metric invariant and therefore preserves all
    generalized inner products.
    """
    v = as_complex_matrix(v, "unitary")
    g = require_hpd(g, "metric")
    if frobenius(v.conj().T @ v - np.eye(v.shape[0])) > 1e-10:
        raise NotUnitaryInput("input does not satisfy V†V = 1")
    return DressedOperator(dress_operator(v, g), g, OperatorRole.UNITARY)


def dress_measurement_set(ks: Sequence[np.ndarray], g: np.ndarray) -> list[DressedOperator]:
    """Dress a conventional Kraus set {K_j} with Σ K†K = 1 into operators
    satisfying Σ M†·G·M = G."""
    g = require_hpd(g, "metric")
    mats = [as_complex_matrix(k, f"kraus[{i}]") for i, k in enumerate(ks)]
    if not mats:
        raise IncompleteSet("empty measurement set")
    total = sum(k.conj().T @ k for k in mats)
    if frobenius(total - np.eye(g.shape[0])) > 1e-10:
        raise IncompleteSet("set does not satisfy Σ K†K = 1")
    g_sqrt, g_isqrt = hpd_sqrt(g), hpd_inv_sqrt(g)
    return [
        DressedOperator(g_isqrt @ k @ g_sqrt, g, OperatorRole.MEASUREMENT) for k in mats
    ]
