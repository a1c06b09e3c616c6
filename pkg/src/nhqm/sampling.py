"""Seeded random generators for states, metrics, unitaries, and ensembles."""

from __future__ import annotations

import numpy as np

from .density import GeneralizedDensityMatrix, gdm_from_ensemble
from .linalg import herm_part

__all__ = [
    "rng_from",
    "rand_complex",
    "rand_unitary",
    "rand_state",
    "rand_hpd",
    "rand_g_normalized_state",
    "rand_probabilities",
    "rand_kraus_set",
    "rand_gdm",
]


def rng_from(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def rand_complex(rng: np.random.Generator, *shape: int) -> np.ndarray:
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def rand_unitary(rng: np.random.Generator, d: int) -> np.ndarray:
    """Haar-distributed unitary via QR with phase-fixed diagonal."""
    q, r = np.linalg.qr(rand_complex(rng, d, d))
    return q * (np.diagonal(r) / np.abs(np.diagonal(r)))


def rand_state(rng: np.random.Generator, d: int) -> np.ndarray:
    v = rand_complex(rng, d)
    return v / np.linalg.norm(v)


def rand_hpd(rng: np.random.Generator, d: int, spread: float = 2.0) -> np.ndarray:
    """Random Hermitian positive-definite matrix with spectrum in [1/spread, spread]."""
    if spread < 1.0:
        raise ValueError("spread must be >= 1")
    u = rand_unitary(rng, d)
    w = np.exp(rng.uniform(-np.log(spread), np.log(spread), size=d))
    return herm_part((u * w) @ u.conj().T)


def rand_g_normalized_state(rng: np.random.Generator, g: np.ndarray) -> np.ndarray:
    """Random state with unit generalized norm ⟨ψ|G|ψ⟩ = 1."""
    v = rand_complex(rng, g.shape[0])
    return v / np.sqrt((v.conj() @ g @ v).real)


def rand_probabilities(rng: np.random.Generator, k: int) -> np.ndarray:
    return rng.dirichlet(np.ones(k))


def rand_kraus_set(rng: np.random.Generator, d: int, n_ops: int) -> list[np.ndarray]:
    """Random conventional Kraus set with Σ K†K = 1 (blocks of a Haar isometry)."""
    big = rand_unitary(rng, d * n_ops)
    iso = big[:, :d]
    return [iso[j * d:(j + 1) * d, :] for j in range(n_ops)]


def rand_gdm(
    rng: np.random.Generator, g: np.ndarray, members: int
) -> GeneralizedDensityMatrix:
    """Random generalized density matrix from a G-normalized random ensemble."""
    probs = rand_probabilities(rng, members)
    ensemble = [(float(p), rand_g_normalized_state(rng, g)) for p in probs]
    return gdm_from_ensemble(ensemble, g)
