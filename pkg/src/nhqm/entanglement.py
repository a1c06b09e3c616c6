"""Entropy of entanglement, entanglement of formation, concurrence oracle.

Entanglement of a generalized density matrix is computed in the dressed
frame: dressing by G_A^{1/2} ⊗ G_B^{1/2} is a local *-isomorphism onto
conventional density matrices, so reduced-state spectra and decomposition
optimizations carry over verbatim.  The formation value is minimized over
ensemble decompositions parameterized by isometries mixing the eigenensemble
(every ensemble realizing a state arises this way); the returned value is an
upper bound on the infimum.  The closed-form two-qubit concurrence serves as
the independent accuracy oracle and is never used inside the optimizer.

Natural logarithms throughout; entropies are in nats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._optim import build_isometries, minimize_restarts, param_count
from .density import GeneralizedDensityMatrix, dress, gdm_from_ensemble, partial_trace
from .errors import BadShape, RankTooLarge, UnnormalizedState
from .linalg import herm_part

__all__ = [
    "binary_entropy",
    "entropy_pure",
    "DecompositionCandidate",
    "eof_optimize",
    "optimal_decomposition",
    "eof_upper_bounds",
    "concurrence",
    "concurrence_oracle",
]

_EIG_FLOOR = 1e-14
_RANK_TOL = 1e-12

_SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]])
_SY_SY = np.kron(_SIGMA_Y, _SIGMA_Y)


def _xlnx_sum(w: np.ndarray) -> float:
    """−Σ w ln w with the 0·ln0 := 0 convention."""
    w = np.asarray(w, dtype=float)
    w = w[w > _EIG_FLOOR]
    return float(-(w * np.log(w)).sum())


def binary_entropy(x: float) -> float:
    """h(x) = −x ln x − (1−x) ln(1−x) in nats."""
    return _xlnx_sum(np.array([x, 1.0 - x]))


def entropy_pure(psi: np.ndarray, g_a: np.ndarray, g_b: np.ndarray, side: str = "A") -> float:
    """Entropy of entanglement −tr(ρ_A ln ρ_A) of a normalized pure state.

    Computed from the eigenvalues of the dressed reduced matrix; the A- and
    B-side values agree.  Eigenvalues below 1e-14 contribute zero.
    """
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    g = np.kron(g_a, g_b)
    nrm = (psi.conj() @ g @ psi).real
    if abs(nrm - 1.0) > 1e-10:
        raise UnnormalizedState(f"state has squared generalized norm {nrm!r}")
    gdm = gdm_from_ensemble([(1.0, psi)], g)
    reduced = partial_trace(gdm, g_a, g_b, over="B" if side == "A" else "A")
    return _xlnx_sum(np.clip(reduced.eigenvalues(), 0.0, None))


# -- decomposition optimization --------------------------------------------------


@dataclass
class DecompositionCandidate:
    """An ensemble realizing a dressed density matrix.

    ``mix_isometry`` (m×r, orthonormal columns) mixes the eigenensemble into
    the candidate ensemble; the induced ensemble reconstructs the dressed
    matrix and its probabilities sum to one.
    """

    mix_isometry: np.ndarray
    ensemble: list[tuple[float, np.ndarray]]

    def reconstruct(self) -> np.ndarray:
        d = self.ensemble[0][1].size
        out = np.zeros((d, d), dtype=complex)
        for p, v in self.ensemble:
            out += p * np.outer(v, v.conj())
        return out


def _dressed_spectral_data(rho_hat: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Descending eigenvalues (clipped at zero) and matching eigenvectors."""
    w, v = np.linalg.eigh(herm_part(rho_hat))
    order = np.argsort(w)[::-1]
    w = np.clip(w[order], 0.0, None)
    return w, v[:, order]


def _rank(w: np.ndarray) -> int:
    return max(1, int(np.count_nonzero(w > _RANK_TOL * max(w[0], _RANK_TOL))))


def _infer_dims(dim: int, dims: tuple[int, int] | None) -> tuple[int, int]:
    if dims is not None:
        da, db = dims
        if da * db != dim:
            raise BadShape(f"dims {dims} do not factor dimension {dim}")
        return da, db
    root = math.isqrt(dim)
    if root * root != dim:
        raise BadShape(f"cannot infer subsystem split of dimension {dim}; pass dims")
    return root, root


def _default_ensemble_size(rank: int, da: int, db: int) -> int:
    # Two-qubit optimal decompositions never need more than four members,
    # and the smaller search space converges tighter as well as faster.
    if (da, db) == (2, 2):
        return max(rank, 4)
    return 2 * rank


def _member_entropy_sum(members: np.ndarray, da: int, db: int) -> np.ndarray:
    """Σ_j p_j·E_P(ψ_j) for batches of unnormalized members (K, m, da·db)."""
    k, m, _ = members.shape
    mats = members.reshape(k, m, da, db)
    rho_a = mats @ mats.conj().transpose(0, 1, 3, 2)
    probs = np.einsum("kmii->km", rho_a).real
    if da == 2:
        half_tr = 0.5 * probs
        det = (rho_a[..., 0, 0] * rho_a[..., 1, 1] - rho_a[..., 0, 1] * rho_a[..., 1, 0]).real
        disc = np.sqrt(np.clip(half_tr**2 - det, 0.0, None))
        w = np.stack([half_tr + disc, half_tr - disc], axis=-1)
    else:
        w = np.linalg.eigvalsh(rho_a)
    w = np.clip(w, 0.0, None)
    wl = np.where(w > _EIG_FLOOR, w * np.log(np.maximum(w, _EIG_FLOOR)), 0.0)
    pl = np.where(probs > _EIG_FLOOR, probs * np.log(np.maximum(probs, _EIG_FLOOR)), 0.0)
    return (-wl.sum(axis=(1, 2)) + pl.sum(axis=1)).astype(float)


def eof_upper_bounds(
    rho_hats: np.ndarray,
    dims: tuple[int, int] | None = None,
    m: int | None = None,
    restarts: int = 16,
    seed: int = 0,
    diameter_tol: float = 1e-8,
    max_iter: int = 1500,
) -> np.ndarray:
    """Formation upper bounds for a stack of dressed density matrices.

    States are grouped by rank so every group optimizes over a common
    isometry shape; restart starting points are drawn per state from
    deterministic per-state seeds, so identical (state index, seed) pairs
    share restart seeds across calls.
    """
    rho_hats = np.asarray(rho_hats, dtype=complex)
    if rho_hats.ndim == 2:
        rho_hats = rho_hats[None]
    n_states, dim = rho_hats.shape[0], rho_hats.shape[1]
    da, db = _infer_dims(dim, dims)
    out = np.empty(n_states)

    spectra = [_dressed_spectral_data(rh) for rh in rho_hats]
    ranks = np.array([_rank(w) for w, _ in spectra])
    for r in np.unique(ranks):
        members_idx = np.flatnonzero(ranks == r)
        if r == 1:
            for i in members_idx:
                w, v = spectra[i]
                out[i] = _member_entropy_sum(v[:, :1].T[None], da, db)[0]
            continue
        m_r = _default_ensemble_size(int(r), da, db) if m is None else m
        if m_r < r:
            raise RankTooLarge(f"ensemble size {m_r} below rank {r}")
        n_par = param_count(m_r, int(r))
        mix = np.stack([(np.sqrt(spectra[i][0][:r])[:, None] * spectra[i][1][:, :r].T)
                        for i in members_idx])

        def objective(x: np.ndarray, idx: np.ndarray) -> np.ndarray:
            u = build_isometries(x, m_r, int(r))
            members = u @ mix[idx // restarts]
            return _member_entropy_sum(members, da, db)

        starts = np.empty((members_idx.size * restarts, n_par))
        for j, i in enumerate(members_idx):
            rng = np.random.default_rng([seed, int(i)])
            block = rng.uniform(-np.pi, np.pi, size=(restarts, n_par))
            block[0] = 0.0  # eigen-ensemble start
            starts[j * restarts:(j + 1) * restarts] = block
        _, best = minimize_restarts(
            objective, starts, restarts, diameter_tol=diameter_tol, max_iter=max_iter
        )
        out[members_idx] = best
    return out


def optimal_decomposition(
    gdm: GeneralizedDensityMatrix,
    m: int | None = None,
    restarts: int = 16,
    seed: int = 0,
    dims: tuple[int, int] | None = None,
) -> tuple[float, DecompositionCandidate]:
    """Best found formation value together with the realizing ensemble."""
    rho_hat = dress(gdm)
    da, db = _infer_dims(gdm.dim, dims)
    w, v = _dressed_spectral_data(rho_hat)
    r = _rank(w)
    m_eff = _default_ensemble_size(r, da, db) if m is None else m
    if m_eff < r:
        raise RankTooLarge(f"ensemble size {m_eff} below rank {r}")
    mix_rows = np.sqrt(w[:r])[:, None] * v[:, :r].T
    if r == 1:
        iso = np.eye(m_eff, 1, dtype=complex)
        val = float(_member_entropy_sum(mix_rows[None], da, db)[0])
        return val, DecompositionCandidate(iso, [(1.0, v[:, 0].copy())])

    n_par = param_count(m_eff, r)

    def objective(x: np.ndarray, idx: np.ndarray) -> np.ndarray:
        return _member_entropy_sum(build_isometries(x, m_eff, r) @ mix_rows, da, db)

    rng = np.random.default_rng([seed, 0])
    starts = rng.uniform(-np.pi, np.pi, size=(restarts, n_par))
    starts[0] = 0.0
    xs, fs = minimize_restarts(objective, starts, restarts)
    iso = build_isometries(xs[0][None], m_eff, r)[0]
    members = iso @ mix_rows
    ensemble = []
    for row in members:
        p = float((row.conj() @ row).real)
        if p > _EIG_FLOOR:
            ensemble.append((p, row / math.sqrt(p)))
    return float(fs[0]), DecompositionCandidate(iso, ensemble)


def eof_optimize(
    gdm: GeneralizedDensityMatrix,
    m: int | None = None,
    restarts: int = 16,
    seed: int = 0,
    dims: tuple[int, int] | None = None,
) -> float:
    """Entanglement of formation upper bound (nats) by decomposition search.

    Restarted simplex minimization of Σ p_i·E_P over ensembles of size ``m``
    (default twice the rank, or four for two-qubit systems where four
    members are always enough).  Accuracy should be judged against
    :func:`concurrence_oracle`, never against this routine itself.
    """
    value, _ = optimal_decomposition(gdm, m=m, restarts=restarts, seed=seed, dims=dims)
    return value


# -- two-qubit closed form ---------------------------------------------------------


def concurrence(rho_hat: np.ndarray) -> float:
    """Wootters concurrence C = max(0, μ1−μ2−μ3−μ4) of a two-qubit density matrix."""
    rho_hat = np.asarray(rho_hat, dtype=complex)
    if rho_hat.shape != (4, 4):
        raise BadShape(f"need a 4x4 density matrix, got {rho_hat.shape}")
    if np.linalg.norm(rho_hat - rho_hat.conj().T) > 1e-8 or abs(np.trace(rho_hat) - 1) > 1e-8:
        raise BadShape("need a Hermitian unit-trace density matrix")
    r = rho_hat @ _SY_SY @ rho_hat.conj() @ _SY_SY
    mu = np.sqrt(np.clip(np.sort(np.linalg.eigvals(r).real)[::-1], 0.0, None))
    return float(max(0.0, mu[0] - mu[1] - mu[2] - mu[3]))


def concurrence_oracle(rho_hat: np.ndarray) -> float:
    """Closed-form two-qubit entanglement of formation (nats) from the concurrence."""
    c = concurrence(rho_hat)
    return binary_entropy(0.5 * (1.0 + math.sqrt(max(0.0, 1.0 - c * c))))
