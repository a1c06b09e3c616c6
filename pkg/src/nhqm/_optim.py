"""Internal derivative-free optimization machinery.

Two pieces: a Givens-angle parameterization of complex isometries (complete
up to physically irrelevant column phases, with optional explicit phases for
full unitaries), and a batched Nelder-Mead simplex that advances many
independent simplices in lockstep so the objective is evaluated in large
vectorized blocks.  Everything is deterministic given the starting points.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

Objective = Callable[[np.ndarray, np.ndarray], np.ndarray]


def givens_rotation_pairs(m: int, r: int) -> list[tuple[int, int]]:
    """Row pairs of the QR-ordered Givens chain for an m×r isometry."""
    return [(c, row) for c in range(r) for row in range(c + 1, m)]


def param_count(m: int, r: int, phases: bool = False) -> int:
    """Number of real angles parameterizing the m×r isometries."""
    n = 2 * len(givens_rotation_pairs(m, r))
    return n + (r if phases else 0)


def build_isometries(params: np.ndarray, m: int, r: int, phases: bool = False) -> np.ndarray:
    """Batched isometries from Givens angles.

    ``params`` has shape (B, n) with n = :func:`param_count`.  Columns are
    orthonormal; with ``phases`` the parameterization covers every isometry,
    without it every isometry up to per-column phases.
    """
    params = np.atleast_2d(params)
    batch = params.shape[0]
    pairs = givens_rotation_pairs(m, r)
    expected = param_count(m, r, phases)
    if params.shape[1] != expected:
        raise ValueError(f"expected {expected} parameters, got {params.shape[1]}")
    q = np.zeros((batch, m, r), dtype=complex)
    if phases:
        col_phases = np.exp(1j * params[:, 2 * len(pairs):])
        q[:, np.arange(r), np.arange(r)] = col_phases
    else:
        q[:, np.arange(r), np.arange(r)] = 1.0
    # Apply rotations right-to-left so that peeling in QR order inverts them.
    for k in range(len(pairs) - 1, -1, -1):
        c, row = pairs[k]
        th = params[:, 2 * k]
        ph = params[:, 2 * k + 1]
        cth = np.cos(th)[:, None]
        sth = np.sin(th)[:, None]
        e = np.exp(1j * ph)[:, None]
        qc = q[:, c, :]
        qi = q[:, row, :]
        new_c = cth * qc + e * sth * qi
        new_i = -np.conj(e) * sth * qc + cth * qi
        q[:, c, :] = new_c
        q[:, row, :] = new_i
    return q


def isometry_to_params(v: np.ndarray, phases: bool = False) -> np.ndarray:
    """Angles that rebuild the given isometry (inverse of :func:`build_isometries`).

    Without ``phases`` the reconstruction matches up to column phases.
    """
    v = np.array(v, dtype=complex)
    m, r = v.shape
    pairs = givens_rotation_pairs(m, r)
    out = np.zeros(param_count(m, r, phases))
    w = v.copy()
    for k, (c, row) in enumerate(pairs):
        a = w[c, c]
        b = w[row, c]
        if abs(b) < 1e-300:
            th, ph = 0.0, 0.0
        elif abs(a) < 1e-300:
            th, ph = 0.5 * np.pi, 0.0
        else:
            th = np.arctan2(abs(b), abs(a))
            ph = np.angle(a) - np.angle(b) - np.pi
        cth, sth = np.cos(th), np.sin(th)
        e = np.exp(1j * ph)
        wc = w[c, :].copy()
        wi = w[row, :].copy()
        w[c, :] = cth * wc - e * sth * wi
        w[row, :] = np.conj(e) * sth * wc + cth * wi
        out[2 * k] = th
        out[2 * k + 1] = ph
    if phases:
        out[2 * len(pairs):] = np.angle(np.diagonal(w)[:r])
    return out


def nelder_mead_batch(
    fn: Objective,
    x0: np.ndarray,
    *,
    initial_scale: float = 0.5,
    diameter_tol: float = 1e-8,
    f_tol: float = 0.0,
    max_iter: int = 1500,
) -> tuple[np.ndarray, np.ndarray]:
    """Minimize ``fn`` from every row of ``x0`` with independent simplices.

    ``fn(points, idx)`` maps (K, n) points with original batch indices
    ``idx`` to (K,) values; it must be vectorized.  A simplex stops when its
    infinity-norm diameter drops below ``diameter_tol`` (or its value spread
    below ``f_tol``).  Returns the best point and value per batch element.
    """
    x0 = np.atleast_2d(np.asarray(x0, dtype=float))
    batch, n = x0.shape
    alpha, gamma, rho, sigma = 1.0, 2.0, 0.5, 0.5

    simplex = np.repeat(x0[:, None, :], n + 1, axis=1)
    for i in range(n):
        simplex[:, i + 1, i] += initial_scale
    all_idx = np.arange(batch)
    fvals = np.empty((batch, n + 1))
    for v in range(n + 1):
        fvals[:, v] = fn(simplex[:, v, :], all_idx)

    best_x = simplex[:, 0, :].copy()
    best_f = fvals[:, 0].copy()
    active = np.ones(batch, dtype=bool)

    for _ in range(max_iter):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        s = simplex[idx]
        f = fvals[idx]
        order = np.argsort(f, axis=1, kind="stable")
        f = np.take_along_axis(f, order, axis=1)
        s = np.take_along_axis(s, order[:, :, None], axis=1)

        diam = np.max(np.abs(s - s[:, :1, :]), axis=(1, 2))
        spread = f[:, -1] - f[:, 0]
        done = (diam < diameter_tol) | (spread <= f_tol)
        if np.any(done):
            sub = idx[done]
            simplex[sub] = s[done]
            fvals[sub] = f[done]
            active[sub] = False
            keep = ~done
            idx, s, f = idx[keep], s[keep], f[keep]
            if idx.size == 0:
                continue

        centroid = s[:, :-1, :].mean(axis=1)
        worst = s[:, -1, :]
        xr = centroid + alpha * (centroid - worst)
        fr = fn(xr, idx)

        expand = fr < f[:, 0]
        reflect = ~expand & (fr < f[:, -2])
        contract = ~expand & ~reflect
        outside = contract & (fr < f[:, -1])

        x2 = np.where(
            expand[:, None],
            centroid + gamma * (xr - centroid),
            np.where(
                outside[:, None],
                centroid + rho * (xr - centroid),
                centroid - rho * (centroid - worst),
            ),
        )
        need2 = expand | contract
        f2 = np.full(idx.size, np.inf)
        if np.any(need2):
            f2[need2] = fn(x2[need2], idx[need2])

        new_point = xr.copy()
        new_f = fr.copy()
        use2 = (expand & (f2 < fr)) | (outside & (f2 <= fr)) | (contract & ~outside & (f2 < f[:, -1]))
        new_point[use2] = x2[use2]
        new_f[use2] = f2[use2]

        accept = expand | reflect | (outside & (f2 <= fr)) | (contract & ~outside & (f2 < f[:, -1]))
        shrink = ~accept

        if np.any(accept):
            s[accept, -1, :] = new_point[accept]
            f[accept, -1] = new_f[accept]
        if np.any(shrink):
            rows = np.flatnonzero(shrink)
            s[rows, 1:, :] = s[rows, :1, :] + sigma * (s[rows, 1:, :] - s[rows, :1, :])
            flat = s[rows, 1:, :].reshape(-1, n)
            rep = np.repeat(idx[rows], n)
            f[rows, 1:] = fn(flat, rep).reshape(rows.size, n)

        simplex[idx] = s
        fvals[idx] = f

    order = np.argsort(fvals, axis=1, kind="stable")
    fvals = np.take_along_axis(fvals, order, axis=1)
    simplex = np.take_along_axis(simplex, order[:, :, None], axis=1)
    best_x = simplex[:, 0, :]
    best_f = fvals[:, 0]
    return best_x, best_f


def minimize_restarts(
    fn: Objective,
    starts: np.ndarray,
    group_size: int,
    **kwargs,
) -> tuple[np.ndarray, np.ndarray]:
    """Run batched Nelder-Mead and reduce over consecutive restart groups.

    ``starts`` has shape (G·group_size, n); element ``i`` belongs to group
    ``i // group_size``.  Returns per-group best points and values.
    """
    xs, fs = nelder_mead_batch(fn, starts, **kwargs)
    groups = xs.shape[0] // group_size
    fs = fs.reshape(groups, group_size)
    xs = xs.reshape(groups, group_size, -1)
    pick = np.argmin(fs, axis=1)
    return xs[np.arange(groups), pick], fs[np.arange(groups), pick]
