"""Executable verification suites for the six quantum-information no-go theorems.

Impossibility statements are verified numerically, not proved: optimization
floors for cloning, algebraic-identity residuals for deleting, Monte-Carlo
residuals for signaling and the entanglement laws, and a dressed-frame
Helstrom ceiling for discrimination.  Negative controls with deliberately
undressed operators are first-class outputs: they reproduce the apparent
violations that motivate the dressed formalism and demonstrate the fix.

Every report is reproducible bit-for-bit from its seed at a fixed step size.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._optim import (
    build_isometries,
    isometry_to_params,
    minimize_restarts,
    nelder_mead_batch,
    param_count,
)
from .density import GeneralizedDensityMatrix, dress, partial_trace
from .dynamics import inner
from .entanglement import entropy_pure, eof_upper_bounds
from .errors import OrthogonalInput
from .hamiltonian import HamiltonianModel, PTParams, PTQubit, dim_of
from .linalg import frobenius, hpd_inv_sqrt, hpd_sqrt
from .metric import solve_metric
from .operators import dress_measurement_set, dress_operator, dress_unitary
from .sampling import (
    rand_gdm,
    rand_hpd,
    rand_kraus_set,
    rand_unitary,
    rng_from,
)

__all__ = [
    "NoGoReport",
    "CloneSearchReport",
    "DeletionScalingReport",
    "check_no_signaling",
    "check_entanglement_invariance",
    "check_no_increase",
    "search_cloner",
    "check_deleting_scaling",
    "check_discrimination",
    "ALL_THEOREMS",
    "run_verification_suite",
]


@dataclass
class NoGoReport:
    """Pass/fail verdict with the worst residual of a no-go verification run."""

    theorem: str
    trials: int
    max_residual: float
    verdict: str
    seed: int
    tolerance: float
    controls: list[dict] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"

    def to_json(self) -> dict:
        return {
            "theorem": self.theorem,
            "trials": self.trials,
            "max_residual": self.max_residual,
            "verdict": self.verdict,
            "seed": self.seed,
            "tolerance": self.tolerance,
            "controls": self.controls,
        }


def _verdict(max_residual: float, tol: float, extra_ok: bool = True) -> str:
    return "pass" if (max_residual <= tol and extra_ok) else "fail"


def _apply_operations(
    gdm: GeneralizedDensityMatrix, ops: list[np.ndarray]
) -> GeneralizedDensityMatrix:
    """Post-operation state Σ_j M_j·ρ·G^{-1}·M_j†·G (no post-selection)."""
    bare = gdm.bare()
    out = sum(m @ bare @ m.conj().T for m in ops)
    return GeneralizedDensityMatrix(out @ gdm.metric, gdm.metric, None)


# -- no-signaling ---------------------------------------------------------------


def check_no_signaling(
    h_a: HamiltonianModel,
    h_b: HamiltonianModel,
    *,
    members: int = 3,
    kraus_ops: int = 2,
    trials: int = 1000,
    seed: int = 0,
    step: float = 1e-2,
    t_max: float = 1.0,
    tol: float = 1e-10,
    control_trials: int = 50,
    metric_spread: float = 2.5,
) -> NoGoReport:
    """Local measurements on A leave the reduced state of B unchanged.

    Metrics for both subsystems are integrated from seeded random initial
    values along their Hamiltonians; each trial draws a composite state and a
    dressed measurement set on A at a random instant and compares the reduced
    state of B before and after.  The undressed negative control violates the
    completeness identity and is reported as a demonstration, flagged as
    not-a-violation.
    """
    rng = rng_from(seed)
    da, db = dim_of(h_a), dim_of(h_b)
    traj_a = solve_metric(h_a, rand_hpd(rng, da, metric_spread), 0.0, t_max, step)
    traj_b = solve_metric(h_b, rand_hpd(rng, db, metric_spread), 0.0, t_max, step)
    eye_b = np.eye(db)

    def trial_residual(dressed_frame: bool) -> float:
        t = rng.uniform(0.0, t_max)
        g_a, g_b = traj_a.at(t), traj_b.at(t)
        gdm = rand_gdm(rng, np.kron(g_a, g_b), members)
        ks = rand_kraus_set(rng, da, kraus_ops)
        if dressed_frame:
            mats = [m.matrix for m in dress_measurement_set(ks, g_a)]
        else:
            mats = ks
        after = _apply_operations(gdm, [np.kron(m, eye_b) for m in mats])
        rb_before = partial_trace(gdm, g_a, g_b, over="A").rho
        rb_after = partial_trace(after, g_a, g_b, over="A").rho
        return frobenius(rb_after - rb_before)

    worst = max(trial_residual(True) for _ in range(trials))
    controls = []
    if control_trials > 0:
        worst_ctl = max(trial_residual(False) for _ in range(control_trials))
        controls.append(
            {
                "label": "undressed_measurement",
                "max_residual": worst_ctl,
                "not_a_violation": True,
                "demonstrates": "apparent violation from conventional operators",
            }
        )
    return NoGoReport(
        "no_signaling", trials, float(worst), _verdict(worst, tol), seed, tol, controls
    )


# -- entanglement invariance under local generalized unitaries ---------------------


def _random_local_dressed_unitary(
    rng: np.random.Generator, g_a: np.ndarray, g_b: np.ndarray
) -> np.ndarray:
    """Either U_A ⊗ 1_B or 1_A ⊗ U_B with a dressed Haar factor."""
    on_a = bool(rng.integers(0, 2))
    if on_a:
        u = dress_unitary(rand_unitary(rng, g_a.shape[0]), g_a).matrix
        return np.kron(u, np.eye(g_b.shape[0]))
    u = dress_unitary(rand_unitary(rng, g_b.shape[0]), g_b).matrix
    return np.kron(np.eye(g_a.shape[0]), u)


def check_entanglement_invariance(
    trials: int = 100,
    seed: int = 0,
    *,
    restarts: int = 16,
    tol_mixed: float = 1e-4,
    tol_pure: float = 1e-8,
    metric_spread: float = 2.0,
) -> NoGoReport:
    """Entanglement is invariant under local generalized unitaries.

    Pure states are checked through the entanglement entropy (tolerance
    ``tol_pure``); mixed two-qubit states through the formation optimizer
    with shared restart seeds (tolerance ``tol_mixed``, optimizer-limited).
    """
    rng = rng_from(seed)
    pure_worst = 0.0
    for _ in range(trials):
        g_a, g_b = rand_hpd(rng, 2, metric_spread), rand_hpd(rng, 2, metric_spread)
        g = np.kron(g_a, g_b)
        psi = rand_gdm(rng, g, 1).weights[0][1]
        u = _random_local_dressed_unitary(rng, g_a, g_b)
        res = abs(entropy_pure(psi, g_a, g_b) - entropy_pure(u @ psi, g_a, g_b))
        pure_worst = max(pure_worst, res)

    before, after = [], []
    for _ in range(trials):
        g_a, g_b = rand_hpd(rng, 2, metric_spread), rand_hpd(rng, 2, metric_spread)
        g = np.kron(g_a, g_b)
        gdm = rand_gdm(rng, g, 2)
        u = _random_local_dressed_unitary(rng, g_a, g_b)
        rotated = GeneralizedDensityMatrix(u @ gdm.rho @ np.linalg.inv(u), g, None)
        before.append(dress(gdm))
        after.append(dress(rotated))
    e_before = eof_upper_bounds(np.stack(before), dims=(2, 2), restarts=restarts, seed=seed)
    e_after = eof_upper_bounds(np.stack(after), dims=(2, 2), restarts=restarts, seed=seed)
    mixed_worst = float(np.max(np.abs(e_after - e_before)))

    controls = [
        {
            "label": "pure_states",
            "max_residual": pure_worst,
            "tolerance": tol_pure,
            "passed": pure_worst <= tol_pure,
        }
    ]
    return NoGoReport(
        "entanglement_invariance",
        2 * trials,
        mixed_worst,
        _verdict(mixed_worst, tol_mixed, extra_ok=pure_worst <= tol_pure),
        seed,
        tol_mixed,
        controls,
    )


# -- no increase of entanglement under local operations ---------------------------


def check_no_increase(
    trials: int = 100,
    seed: int = 0,
    *,
    restarts: int = 16,
    kraus_ops: int = 2,
    tol: float = 1e-4,
    metric_spread: float = 2.0,
) -> NoGoReport:
    """Local dressed measurements on B cannot increase the formation value."""
    rng = rng_from(seed)
    before, after = [], []
    for _ in range(trials):
        g_a, g_b = rand_hpd(rng, 2, metric_spread), rand_hpd(rng, 2, metric_spread)
        g = np.kron(g_a, g_b)
        gdm = rand_gdm(rng, g, 2)
        ks = rand_kraus_set(rng, 2, kraus_ops)
        mats = [np.kron(np.eye(2), m.matrix) for m in dress_measurement_set(ks, g_b)]
        before.append(dress(gdm))
        after.append(dress(_apply_operations(gdm, mats)))
    e_before = eof_upper_bounds(np.stack(before), dims=(2, 2), restarts=restarts, seed=seed)
    e_after = eof_upper_bounds(np.stack(after), dims=(2, 2), restarts=restarts, seed=seed)
    worst = float(np.max(e_after - e_before))
    return NoGoReport(
        "no_entanglement_increase", trials, worst, _verdict(worst, tol), seed, tol
    )


# -- no-cloning ---------------------------------------------------------------------


@dataclass
class CloneSearchReport:
    """Residual floor of a generalized-unitary cloning search."""

    best_residual: float
    residuals: np.ndarray
    cloner: np.ndarray
    pairwise_overlaps: list[float]
    restarts: int
    seed: int


def search_cloner(
    states: list[np.ndarray],
    g1: np.ndarray,
    g2: np.ndarray,
    *,
    blank: np.ndarray | None = None,
    restarts: int = 64,
    seed: int = 0,
    max_iter: int = 4000,
) -> CloneSearchReport:
    """Minimize Σ_k ‖C(ψ_k ⊗ E) − phase-optimal ψ_k ⊗ ψ_k‖²_G over generalized
    unitaries C.

    The search runs in the dressed frame (where generalized unitaries are
    exactly the conventional ones) over a Givens-angle parameterization, with
    one restart seeded from the best-alignment Procrustes unitary.  For
    pairwise non-orthogonal, non-parallel state sets the floor stays strictly
    positive; for orthogonal sets a near-perfect cloner exists.
    """
    if g1.shape != g2.shape:
        raise ValueError("both slots must have the same dimension")
    d1 = g1.shape[0]
    s1, s2 = hpd_sqrt(g1), hpd_sqrt(g2)
    if blank is None:
        blank = np.zeros(d1, dtype=complex)
        blank[0] = 1.0
    blank = np.asarray(blank, dtype=complex).reshape(-1)
    e_hat = s2 @ blank
    e_hat = e_hat / np.linalg.norm(e_hat)

    inputs, targets = [], []
    for psi in states:
        v = np.asarray(psi, dtype=complex).reshape(-1)
        v1 = s1 @ v
        v1 = v1 / np.linalg.norm(v1)
        v2 = s2 @ v
        v2 = v2 / np.linalg.norm(v2)
        inputs.append(np.kron(v1, e_hat))
        targets.append(np.kron(v1, v2))
    inp = np.stack(inputs)
    tgt = np.stack(targets)
    overlaps = [
        float(abs(inner(states[i], states[j], g1)
                  / np.sqrt(inner(states[i], states[i], g1).real
                            * inner(states[j], states[j], g1).real)))
        for i in range(len(states))
        for j in range(i + 1, len(states))
    ]

    d = d1 * d1
    n_par = param_count(d, d, phases=True)

    def objective(x: np.ndarray, idx: np.ndarray) -> np.ndarray:
        u = build_isometries(x, d, d, phases=True)
        moved = np.einsum("kde,se->kds", u, inp)
        norms = np.einsum("kds,kds->ks", moved.conj(), moved).real
        ov = np.abs(np.einsum("sd,kds->ks", tgt.conj(), moved))
        return (norms + 1.0 - 2.0 * ov).sum(axis=1)

    # Best-alignment seed: the unitary closest to mapping inputs onto targets.
    align = tgt.T @ inp.conj()
    uu, _, vv = np.linalg.svd(align)
    rng = rng_from(seed)
    starts = rng.uniform(-np.pi, np.pi, size=(restarts, n_par))
    starts[0] = isometry_to_params(uu @ vv, phases=True)
    xs, fs = nelder_mead_batch(objective, starts, max_iter=max_iter)

    best = int(np.argmin(fs))
    best_u = build_isometries(xs[best][None], d, d, phases=True)[0]
    cloner = dress_operator(best_u, np.kron(g1, g2))
    return CloneSearchReport(
        float(fs[best]), np.sort(fs.astype(float)), cloner, overlaps, restarts, seed
    )


# -- no-deleting ---------------------------------------------------------------------


@dataclass
class DeletionScalingReport:
    """Consistency of a candidate deleter with the rescaling identity.

    A linear map deleting duplicates of every state must satisfy
    a|a|²·⟨ψ,E|D|ψ,ψ⟩ = |a|²·⟨ψ,E|D|ψ,ψ⟩ for all scalars a, which fails for
    generic a unless the blank state is degenerate or the map merely swaps
    the duplicate out (a quantum swapping operator, not a deleter).
    """

    lhs: complex
    rhs: complex
    scaling_residual: float
    blank_norm: float
    swap_distance: float
    deletion_defect: float
    branch: str


def check_deleting_scaling(
    dmap: np.ndarray,
    psi: np.ndarray,
    blank: np.ndarray,
    a: complex,
    g1: np.ndarray,
    g2: np.ndarray | None = None,
    *,
    tol: float = 1e-10,
) -> DeletionScalingReport:
    """Evaluate both sides of the deletion rescaling identity for a given map."""
    if g2 is None:
        g2 = g1
    d = g1.shape[0]
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    psi = psi / np.sqrt((psi.conj() @ g1 @ psi).real)
    blank = np.asarray(blank, dtype=complex).reshape(-1)
    g = np.kron(g1, g2)

    pair_in = np.kron(psi, psi)
    probe = np.kron(psi, blank)
    contracted = complex(probe.conj() @ g @ dmap @ pair_in)
    a = complex(a)
    lhs = a * abs(a) ** 2 * contracted
    rhs = abs(a) ** 2 * contracted
    residual = abs(lhs - rhs)

    blank_norm = float((blank.conj() @ g2 @ blank).real)
    swap = np.zeros((d * d, d * d), dtype=complex)
    for i in range(d):
        for j in range(d):
            swap[i * d + j, j * d + i] = 1.0
    coeff = np.trace(swap.conj().T @ dmap) / (d * d)
    swap_distance = float(
        np.linalg.norm(dmap - coeff * swap) / max(np.linalg.norm(dmap), 1e-300)
    )
    defect_vec = dmap @ pair_in - probe
    deletion_defect = float(np.sqrt(abs(defect_vec.conj() @ g @ defect_vec)))

    if swap_distance <= tol:
        branch = "swap_like"
    elif blank_norm <= tol:
        branch = "degenerate_blank"
    elif residual > tol:
        branch = "scaling_violated"
    else:
        branch = "consistent"
    return DeletionScalingReport(
        lhs, rhs, residual, blank_norm, swap_distance, deletion_defect, branch
    )


# -- no perfect discrimination -------------------------------------------------------


def check_discrimination(
    states: tuple[np.ndarray, np.ndarray],
    g: np.ndarray,
    restarts: int = 8,
    seed: int = 0,
    *,
    tol: float = 1e-6,
    max_iter: int = 2000,
) -> NoGoReport:
    """Optimized two-outcome discrimination never beats the Helstrom ceiling.

    The ceiling ½(1 + sqrt(1 − |⟨ψ|φ⟩_G|²)) is evaluated in the dressed
    frame, where the formalism is exactly conventional quantum mechanics.
    Raises :class:`OrthogonalInput` for orthogonal pairs, which are perfectly
    distinguishable.
    """
    psi, phi = states
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    phi = np.asarray(phi, dtype=complex).reshape(-1)
    s = hpd_sqrt(g)
    psi_hat = s @ psi
    psi_hat = psi_hat / np.linalg.norm(psi_hat)
    phi_hat = s @ phi
    phi_hat = phi_hat / np.linalg.norm(phi_hat)
    overlap = float(abs(psi_hat.conj() @ phi_hat))
    if overlap <= 1e-12:
        raise OrthogonalInput("states are orthogonal; perfect discrimination is possible")
    ceiling = 0.5 * (1.0 + np.sqrt(max(0.0, 1.0 - overlap**2)))

    d = g.shape[0]
    n_rot = param_count(d, d)
    n_par = n_rot + d

    def objective(x: np.ndarray, idx: np.ndarray) -> np.ndarray:
        v = build_isometries(x[:, :n_rot], d, d)
        lam = np.sin(x[:, n_rot:]) ** 2
        e_op = (v * lam[:, None, :]) @ v.conj().transpose(0, 2, 1)
        p1 = np.einsum("i,kij,j->k", psi_hat.conj(), e_op, psi_hat).real
        p2 = 1.0 - np.einsum("i,kij,j->k", phi_hat.conj(), e_op, phi_hat).real
        return -0.5 * (p1 + p2)

    rng = rng_from(seed)
    starts = rng.uniform(-np.pi, np.pi, size=(restarts, n_par))
    _, fs = minimize_restarts(objective, starts, restarts, max_iter=max_iter)
    best_success = float(-fs[0])
    residual = best_success - float(ceiling)
    controls = [
        {"label": "helstrom", "ceiling": float(ceiling), "best_success": best_success,
         "overlap": overlap}
    ]
    return NoGoReport(
        "no_perfect_discrimination",
        restarts,
        residual,
        _verdict(residual, tol),
        seed,
        tol,
        controls,
    )


# -- canonical suite ------------------------------------------------------------------


ALL_THEOREMS = (
    "no_signaling",
    "no_cloning",
    "no_deleting",
    "no_perfect_discrimination",
    "no_entanglement_increase",
    "entanglement_invariance",
)


def _trine_states() -> list[np.ndarray]:
    """Three pairwise-overlapping qubit states with |⟨ψ_i|ψ_j⟩| = 1/2."""
    out = []
    for k in range(3):
        ang = 2.0 * np.pi * k / 3.0
        out.append(np.array([np.cos(ang / 2.0), np.sin(ang / 2.0)], dtype=complex))
    return out


def overlapping_state_set(g: np.ndarray) -> list[np.ndarray]:
    """Three states with pairwise generalized overlap |⟨ψ_i|ψ_j⟩_G| = 1/2."""
    g_isqrt = hpd_inv_sqrt(g)
    return [g_isqrt @ v for v in _trine_states()]


def _cloning_report(restarts: int, seed: int) -> NoGoReport:
    rng = rng_from(seed)
    g1 = rand_hpd(rng, 2, 2.0)
    g2 = rand_hpd(rng, 2, 2.0)
    overlapping = search_cloner(overlapping_state_set(g1), g1, g2, restarts=restarts, seed=seed)
    # Orthogonal pair in the g1 inner product.
    e0 = np.array([1.0, 0.0], dtype=complex)
    e1_raw = np.array([0.0, 1.0], dtype=complex)
    e1 = e1_raw - (inner(e0, e1_raw, g1) / inner(e0, e0, g1)) * e0
    orthogonal = search_cloner([e0, e1], g1, g2, restarts=max(8, restarts // 8), seed=seed)
    floor_ok = overlapping.best_residual >= 0.05
    controls = [
        {
            "label": "overlapping_floor",
            "residual": overlapping.best_residual,
            "threshold": 0.05,
            "passed": floor_ok,
            "pairwise_overlaps": overlapping.pairwise_overlaps,
        }
    ]
    worst = orthogonal.best_residual
    return NoGoReport(
        "no_cloning",
        restarts,
        float(worst),
        _verdict(worst, 1e-6, extra_ok=floor_ok),
        seed,
        1e-6,
        controls,
    )


def _deleting_report(seed: int) -> NoGoReport:
    rng = rng_from(seed)
    g1 = rand_hpd(rng, 2, 2.0)
    g2 = rand_hpd(rng, 2, 2.0)
    g = np.kron(g1, g2)
    psi = rand_gdm(rng, g1, 1).weights[0][1]
    blank = rand_gdm(rng, g2, 1).weights[0][1]
    d = 2
    swap = np.zeros((4, 4), dtype=complex)
    for i in range(d):
        for j in range(d):
            swap[i * d + j, j * d + i] = 1.0
    pair = np.kron(psi, psi)
    probe = np.kron(psi, blank)
    projector = np.outer(probe, pair.conj() @ g) / complex(pair.conj() @ g @ pair)
    candidates = {
        "swap": swap,
        "projector_onto_blank_pair": projector,
        "random_linear_map": (rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))),
    }
    controls = []
    violation = 0.0
    for label, dmap in candidates.items():
        rep = check_deleting_scaling(dmap, psi, blank, 2.0, g1, g2)
        allowed = rep.branch in ("swap_like", "degenerate_blank", "scaling_violated")
        if not allowed:
            violation = 1.0
        controls.append(
            {
                "label": label,
                "branch": rep.branch,
                "scaling_residual": rep.scaling_residual,
                "blank_norm": rep.blank_norm,
                "deletion_defect": rep.deletion_defect,
            }
        )
    return NoGoReport(
        "no_deleting",
        len(candidates),
        violation,
        _verdict(violation, 0.5),
        seed,
        0.5,
        controls,
    )


def _discrimination_report(trials: int, restarts: int, seed: int) -> NoGoReport:
    rng = rng_from(seed)
    worst = -np.inf
    controls = []
    for k in range(trials):
        g = rand_hpd(rng, 2, 2.0)
        psi = rand_gdm(rng, g, 1).weights[0][1]
        phi = rand_gdm(rng, g, 1).weights[0][1]
        if abs(inner(psi, phi, g)) <= 1e-6:
            continue
        rep = check_discrimination((psi, phi), g, restarts=restarts, seed=seed + k)
        worst = max(worst, rep.max_residual)
        if k == 0:
            controls = rep.controls
    return NoGoReport(
        "no_perfect_discrimination",
        trials,
        float(worst),
        _verdict(worst, 1e-6),
        seed,
        1e-6,
        controls,
    )


def run_verification_suite(
    suites: list[str] | None = None,
    *,
    trials: int | None = None,
    seed: int = 0,
    restarts: int | None = None,
) -> list[NoGoReport]:
    """Run the selected theorem suites with canonical scenarios."""
    names = list(ALL_THEOREMS) if suites is None else list(suites)
    reports = []
    for name in names:
        if name == "no_signaling":
            reports.append(
                check_no_signaling(
                    PTQubit(PTParams(1.0, 1.0, np.pi / 6)),
                    PTQubit(PTParams(1.0, 0.5, np.pi / 2)),
                    trials=trials or 200,
                    seed=seed,
                )
            )
        elif name == "no_cloning":
            reports.append(_cloning_report(restarts or 64, seed))
        elif name == "no_deleting":
            reports.append(_deleting_report(seed))
        elif name == "no_perfect_discrimination":
            reports.append(_discrimination_report(trials or 20, restarts or 8, seed))
        elif name == "no_entanglement_increase":
            reports.append(check_no_increase(trials or 50, seed, restarts=restarts or 16))
        elif name == "entanglement_invariance":
            reports.append(
                check_entanglement_invariance(trials or 50, seed, restarts=restarts or 16)
            )
        else:
            raise ValueError(f"unknown theorem suite {name!r}")
    return reports
