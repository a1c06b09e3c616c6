"""Finite-dimensional non-Hermitian quantum mechanics.

Time-dependent Hilbert-space metrics, generalized operator algebra,
generalized density matrices, entanglement measures, and numerical
verification of the quantum-information no-go theorems.
"""

from .density import (
    GeneralizedDensityMatrix,
    dress,
    expectation,
    g_orthonormal_basis,
    gdm_from_conventional,
    gdm_from_ensemble,
    generalized_trace,
    partial_trace,
)
from .dynamics import (
    evolve_gdm,
    evolve_normalized_density,
    gnorm,
    inner,
    propagate_state,
)
from .entanglement import (
    concurrence,
    concurrence_oracle,
    entropy_pure,
    eof_optimize,
)
from .hamiltonian import (
    Constant,
    DecayMode,
    PTParams,
    PTQubit,
    PTRegime,
    TimeDependent,
    classify_regime,
    materialize,
    pt_eigenvalues,
)
from .linalg import expm, hpd_sqrt, integrate_matrix_ode
from .metric import (
    check_metric,
    metric_from_basis,
    metric_rhs,
    propagate_transition,
    solve_metric,
    stationary_metric,
)
from .nogo import (
    NoGoReport,
    check_deleting_scaling,
    check_discrimination,
    check_entanglement_invariance,
    check_no_increase,
    check_no_signaling,
    run_verification_suite,
    search_cloner,
)
from .operators import (
    dress_measurement_set,
    dress_operator,
    dress_unitary,
    is_self_adjoint,
    sharp_adjoint,
)

__version__ = "0.1.0"
