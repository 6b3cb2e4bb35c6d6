"""Hamiltonian Boundary Value Methods HBVM(k, s) and their blended implementation."""

from .blended import (
    BlendedConfig,
    Mode,
    blended_solve,
    gamma_opt,
    iteration_matrix_Z,
    linear_analysis,
    max_amplification,
    residual_F,
    rho_star,
    rho_star_optimal,
)
from .errors import HbvmError
from .integrator import (
    IntegrationResult,
    advance_step,
    integrate,
    make_partition,
    observed_order,
    reversibility_check,
)
from .legendre import OrthonormalBasis, basis_eval, basis_eval_all, basis_integral, xi
from .partition import (
    StagePartition,
    build_partition,
    condition_number,
    select_fundamental,
    silent_from_fundamental,
)
from .quadrature import QuadratureRule, exactness_degree, gauss_rule, interpolatory_weights
from .systems import (
    HamiltonianSystem,
    get_problem,
    harmonic_oscillator,
    pendulum,
    pendulum_exact,
    quartic_oscillator,
    sextic_oscillator,
)
from .tableau import (
    HbvmTableau,
    SpectrumReport,
    build_tableau,
    eigenvalues,
    hbvm_tableau,
    verify_isospectral,
    x_matrix,
    xhat_matrix,
)

__version__ = "0.1.0"
