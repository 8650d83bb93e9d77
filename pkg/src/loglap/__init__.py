"""Numerical toolkit for the fractional logarithmic p-Laplacian: constants
and special functions, the sign-changing radial kernel with its closed-form
annulus integrals, pointwise principal-value operator evaluation, discrete
energy forms with inequality verification suites on bounded grids, and the
first Dirichlet eigenvalue by constrained Rayleigh-quotient descent.
"""

from .specfun import (
    EULER_GAMMA,
    Params,
    b_sign_threshold,
    classical_const,
    digamma,
    ln_gamma,
    log_norm_const,
    norm_const,
    sphere_measure,
)
from .kernel import (
    KernelSpec,
    annulus_integral,
    commutator_residual,
    kernel_full,
    kernel_parts,
    sign_change_radius,
)
from .operator import (
    OperatorValue,
    QuadratureSpec,
    TestFunction,
    ToleranceNotMet,
    bump,
    derivative_consistency,
    eval_frac_plap,
    eval_log_plap,
    eval_log_plap_zero,
    gaussian,
    odd_gaussian,
    phi_p,
    rescale_argument,
    small_s_limit_study,
    translate,
    zero_function,
)
from .grid import (
    GridDomain,
    GridFunction,
    TableSet,
    WeightTable,
    assemble_weights,
    build_grid,
    load_weights,
    lp_norm,
    sample_function,
    save_weights,
)
from .forms import (
    EnergyBreakdown,
    check_diaz_saa,
    check_form_bounds,
    check_hardy,
    check_poincare,
    check_sobolev_gn,
    energy,
    energy_pairing,
    pohozaev_defect,
)
from .eigen import (
    EigenConfig,
    EigenResult,
    energy_gradient,
    log_estimate_check,
    minimize_first,
    rayleigh,
    verify_eigen_properties,
)

__version__ = "0.1.0"
