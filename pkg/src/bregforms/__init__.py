"""Numerical verification of nonlocal Sobolev-Bregman form identities.

The package instantiates, for the isotropic stable kernel on a ball,
the pair of identities tying the interior Bregman energy of a
harmonic extension to an exterior trace form, plus the pointwise
identity behind it, and checks them numerically: two independently
computed sides per identity, agreement within declared budgets, and
honest divergence reporting when a side is genuinely infinite.

Layers, bottom up: scalar Bregman calculus (:mod:`.divergence`),
adaptive quadrature tuned to kernel singularities
(:mod:`.quadrature`), closed kernel formulas (:mod:`.kernels`), the
integral forms themselves (:mod:`.forms`) with canned exterior data
(:mod:`.presets`), exit-distribution sampling (:mod:`.stochastic`),
grid minimization (:mod:`.variational`), and batch checking on top
(:mod:`.suites`, :mod:`.cli`, :mod:`.figures`).
"""

from .divergence import (
    RATIO_LOWER,
    RATIO_UPPER,
    bregman_fp,
    bregman_moment_check,
    comparison_constants,
    difference_quotient_ratio,
    french_power,
    regularized_fp,
    symmetrized_hp,
)
from .forms import (
    ExteriorData,
    FormValue,
    FunctionHandle,
    bilinear_form,
    douglas_remainder_verify,
    douglas_verify,
    energy_form_p,
    full_space_douglas_verify,
    hardy_stein_rhs,
    poisson_extension,
    remainder_AD,
    smooth_energy_identity,
    trace_form_p,
    w_energy_p,
    w_trace_p,
)
from .kernels import (
    AnnulusSupport,
    BallDomain,
    StableKernel,
    exit_time_closed_form,
    expected_exit_time,
    generator_apply,
    green_ball,
    interaction_kernel,
    levy_density,
    levy_tail_mass,
    poisson_ball,
    poisson_via_green,
    stable_constant,
)
from .presets import PRESETS, make_preset
from .quadrature import (
    IntegrationResult,
    QuadratureConfig,
    integrate_adaptive,
    integrate_offdiagonal_pair,
    integrate_tail,
)
from .report import VerificationReport
from .stochastic import (
    ExitSampler,
    MCEstimate,
    hardy_stein_verify,
    mc_exit_time,
    mc_exterior_expectation,
    sample_exit_position,
)
from .variational import (
    DiscreteProblem,
    GridFunction,
    MinimizeResult,
    QuasiminimizerResult,
    discrete_energy,
    discrete_w_form,
    discretize,
    discretized_extension,
    minimize_energy,
    nonminimizer_search,
    quasiminimizer_bound,
    quasiminimizer_ratio,
    refinement_divergence_check,
)

__version__ = "0.1.0"

__all__ = [
    "AnnulusSupport",
    "BallDomain",
    "DiscreteProblem",
    "ExitSampler",
    "ExteriorData",
    "FormValue",
    "FunctionHandle",
    "GridFunction",
    "IntegrationResult",
    "MCEstimate",
    "MinimizeResult",
    "PRESETS",
    "QuadratureConfig",
    "QuasiminimizerResult",
    "RATIO_LOWER",
    "RATIO_UPPER",
    "StableKernel",
    "VerificationReport",
    "bilinear_form",
    "bregman_fp",
    "bregman_moment_check",
    "comparison_constants",
    "difference_quotient_ratio",
    "discrete_energy",
    "discrete_w_form",
    "discretize",
    "discretized_extension",
    "douglas_remainder_verify",
    "douglas_verify",
    "energy_form_p",
    "exit_time_closed_form",
    "expected_exit_time",
    "french_power",
    "full_space_douglas_verify",
    "generator_apply",
    "green_ball",
    "hardy_stein_rhs",
    "hardy_stein_verify",
    "integrate_adaptive",
    "integrate_offdiagonal_pair",
    "integrate_tail",
    "interaction_kernel",
    "levy_density",
    "levy_tail_mass",
    "make_preset",
    "mc_exit_time",
    "mc_exterior_expectation",
    "minimize_energy",
    "nonminimizer_search",
    "poisson_ball",
    "poisson_extension",
    "poisson_via_green",
    "quasiminimizer_bound",
    "quasiminimizer_ratio",
    "refinement_divergence_check",
    "regularized_fp",
    "remainder_AD",
    "sample_exit_position",
    "smooth_energy_identity",
    "stable_constant",
    "symmetrized_hp",
    "trace_form_p",
    "w_energy_p",
    "w_trace_p",
    "__version__",
]
