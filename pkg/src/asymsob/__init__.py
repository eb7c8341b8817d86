"""Asymmetric anisotropic fractional Sobolev seminorms and their s -> 1 limits."""

__version__ = "0.1.0"

from ._constants import bbm_constant
from .fields import LineRestriction, ScalarField, builtin_field, grad_gauge_integral, restrict_to_line
from .geometry import (
    CombinedGauge,
    ConvexBody,
    MomentNormSpec,
    combined_gauge_eval,
    minkowski_functional,
    moment_norm,
    polar_body,
    sample_uniform,
    simplex_integral_powered_form,
)
from .limits import LimitReport, sphere_moment_crosscheck, sweep, theorem_rhs, verify_bbm_special_case, verify_proposition_1d
from .quadrature import extrapolate_limit, gauss_legendre, graded_radial_rule, mollifier_rho, power_law_radius_sample, sphere_grid
from .seminorm import (
    SeminormEstimate,
    aniso_seminorm_mc,
    aniso_seminorm_spherical,
    build_spherical_profile,
    gagliardo_1d_plus,
    mollifier_form_check,
    seminorm_minus,
)
