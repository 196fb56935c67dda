"""Exact sharp augmented Lagrangian relaxations, value functions and penalty thresholds for small mixed-integer programs."""
from .errors import (ArgumentError, InstanceError, InvalidRho, ResourceLimit, SharpAldError,
                     TheoremHypothesisViolated, Unconverged, Undecidable, Unsupported)
from .exactnum import Rational, denom, lcm_list, sqrt_upper
from .model import ProblemInstance, check_recession_condition, make_instance, to_standard_form, validate
from .lpsolve import solve_lp
from .cvxsub import solve_qp, solve_smooth
from .mipsolve import solve_alr, solve_mip, solve_salr
from .valuefn import build_grid, phi, salr_oracle, u_radius
from .penalty import micp_gamma, milp_constants, miqp_constants, picp_constants, picp_rho
from .saldual import ald_ascent, asymptotic_experiment, bisect_threshold, certify, rho_sweep

__all__ = [
    "ArgumentError", "InstanceError", "InvalidRho", "ResourceLimit", "SharpAldError", "TheoremHypothesisViolated",
    "Unconverged", "Undecidable", "Unsupported", "Rational", "denom", "lcm_list", "sqrt_upper",
    "ProblemInstance", "check_recession_condition", "make_instance", "to_standard_form", "validate", "solve_lp",
    "solve_qp", "solve_smooth", "solve_alr", "solve_mip", "solve_salr", "build_grid", "phi", "salr_oracle",
    "u_radius", "micp_gamma", "milp_constants", "miqp_constants", "picp_constants", "picp_rho", "ald_ascent",
    "asymptotic_experiment", "bisect_threshold", "certify", "rho_sweep",
]
