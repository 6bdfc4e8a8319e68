"""Semi-Lagrangian Hamilton-Jacobi semigroups and hypercontractivity experiments."""

from .gridfn import Grid, GridFunction, lipschitz_estimate, semiconcavity_estimate
from .hopflax import analytic_affine, analytic_quadratic, hopf_lax
from .lagrangian import LagrangianModel, hamiltonian_eval, legendre
from .measure import MeasureSpec, entropy, log_lp_norm_exp, lsi_residual
from .profiles import Profile, parse_profile
from .slscheme import SchemeConfig, evolve, property_report, sl_step, trajectory

__all__ = [
    "Grid",
    "GridFunction",
    "LagrangianModel",
    "MeasureSpec",
    "Profile",
    "SchemeConfig",
    "analytic_affine",
    "analytic_quadratic",
    "entropy",
    "evolve",
    "hamiltonian_eval",
    "hopf_lax",
    "legendre",
    "lipschitz_estimate",
    "log_lp_norm_exp",
    "lsi_residual",
    "parse_profile",
    "property_report",
    "semiconcavity_estimate",
    "sl_step",
    "trajectory",
]
