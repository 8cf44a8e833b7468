"""Half-space geometric last passage percolation: Monte Carlo simulation, exact
Pfaffian correlation kernels, and their Airy-type scaling limits."""

__version__ = "0.1.0"

from .model import (ModelParams, WeightMatrix, LambdaProfile, RescaledEnsemble,
                    derive_parameters, sample_weights, g1, gk_bruteforce,
                    greene_shape, lambda_profile, rescale)
from .scaling import ScalingConstants, SGFunctions, SpikeFactor, scaling_constants
from .schur import (SchurWeightContext, interlaces, skew_schur, tau,
                    process_weight, enumerate_law)
from .contours import (Contour, Line, Arc, QuadratureSpec, circle, keyhole, ray,
                       integrate, winding_number, prelimit_contours)
from .kernels import (KernelContext, PrelimitContext, kgeo, kgeo_block,
                      prelimit_kernel, airy_wanderer, extended_airy_oracle,
                      limit_rhs, gaussian_r_limit, gaussian_r_quadrature)
from .pfaffian import PfaffianOperator, pfaffian, correlation, gap_probability
from .tw import EmpiricalDistribution, TwTable, f2, tw_gue, ks_distance
from .checks import converge_check, verify_descent, verify_descent_grid

__all__ = [
    "ModelParams", "WeightMatrix", "LambdaProfile", "RescaledEnsemble",
    "derive_parameters", "sample_weights", "g1", "gk_bruteforce",
    "greene_shape", "lambda_profile", "rescale",
    "ScalingConstants", "SGFunctions", "SpikeFactor", "scaling_constants",
    "SchurWeightContext", "interlaces", "skew_schur", "tau", "process_weight",
    "enumerate_law",
    "Contour", "Line", "Arc", "QuadratureSpec", "circle", "keyhole", "ray",
    "integrate", "winding_number", "prelimit_contours",
    "KernelContext", "PrelimitContext", "kgeo", "kgeo_block", "prelimit_kernel",
    "airy_wanderer", "extended_airy_oracle", "limit_rhs", "gaussian_r_limit",
    "gaussian_r_quadrature",
    "PfaffianOperator", "pfaffian", "correlation", "gap_probability",
    "EmpiricalDistribution", "TwTable", "f2", "tw_gue", "ks_distance",
    "converge_check", "verify_descent", "verify_descent_grid",
]
