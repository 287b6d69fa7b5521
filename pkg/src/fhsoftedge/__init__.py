"""Soft-edge asymptotics for Gaussian weights with a root-and-jump singularity.

Orthogonal polynomials and Hankel determinants for
``exp(-x^2) |x - mu|^(2 alpha)`` with a jump of size ``omega`` at ``mu``,
the Painleve connection problems governing their soft-edge limits, the
limiting correlation kernel and the associated distribution functions.
"""

__version__ = "0.1.0"

from .errors import BreakdownError, FHError, PrecisionError, SolverError, ValidationError
from .weight_quad import WeightSpec, build_quadrature, evaluate_weight, moment
from .orthopoly import (RecurrenceTable, ScalingReport, double_scaling_mu, evaluate_orthonormal, hankel_det_ratio,
                        hankel_logderiv, hankel_scaling_report, recurrence_scaling_report, sigma_iv_residual,
                        stieltjes_recurrence)
from .painleve import (PainleveParams, SigmaSolution, p34_from_sigma, sigma_tail_minus, sigma_tail_plus,
                       solve_pii_airy, solve_pii_alpha, solve_sigma, special_functions)
from .kernel import (KernelGrid, PsiSolution, airy_kernel, finite_n_kernel, kernel_scaling_report, psi_kernel,
                     psi_kernel_grid, psi_solve)
from .distributions import finite_n_cdf, thinned_conditioned_cdf, tracy_widom_cdf

__all__ = [name for name in dir() if not name.startswith("_")]
