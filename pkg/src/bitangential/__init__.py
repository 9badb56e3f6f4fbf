"""Bitangential interpolation in generalized Schur classes on the disc and the right half-plane."""
from .blaschke import (BPFactor, BPProduct, bp_degree, bp_eval, boundary_sup, is_boundary_contractive,
                       kl_factor_left, kl_factor_right)
from .domain import Domain
from .errors import (BitangentialError, ExtractionError, NotHolomorphicError, ParseError, ShapeError,
                     SingularEquationError)
from .lft import (Parameter, VerificationReport, class_membership, excluded_check,
                  find_admissible_constant, make_parameter, no_excluded_criterion, parametrize,
                  pg_transform, regularity_checks, rouche_count, t_transform, t_transform_dual,
                  takagi_sarason_membership, verify_solution)
from .numeric import DEFAULT_TOL, Inertia, Tolerances, inertia, jacobi_eigh, solve_lyapunov_halfplane, solve_stein_disc
from .problem import DataSet, ValidationReport, nu_degenerate, np_dataset, pick_matrix_np, validate
from .rational import (RationalMVF, laurent, pole_mult_at, pole_mult_region, zero_mult_region)
from .resolvent import (AssociatedPair, PhiRows, ResolventW, associated_pair, build_w, compute_K,
                        kernel_residual, phi_rows, sep_residual, theta_phi)

__all__ = [
    "AssociatedPair", "BPFactor", "BPProduct", "BitangentialError", "DEFAULT_TOL", "DataSet", "Domain",
    "ExtractionError", "Inertia", "NotHolomorphicError", "Parameter", "ParseError", "PhiRows",
    "RationalMVF", "ResolventW", "ShapeError", "SingularEquationError", "Tolerances", "ValidationReport",
    "VerificationReport", "associated_pair", "boundary_sup", "bp_degree", "bp_eval", "build_w",
    "class_membership", "compute_K", "excluded_check", "find_admissible_constant", "inertia",
    "is_boundary_contractive", "jacobi_eigh", "kernel_residual", "kl_factor_left", "kl_factor_right",
    "laurent", "make_parameter", "no_excluded_criterion", "np_dataset", "nu_degenerate", "parametrize",
    "pg_transform", "phi_rows", "pick_matrix_np", "pole_mult_at", "pole_mult_region", "regularity_checks",
    "rouche_count", "sep_residual", "solve_lyapunov_halfplane", "solve_stein_disc", "t_transform",
    "t_transform_dual", "takagi_sarason_membership", "theta_phi", "validate", "verify_solution",
    "zero_mult_region",
]
