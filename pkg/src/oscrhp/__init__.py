"""Rational and oscillatory-rational bases on the real line, their Cauchy calculus, and
GMRES solution of the singular integral equations of Riemann-Hilbert problems."""

from .basis import (DEFAULT_BETA, DEFAULT_TRUNC_TOL, PVIntegral, QuadratureRule, RationalSeries, basis,
                    cauchy_minus, cauchy_offaxis, cauchy_plus, conjugate, eval_series, expand_fft,
                    expand_values, fft_nodes, inner, mobius, mobius_inv, multiply, norm, pv_integral,
                    pv_integral_forms, quad_rule)
from .errors import (ConvergenceError, DomainError, FactorizationError, FileFormatError,
                     NonDecayingInputError, OscRHPError, ParameterError, PoleError, ReflectionBoundError)
from .estimators import RationalExpansion, RHPSolver
from .gmres import GMRESResult, LinearProblem, gmres
from .osc import (OscSeries, as_frequency, cauchy_minus_osc, cauchy_plus_osc, conjugate_osc, eval_osc,
                  fourier_transform, I_integral, inner_osc, multiply_osc, norm_osc, osc_pv_integral)
from .rhp import SolveResult, formulate, small_time_rho, solve, solve_nls, solve_scalar, sweep_nls
from .sie import JumpSpec, MatrixOscSeries, evaluate_phi, jump_residual, reconstruct_q
from .special import EtaTable, eta_table, gamma_coeff

__version__ = "0.1.0"
