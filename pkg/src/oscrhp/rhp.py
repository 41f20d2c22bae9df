"""Drivers that assemble a preconditioned formulation and run GMRES on it."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .basis import DEFAULT_BETA, DEFAULT_TRUNC_TOL
from .errors import ParameterError
from .gmres import GMRESResult, LinearProblem, gmres
from .osc import OscSeries, as_frequency
from .sie import (DEFAULT_DELTA_ORDER, DEFAULT_SECH_ORDER, PRECONDITIONERS, JumpSpec, MatrixOscSeries,
                  apply_C_G, apply_LDU_operator, apply_MP_operator, build_jump, compose_fredholm,
                  fredholm_regulator, jump_residual, ldu_factor, matrix_inner, mp_factor, reconstruct_q)


def resolve_precondition(choice: str, spec: JumpSpec) -> str:
    if choice not in PRECONDITIONERS:
        raise ParameterError(f"unknown preconditioner {choice!r}; expected one of {PRECONDITIONERS}")
    if choice == "auto":
        if spec.kind != "nls" or spec.x == 0:
            return "fredholm"
        return "mp" if spec.x > 0 else "ldu"
    if choice in ("mp", "ldu") and spec.kind != "nls":
        raise ParameterError(f"{choice} preconditioning needs an NLS jump")
    return choice


@dataclass
class Formulation:
    """Operator, right-hand side, and the jump ``G - I`` that the solution satisfies."""

    name: str
    problem: LinearProblem
    jump: MatrixOscSeries


def formulate(spec: JumpSpec, precondition: str = "auto", trunc_tol: float = DEFAULT_TRUNC_TOL,
              delta_order: int = DEFAULT_DELTA_ORDER) -> Formulation:
    name = resolve_precondition(precondition, spec)
    Gm = build_jump(spec)
    if name == "none":
        problem = LinearProblem(lambda u: apply_C_G(u, Gm, trunc_tol), matrix_inner, Gm)
        return Formulation(name, problem, Gm)
    if name == "fredholm":
        Rm = fredholm_regulator(spec)
        rhs = apply_C_G(Gm, Rm, trunc_tol)
        problem = LinearProblem(lambda u: compose_fredholm(u, Gm, Rm, trunc_tol), matrix_inner, rhs)
        return Formulation(name, problem, Gm)
    if name == "mp":
        f = mp_factor(spec)
        problem = LinearProblem(lambda u: apply_MP_operator(u, f, trunc_tol), matrix_inner, f.rhs)
        return Formulation(name, problem, Gm)
    f = ldu_factor(spec, delta_order)
    problem = LinearProblem(lambda u: apply_LDU_operator(u, f, trunc_tol), matrix_inner, f.rhs)
    return Formulation(name, problem, f.conjugated_jump())


@dataclass
class SolveResult:
    u: MatrixOscSeries
    result: GMRESResult
    formulation: str
    jump: MatrixOscSeries

    @property
    def iterations(self) -> int:
        return self.result.iterations

    @property
    def residuals(self) -> list[float]:
        return self.result.residuals

    @property
    def converged(self) -> bool:
        return self.result.converged

    @property
    def n_basis(self) -> int:
        return self.u.nnz

    @property
    def q(self) -> complex:
        return reconstruct_q(self.u)

    def jump_residual(self, x) -> float:
        return jump_residual(self.u, self.jump, x)


def solve(spec: JumpSpec, precondition: str = "auto", tol: float = 1e-8, max_iter: int = 200,
          trunc_tol: float = DEFAULT_TRUNC_TOL, delta_order: int = DEFAULT_DELTA_ORDER,
          callback=None) -> SolveResult:
    form = formulate(spec, precondition, trunc_tol, delta_order)
    res = gmres(form.problem, tol=tol, max_iter=max_iter, trunc_tol=trunc_tol, callback=callback)
    return SolveResult(res.solution, res, form.name, form.jump)


def solve_scalar(precondition: str = "fredholm", n: int = DEFAULT_SECH_ORDER, beta: float = DEFAULT_BETA,
                 **kwargs) -> SolveResult:
    """The sech problem ``Phi+ = Phi- (1 + sech x)``."""
    return solve(JumpSpec("scalar-sech", n=n, beta=beta), precondition, **kwargs)


def solve_nls(rho, x=0, t: float = 0.0, precondition: str = "auto", **kwargs) -> SolveResult:
    """NLS inverse scattering at ``(x, t)``; ``rho`` must already include ``exp(4 i z^2 t)``."""
    if not isinstance(rho, OscSeries):
        rho = OscSeries.from_series(rho)
    return solve(JumpSpec("nls", rho=rho, x=as_frequency(x), t=t), precondition, **kwargs)


def small_time_rho(rho, t: float, n: int, beta: float = DEFAULT_BETA):
    """Expand ``rho(z) exp(4 i z^2 t)`` for small ``t`` (``rho`` callable or series)."""
    from .basis import expand_fft
    from .osc import eval_osc

    f = rho if callable(rho) and not isinstance(rho, OscSeries) else (lambda z: eval_osc(rho, z))
    return OscSeries.from_series(expand_fft(lambda z: f(z) * np.exp(4j * z ** 2 * t), n, beta,
                                            at_infinity=0.0))


def sweep_nls(rho, xs, t: float = 0.0, precondition: str = "auto", **kwargs) -> list[dict]:
    """Solve at each ``x``; rows carry ``x, q, iterations, n_basis, converged``."""
    rows = []
    for x in xs:
        r = solve_nls(rho, as_frequency(x), t, precondition, **kwargs)
        rows.append({"x": float(Fraction(as_frequency(x))), "q": r.q, "iterations": r.iterations,
                     "n_basis": r.n_basis, "converged": r.converged, "formulation": r.formulation})
    return rows
