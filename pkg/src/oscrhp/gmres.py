"""GMRES over an abstract inner-product space.

Elements only need ``+``, ``-``, multiplication by a complex scalar and, optionally, a
``truncate(tol)`` method.  The inner product is supplied by the caller, so the same code
drives scalar series, oscillatory series and matrices of them.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .errors import ParameterError

logger = logging.getLogger(__name__)

BREAKDOWN_TOL = 1e-14
_REORTH_TRIGGER = 1 / math.sqrt(2)


@dataclass
class LinearProblem:
    apply: Callable[[Any], Any]
    inner: Callable[[Any, Any], complex]
    rhs: Any

    def norm(self, v) -> float:
        return math.sqrt(max(self.inner(v, v).real, 0.0))


@dataclass
class KrylovState:
    """Workspace of one GMRES run.

    ``hessenberg[k]`` holds column ``k`` of the (k+2)-row Hessenberg matrix as computed by
    Arnoldi; ``rotated[k]`` is the same column after the Givens rotations.
    """

    rhs_norm: float
    basis: list = field(default_factory=list)
    hessenberg: list[np.ndarray] = field(default_factory=list)
    rotated: list[np.ndarray] = field(default_factory=list)
    givens: list[tuple[float, complex]] = field(default_factory=list)
    g: list[complex] = field(default_factory=list)
    residuals: list[float] = field(default_factory=list)
    breakdown: bool = False

    @property
    def size(self) -> int:
        return len(self.hessenberg)


def _truncate(v, tol: float):
    if tol > 0 and hasattr(v, "truncate"):
        return v.truncate(tol)
    return v


def start(problem: LinearProblem) -> KrylovState:
    beta = problem.norm(problem.rhs)
    if beta == 0:
        raise ParameterError("right-hand side must be nonzero")
    state = KrylovState(rhs_norm=beta)
    state.basis.append(problem.rhs * (1 / beta))
    state.g.append(complex(beta))
    state.residuals.append(1.0)
    return state


def arnoldi_step(state: KrylovState, problem: LinearProblem, trunc_tol: float = 0.0) -> KrylovState:
    """Extend the Krylov basis by one orthonormal element.

    Modified Gram-Schmidt with a second pass when the norm drops by more than a factor
    ``sqrt(2)``.  The operator output is truncated before orthogonalization.
    """
    k = state.size
    w = _truncate(problem.apply(state.basis[k]), trunc_tol)
    h = np.zeros(k + 2, dtype=complex)
    before = problem.norm(w)
    for i, q in enumerate(state.basis):
        hij = problem.inner(w, q)
        h[i] += hij
        w = w - q * hij
    after = problem.norm(w)
    if after < _REORTH_TRIGGER * before:
        for i, q in enumerate(state.basis):
            hij = problem.inner(w, q)
            h[i] += hij
            w = w - q * hij
        after = problem.norm(w)
    h[k + 1] = after
    state.hessenberg.append(h)
    if after <= BREAKDOWN_TOL * max(before, 1.0):
        state.breakdown = True
        state.basis.append(None)
    else:
        state.basis.append(w * (1 / after))
    return state


def _rotation(a: complex, b: float) -> tuple[float, complex]:
    r = math.hypot(abs(a), abs(b))
    if r == 0:
        return 1.0, 0j
    if a == 0:
        return 0.0, 1 + 0j
    return abs(a) / r, (a / abs(a)) * np.conj(b) / r


def givens_update(state: KrylovState) -> float:
    """Rotate the newest Hessenberg column; return the relative least-squares residual."""
    k = state.size - 1
    col = state.hessenberg[k].copy()
    for i, (c, s) in enumerate(state.givens):
        a, b = col[i], col[i + 1]
        col[i] = c * a + s * b
        col[i + 1] = -np.conj(s) * a + c * b
    c, s = _rotation(col[k], col[k + 1].real)
    a, b = col[k], col[k + 1]
    col[k] = c * a + s * b
    col[k + 1] = 0
    state.givens.append((c, s))
    state.rotated.append(col)
    gk = state.g[k]
    state.g[k] = c * gk
    state.g.append(-np.conj(s) * gk)
    res = float(abs(state.g[k + 1]) / state.rhs_norm)
    state.residuals.append(res)
    return res


def solution(state: KrylovState):
    """``x_n = Q_n y`` with ``y`` from back substitution on the rotated system."""
    n = state.size
    if n == 0:
        return state.basis[0] * 0
    R = np.zeros((n, n), dtype=complex)
    for k, col in enumerate(state.rotated):
        R[:k + 1, k] = col[:k + 1]
    y = np.zeros(n, dtype=complex)
    g = np.asarray(state.g[:n])
    for i in range(n - 1, -1, -1):
        y[i] = (g[i] - R[i, i + 1:] @ y[i + 1:]) / R[i, i]
    x = state.basis[0] * complex(y[0])
    for i in range(1, n):
        x = x + state.basis[i] * complex(y[i])
    return x


@dataclass
class GMRESResult:
    solution: Any
    residuals: list[float]
    converged: bool
    breakdown: bool
    state: KrylovState

    @property
    def iterations(self) -> int:
        return len(self.residuals) - 1

    def __iter__(self):
        yield self.solution
        yield self.residuals

    def log_lines(self) -> list[str]:
        """Convergence log, one ``iter,residual`` line per iteration (header first)."""
        return ["iter,residual"] + [f"{i},{float(r)!r}" for i, r in enumerate(self.residuals)]


def gmres(problem: LinearProblem, tol: float = 1e-8, max_iter: int = 200, trunc_tol: float = 1e-12,
          callback: Callable[[int, float, KrylovState], None] | None = None) -> GMRESResult:
    """Minimize ``||A x - f||`` over growing Krylov spaces until the relative residual <= tol."""
    if not tol > trunc_tol:
        raise ParameterError(f"tol ({tol:g}) must exceed trunc_tol ({trunc_tol:g})")
    if max_iter < 1:
        raise ParameterError("max_iter must be >= 1")
    state = start(problem)
    converged = False
    for it in range(1, max_iter + 1):
        arnoldi_step(state, problem, trunc_tol)
        res = givens_update(state)
        logger.debug("gmres iter %d residual %.3e", it, res)
        if callback is not None:
            callback(it, res, state)
        if res <= tol:
            converged = True
            break
        if state.breakdown:
            # invariant subspace reached; accept only if the residual is close to target
            converged = res <= 10 * tol
            if not converged:
                logger.warning("gmres stagnated at residual %.3e after breakdown", res)
            break
    return GMRESResult(solution(state), list(state.residuals), converged, state.breakdown, state)


def true_residual(problem: LinearProblem, x, trunc_tol: float = 0.0) -> float:
    """``||A x - f|| / ||f||`` recomputed from scratch."""
    r = _truncate(problem.apply(x), trunc_tol) - problem.rhs
    return problem.norm(r) / problem.norm(problem.rhs)
