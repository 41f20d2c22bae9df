"""scikit-learn style wrappers around the expansion and the Riemann-Hilbert solver."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from .basis import (DEFAULT_BETA, DEFAULT_TRUNC_TOL, EXPAND_DROP_TOL, RationalSeries, cauchy_offaxis,
                    eval_series, expand_fft, pv_integral)
from .errors import ParameterError
from .osc import OscSeries, fourier_transform
from .rhp import solve
from .sie import DEFAULT_DELTA_ORDER, JumpSpec, evaluate_phi
from .validation import check_beta, check_order, check_points, check_tolerances


class RationalExpansion(BaseEstimator):
    """Expand a decaying function on the real line in the rational basis ``R_j``.

    ``fit`` takes a callable; ``predict`` evaluates the expansion; ``transform`` returns
    the basis design matrix ``R_j(x)`` for the fitted index range.

    >>> import numpy as np
    >>> est = RationalExpansion(n=80).fit(lambda x: np.exp(-x**2))
    >>> abs(est.integrate() - np.sqrt(np.pi)) < 1e-10
    True
    """

    def __init__(self, n: int = 160, beta: float = DEFAULT_BETA, drop_tol: float = EXPAND_DROP_TOL,
                 at_infinity: float | None = None):
        self.n = n
        self.beta = beta
        self.drop_tol = drop_tol
        self.at_infinity = at_infinity

    def fit(self, f, y=None):
        if not callable(f):
            raise ParameterError("fit expects a callable f(x)")
        n = check_order(self.n)
        beta = check_beta(self.beta)
        self.coef_ = expand_fft(f, n, beta, tol=self.drop_tol, at_infinity=self.at_infinity)
        self.n_terms_ = self.coef_.nnz
        return self

    @classmethod
    def from_series(cls, s: RationalSeries) -> RationalExpansion:
        est = cls(n=max(s.max_abs_index(), 1), beta=s.beta)
        est.coef_ = s
        est.n_terms_ = s.nnz
        return est

    def _check(self) -> RationalSeries:
        if not hasattr(self, "coef_"):
            raise NotFittedError("call fit first")
        return self.coef_

    def predict(self, x):
        return eval_series(self._check(), check_points(x))

    def transform(self, x):
        s = self._check()
        x = check_points(x)
        js = [j for j in range(s.lo, s.hi + 1) if j != 0]
        return np.column_stack([eval_series(RationalSeries({j: 1.0}, s.beta), x) for j in js]) \
            if js else np.zeros((x.size, 0), dtype=complex)

    def integrate(self) -> complex:
        return pv_integral(self._check())

    def fourier_transform(self, alpha):
        """``int f(x) exp(-i alpha x) dx``; ``alpha`` scalar or array (made exact internally)."""
        return fourier_transform(self._check(), alpha)

    def cauchy(self, z):
        """Cauchy transform off the real axis."""
        return cauchy_offaxis(self._check(), check_points(z))


class RHPSolver(BaseEstimator):
    """Solve the singular integral equation of a Riemann-Hilbert problem with GMRES.

    ``fit`` accepts a :class:`~oscrhp.sie.JumpSpec`, or a reflection coefficient together
    with ``x`` and ``t`` for the NLS problem.  After fitting, ``u_`` holds the solution,
    ``residuals_`` the GMRES history and, for NLS jumps, ``q_`` the reconstructed potential.
    """

    def __init__(self, precondition: str = "auto", tol: float = 1e-8, max_iter: int = 200,
                 trunc_tol: float = DEFAULT_TRUNC_TOL, delta_order: int = DEFAULT_DELTA_ORDER):
        self.precondition = precondition
        self.tol = tol
        self.max_iter = max_iter
        self.trunc_tol = trunc_tol
        self.delta_order = delta_order

    def fit(self, spec, y=None, *, x=0, t: float = 0.0):
        tol, trunc_tol = check_tolerances(self.tol, self.trunc_tol)
        if not isinstance(spec, JumpSpec):
            rho = spec if isinstance(spec, OscSeries) else OscSeries.from_series(spec)
            spec = JumpSpec("nls", rho=rho, x=x, t=t)
        res = solve(spec, self.precondition, tol=tol, max_iter=check_order(self.max_iter, "max_iter"),
                    trunc_tol=trunc_tol, delta_order=check_order(self.delta_order, "delta_order"))
        self.spec_ = spec
        self.result_ = res
        self.u_ = res.u
        self.residuals_ = np.array(res.residuals)
        self.n_iter_ = res.iterations
        self.converged_ = res.converged
        self.formulation_ = res.formulation
        self.n_basis_ = res.n_basis
        self.q_ = res.q if res.u.dim == 2 else None
        return self

    def predict(self, z, side: str | None = None):
        """``Phi(z)``; on the real axis pick the boundary value with ``side``."""
        if not hasattr(self, "u_"):
            raise NotFittedError("call fit first")
        out = evaluate_phi(self.u_, check_points(z), side)
        return out[:, 0, 0] if self.u_.dim == 1 else out
