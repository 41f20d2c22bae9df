"""Singular integral operators for Riemann-Hilbert problems on the real line.

A jump ``Phi+ = Phi- G`` with ``Phi = I + C u`` turns into ``u - C^-(u) (G - I) = G - I``.
This module builds ``G - I`` for the scalar sech problem and for the defocusing NLS jump,
the Fredholm regulator ``G^{-1} - I``, the triangular factorizations used as
preconditioners for ``x > 0`` (MP) and ``x < 0`` (LDU with the scalar function delta),
and the reconstruction ``q = (1/pi) int u_21``.

Matrix-valued functions are stored entrywise as :class:`OscSeries`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Number

import numpy as np

from .basis import (DEFAULT_BETA, DEFAULT_TRUNC_TOL, RationalSeries, cauchy_minus, cauchy_offaxis,
                    cauchy_plus, eval_series, expand_fft, expand_values, fft_nodes)
from .errors import DomainError, FactorizationError, ParameterError, ReflectionBoundError
from .osc import (OscSeries, as_frequency, cauchy_minus_osc, cauchy_plus_osc, conjugate_osc,
                  eval_osc, inner_osc, osc_pv_integral)

DEFAULT_SECH_ORDER = 250
DEFAULT_DELTA_ORDER = 256


def sech(x):
    return 1 / np.cosh(x)


class MatrixOscSeries:
    """Square matrix (dim 1 or 2) of :class:`OscSeries` sharing one ``beta``."""

    __slots__ = ("beta", "entries")

    def __init__(self, entries, beta: float | None = None):
        rows = [[e if isinstance(e, OscSeries) else OscSeries.from_series(e) for e in row]
                for row in entries]
        dim = len(rows)
        if dim not in (1, 2) or any(len(r) != dim for r in rows):
            raise ParameterError("only 1x1 and 2x2 matrices are supported")
        betas = {e.beta for r in rows for e in r}
        if beta is not None:
            betas.add(float(beta))
        if len(betas) != 1:
            raise ParameterError(f"entries must share beta, got {sorted(betas)}")
        self.beta = betas.pop()
        self.entries = tuple(tuple(r) for r in rows)

    @classmethod
    def zero(cls, dim: int = 2, beta: float = DEFAULT_BETA) -> MatrixOscSeries:
        z = OscSeries.zero(beta)
        return cls([[z] * dim for _ in range(dim)], beta)

    @classmethod
    def scalar(cls, s) -> MatrixOscSeries:
        return cls([[s]])

    @property
    def dim(self) -> int:
        return len(self.entries)

    def __getitem__(self, ik) -> OscSeries:
        i, k = ik
        return self.entries[i][k]

    def map(self, fn) -> MatrixOscSeries:
        return MatrixOscSeries([[fn(e) for e in row] for row in self.entries], self.beta)

    def _check(self, other: MatrixOscSeries) -> None:
        if other.dim != self.dim or other.beta != self.beta:
            raise ParameterError("matrix dimension or beta mismatch")

    def __add__(self, other):
        if isinstance(other, Number) and other == 0:
            return self
        if not isinstance(other, MatrixOscSeries):
            return NotImplemented
        self._check(other)
        return MatrixOscSeries([[a + b for a, b in zip(r1, r2)]
                                for r1, r2 in zip(self.entries, other.entries)], self.beta)

    __radd__ = __add__

    def __neg__(self):
        return self.map(lambda e: -e)

    def __sub__(self, other):
        if not isinstance(other, MatrixOscSeries):
            return NotImplemented
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, Number):
            return self.map(lambda e: e * other)
        return NotImplemented

    __rmul__ = __mul__

    def __matmul__(self, other):
        if not isinstance(other, MatrixOscSeries):
            return NotImplemented
        self._check(other)
        d = self.dim
        return MatrixOscSeries([[sum((self.entries[i][l] * other.entries[l][k] for l in range(d)),
                                     OscSeries.zero(self.beta))
                                 for k in range(d)] for i in range(d)], self.beta)

    def truncate(self, tol: float) -> MatrixOscSeries:
        return self.map(lambda e: e.truncate(tol))

    @property
    def nnz(self) -> int:
        """Number of active basis functions over all entries."""
        return sum(e.nnz for row in self.entries for e in row)

    def max_abs(self) -> float:
        return max(e.max_abs() for row in self.entries for e in row)

    def __call__(self, z) -> np.ndarray:
        """Pointwise values, shape ``(npoints, dim, dim)``."""
        z = np.atleast_1d(np.asarray(z, dtype=complex)).ravel()
        out = np.empty((z.size, self.dim, self.dim), dtype=complex)
        for i, row in enumerate(self.entries):
            for k, e in enumerate(row):
                out[:, i, k] = eval_osc(e, z)
        return out

    def __repr__(self):
        return f"MatrixOscSeries(dim={self.dim}, nnz={self.nnz}, beta={self.beta:g})"


def matrix_inner(f: MatrixOscSeries, g: MatrixOscSeries) -> complex:
    """``int trace(f g^*) dx`` = sum of entrywise inner products."""
    f._check(g)
    return sum(inner_osc(a, b) for r1, r2 in zip(f.entries, g.entries) for a, b in zip(r1, r2))


def cauchy_minus_matrix(u: MatrixOscSeries) -> MatrixOscSeries:
    return u.map(cauchy_minus_osc)


def cauchy_plus_matrix(u: MatrixOscSeries) -> MatrixOscSeries:
    return u.map(cauchy_plus_osc)


# -- jump specification -----------------------------------------------------------------

PRECONDITIONERS = ("none", "fredholm", "mp", "ldu", "auto")


@dataclass(frozen=True)
class JumpSpec:
    """Which jump matrix to build.

    ``kind`` is ``"scalar-sech"``, ``"nls"`` or ``"custom"``.  For ``"nls"``, ``rho`` is the
    reflection coefficient (already multiplied by ``exp(4 i z^2 t)`` when ``t != 0``) and
    ``x`` enters exactly as the frequency ``2x``.  For ``"custom"``, ``jump`` holds ``G - I``.
    """

    kind: str
    rho: OscSeries | None = None
    x: Fraction = Fraction(0)
    t: float = 0.0
    n: int = DEFAULT_SECH_ORDER
    beta: float = DEFAULT_BETA
    jump: MatrixOscSeries | None = None
    check_grid: int = 2000

    def __post_init__(self):
        if self.kind not in ("scalar-sech", "nls", "custom"):
            raise ParameterError(f"unknown jump kind {self.kind!r}")
        object.__setattr__(self, "x", as_frequency(self.x))
        if self.kind == "nls":
            if self.rho is None:
                raise ParameterError("nls jump needs rho")
            rho = self.rho
            if isinstance(rho, RationalSeries):
                rho = OscSeries.from_series(rho)
            object.__setattr__(self, "rho", rho)
            object.__setattr__(self, "beta", rho.beta)
            check_reflection(rho, self.check_grid)
        if self.kind == "custom":
            if self.jump is None:
                raise ParameterError("custom jump needs jump=G-I")
            object.__setattr__(self, "beta", self.jump.beta)

    @property
    def frequency(self) -> Fraction:
        return 2 * self.x


def _test_grid(beta: float, m: int) -> np.ndarray:
    return np.concatenate([fft_nodes(m, beta)[1:], np.linspace(-10, 10, 201) * beta])


def check_reflection(rho: OscSeries, m: int = 2000) -> float:
    """Return ``sup |rho|`` on a test grid; raise if it is not below 1."""
    sup = float(np.abs(eval_osc(rho, _test_grid(rho.beta, m))).max())
    if not sup < 1:
        raise ReflectionBoundError(f"sup |rho| = {sup:.6g} >= 1 on the test grid")
    return sup


def build_jump(spec: JumpSpec) -> MatrixOscSeries:
    """``G - I`` for the given jump."""
    if spec.kind == "scalar-sech":
        return MatrixOscSeries.scalar(expand_fft(sech, spec.n, spec.beta))
    if spec.kind == "custom":
        return spec.jump
    rho = spec.rho
    a = spec.frequency
    rho_bar = conjugate_osc(rho)
    return MatrixOscSeries([[-(rho * rho_bar), -rho_bar.shift(-a)],
                            [rho.shift(a), OscSeries.zero(rho.beta)]])


def apply_C_G(u: MatrixOscSeries, Gm: MatrixOscSeries, trunc_tol: float = DEFAULT_TRUNC_TOL) -> MatrixOscSeries:
    """``u - C^-(u) (G - I)``, truncated at ``trunc_tol``."""
    return (u - cauchy_minus_matrix(u) @ Gm).truncate(trunc_tol)


def fredholm_regulator(spec: JumpSpec) -> MatrixOscSeries:
    """``G^{-1} - I``; composing ``C[G^{-1}]`` after ``C[G]`` gives identity plus finite rank."""
    if spec.kind == "scalar-sech":
        return MatrixOscSeries.scalar(expand_fft(lambda x: 1 / (1 + sech(x)) - 1, spec.n, spec.beta))
    Gm = build_jump(spec)
    if Gm.dim == 1:
        return MatrixOscSeries.scalar(_pointwise_scalar_inverse(Gm[0, 0], spec.n))
    if spec.kind == "custom":
        grid = _test_grid(Gm.beta, 500)
        vals = Gm(grid) + np.eye(2)
        det = vals[:, 0, 0] * vals[:, 1, 1] - vals[:, 0, 1] * vals[:, 1, 0]
        if np.max(np.abs(det - 1)) > 1e-10:
            raise FactorizationError("custom 2x2 regulator requires det G = 1")
    # det G = 1, so G^{-1} = adj(G)
    return MatrixOscSeries([[Gm[1, 1], -Gm[0, 1]], [-Gm[1, 0], Gm[0, 0]]])


def _pointwise_scalar_inverse(g: OscSeries, n: int) -> RationalSeries:
    if set(g.groups) - {Fraction(0)}:
        raise FactorizationError("pointwise inversion needs a zero-frequency scalar jump")
    nodes = fft_nodes(n, g.beta)
    G = 1 + eval_osc(g, nodes[1:])
    if np.min(np.abs(G)) < 1e-12:
        raise FactorizationError("jump is singular on the grid")
    return expand_values(np.concatenate([[0.0], 1 / G - 1]), n, g.beta)


def compose_fredholm(u: MatrixOscSeries, Gm: MatrixOscSeries, Rm: MatrixOscSeries,
                     trunc_tol: float = DEFAULT_TRUNC_TOL) -> MatrixOscSeries:
    """``C[G^{-1}] C[G] u``."""
    return apply_C_G(apply_C_G(u, Gm, trunc_tol), Rm, trunc_tol)


# -- MP factorization (x > 0) --------------------------------------------------------------

@dataclass(frozen=True)
class MPFactors:
    M_minus_I: MatrixOscSeries
    P_minus_I: MatrixOscSeries
    Pinv_minus_I: MatrixOscSeries

    @property
    def rhs(self) -> MatrixOscSeries:
        """``M - P^{-1}``."""
        return self.M_minus_I - self.Pinv_minus_I


def _nls_only(spec: JumpSpec) -> None:
    if spec.kind != "nls":
        raise ParameterError("triangular factorizations need an NLS jump")


def mp_factor(spec: JumpSpec) -> MPFactors:
    """``G = M P`` with ``P`` unipotent lower and ``M`` unipotent upper triangular."""
    _nls_only(spec)
    rho = spec.rho
    a = spec.frequency
    z = OscSeries.zero(rho.beta)
    P = MatrixOscSeries([[z, z], [rho.shift(a), z]])
    M = MatrixOscSeries([[z, -conjugate_osc(rho).shift(-a)], [z, z]])
    return MPFactors(M, P, -P)


def apply_MP_operator(u: MatrixOscSeries, factors: MPFactors,
                      trunc_tol: float = DEFAULT_TRUNC_TOL) -> MatrixOscSeries:
    """``u P^{-1} - C^-(u) (M - P^{-1})``."""
    return (u + u @ factors.Pinv_minus_I - cauchy_minus_matrix(u) @ factors.rhs).truncate(trunc_tol)


# -- delta and LDU factorization (x < 0) ---------------------------------------------------

@dataclass(frozen=True)
class Delta:
    """``delta(z) = exp(C[log(1 - |rho|^2)](z))`` solving ``delta+ = delta- (1 - |rho|^2)``."""

    log_series: RationalSeries
    plus_sq_minus_one: OscSeries
    minus_invsq_minus_one: OscSeries

    def plus(self, x):
        return np.exp(eval_series(cauchy_plus(self.log_series), x))

    def minus(self, x):
        return np.exp(eval_series(cauchy_minus(self.log_series), x))

    def __call__(self, z):
        return np.exp(cauchy_offaxis(self.log_series, z))


def _abs2_rho(rho: OscSeries, x: np.ndarray) -> np.ndarray:
    return np.abs(eval_osc(rho, x)) ** 2


def delta_series(rho: OscSeries, n: int = DEFAULT_DELTA_ORDER) -> Delta:
    """Expansions of ``(delta+)^2 - 1`` and ``(delta-)^{-2} - 1`` (both vanish at infinity)."""
    if isinstance(rho, RationalSeries):
        rho = OscSeries.from_series(rho)
    beta = rho.beta
    nodes = fft_nodes(n, beta)[1:]
    one_minus = 1 - _abs2_rho(rho, nodes)
    if np.min(one_minus) <= 0:
        raise ReflectionBoundError("1 - |rho|^2 <= 0 on the grid")
    g = expand_values(np.concatenate([[0.0], np.log(one_minus)]), n, beta)
    cp = eval_series(cauchy_plus(g), nodes)
    cm = eval_series(cauchy_minus(g), nodes)
    plus_sq = expand_values(np.concatenate([[0.0], np.exp(2 * cp) - 1]), n, beta)
    minus_invsq = expand_values(np.concatenate([[0.0], np.exp(-2 * cm) - 1]), n, beta)
    return Delta(g, OscSeries.from_series(plus_sq), OscSeries.from_series(minus_invsq))


@dataclass(frozen=True)
class LDUFactors:
    L_minus_I: MatrixOscSeries
    U_minus_I: MatrixOscSeries
    Uinv_minus_I: MatrixOscSeries
    delta: Delta = field(repr=False)

    @property
    def rhs(self) -> MatrixOscSeries:
        """``L~ - U~^{-1}``."""
        return self.L_minus_I - self.Uinv_minus_I

    def conjugated_jump(self) -> MatrixOscSeries:
        """``G~ - I = L~ U~ - I``."""
        return self.L_minus_I + self.U_minus_I + self.L_minus_I @ self.U_minus_I


def ldu_factor(spec: JumpSpec, n: int = DEFAULT_DELTA_ORDER) -> LDUFactors:
    """``Delta- G (Delta+)^{-1} = L~ U~`` with unipotent triangular factors."""
    _nls_only(spec)
    rho = spec.rho
    if set(rho.groups) - {Fraction(0)}:
        raise ParameterError("LDU factorization needs a zero-frequency rho")
    beta = rho.beta
    a = spec.frequency
    delta = delta_series(rho, n)
    nodes = fft_nodes(n, beta)[1:]
    r = eval_osc(rho, nodes)
    one_minus = 1 - np.abs(r) ** 2
    dm = delta.minus(nodes)
    dp = delta.plus(nodes)
    fL = expand_values(np.concatenate([[0.0], r / one_minus / dm ** 2]), n, beta)
    fU = expand_values(np.concatenate([[0.0], -np.conj(r) / one_minus * dp ** 2]), n, beta)
    z = OscSeries.zero(beta)
    L = MatrixOscSeries([[z, z], [OscSeries.from_series(fL, a), z]])
    U = MatrixOscSeries([[z, OscSeries.from_series(fU, -a)], [z, z]])
    return LDUFactors(L, U, -U, delta)


def apply_LDU_operator(u: MatrixOscSeries, factors: LDUFactors,
                       trunc_tol: float = DEFAULT_TRUNC_TOL) -> MatrixOscSeries:
    """``u U~^{-1} - C^-(u) (L~ - U~^{-1})``."""
    return (u + u @ factors.Uinv_minus_I - cauchy_minus_matrix(u) @ factors.rhs).truncate(trunc_tol)


# -- reconstruction and reference solutions -------------------------------------------------

def reconstruct_q(u: MatrixOscSeries) -> complex:
    """``q = (1/pi) int u_21 dx``."""
    if u.dim != 2:
        raise ParameterError("reconstruction needs a 2x2 solution")
    return osc_pv_integral(u[1, 0]) / np.pi


def boundary_values(u: MatrixOscSeries, x) -> tuple[np.ndarray, np.ndarray]:
    """``Phi+ = I + C+ u`` and ``Phi- = I + C- u`` on the real points ``x``."""
    eye = np.eye(u.dim)
    return eye + cauchy_plus_matrix(u)(x), eye + cauchy_minus_matrix(u)(x)


def evaluate_phi(u: MatrixOscSeries, z, side: str | None = None) -> np.ndarray:
    """``Phi(z) = I + C u(z)``, shape ``(npoints, dim, dim)``.

    Points off the axis use the side they lie on; real points need ``side="+"`` or ``"-"``.
    """
    z = np.atleast_1d(np.asarray(z, dtype=complex)).ravel()
    if side not in (None, "+", "-"):
        raise ParameterError(f"side must be '+', '-' or None, got {side!r}")
    upper = z.imag > 0 if side is None else np.full(z.shape, side == "+")
    if side is None and np.any(z.imag == 0):
        raise DomainError("real points need side='+' or side='-'")
    out = np.empty((z.size, u.dim, u.dim), dtype=complex)
    if upper.any():
        out[upper] = cauchy_plus_matrix(u)(z[upper])
    if (~upper).any():
        out[~upper] = cauchy_minus_matrix(u)(z[~upper])
    return out + np.eye(u.dim)


def jump_residual(u: MatrixOscSeries, Gm: MatrixOscSeries, x) -> float:
    """``max |Phi+ - Phi- G|`` over the points ``x``."""
    pp, pm = boundary_values(u, x)
    G = np.eye(u.dim) + Gm(x)
    return float(np.max(np.abs(pp - pm @ G)))


_explicit_cache: dict[tuple, RationalSeries] = {}


def scalar_log_series(n: int = DEFAULT_SECH_ORDER, beta: float = DEFAULT_BETA) -> RationalSeries:
    key = (n, beta)
    if key not in _explicit_cache:
        _explicit_cache[key] = expand_fft(lambda x: np.log1p(sech(x)), n, beta)
    return _explicit_cache[key]


def scalar_explicit_solution(z, n: int = DEFAULT_SECH_ORDER, beta: float = DEFAULT_BETA, side: str | None = None):
    """Explicit solution ``Phi(z) = exp(C[log(1 + sech)](z))`` of the scalar problem.

    Off the axis ``side`` is ignored; on the axis pass ``side="+"`` or ``"-"``.
    """
    g = scalar_log_series(n, beta)
    if side == "+":
        return np.exp(eval_series(cauchy_plus(g), z))
    if side == "-":
        return np.exp(eval_series(cauchy_minus(g), z))
    scalar = np.ndim(z) == 0
    zz = np.atleast_1d(np.asarray(z, dtype=complex))
    out = np.ones(zz.shape, dtype=complex)
    fin = ~np.isinf(zz)
    out[fin] = np.exp(cauchy_offaxis(g, zz[fin]))
    return complex(out[0]) if scalar else out
