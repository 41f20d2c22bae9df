"""Non-oscillatory rational basis on the real line.

The basis functions are ``R_j(z) = M(z)**j - 1`` where ``M(z) = (z - i*beta)/(z + i*beta)``
maps the real axis onto the unit circle.  Expansions in this basis are closed under
multiplication and under the Cauchy operators, and their integrals and inner products
are available in closed form.

Coefficients are stored as a dense band ``lo..hi`` of complex numbers.  Index 0 is never
populated (``R_0`` is identically zero) and magnitudes below a tolerance are dropped by
:meth:`RationalSeries.truncate`.
"""

from __future__ import annotations

import cmath
import math
from collections.abc import Callable, Mapping
from dataclasses import dataclass
from numbers import Number
from typing import NamedTuple

import numpy as np
from scipy import signal

from .errors import DomainError, NonDecayingInputError, ParameterError, PoleError

DEFAULT_BETA = 1.0
DEFAULT_TRUNC_TOL = 1e-12
# Expansion coefficients are weighted by |j| under integration, so FFT output is kept
# down to (near) rounding level rather than the operator truncation tolerance.
EXPAND_DROP_TOL = 1e-15
INFINITY = complex(math.inf, 0.0)

# below this many multiply-adds a direct convolution beats the FFT and is exact to rounding
_DIRECT_CONV_LIMIT = 4_000_000


def is_infinite(z) -> bool:
    return cmath.isinf(complex(z))


def _check_beta(beta: float) -> float:
    beta = float(beta)
    if not (beta > 0 and math.isfinite(beta)):
        raise ParameterError(f"beta must be a positive finite number, got {beta!r}")
    return beta


def mobius(z, beta: float = DEFAULT_BETA):
    """Map ``z`` to ``(z - i beta)/(z + i beta)``; the real line goes to the unit circle.

    Accepts scalars or arrays.  The pole ``-i beta`` maps to :data:`INFINITY` and the
    point at infinity maps to 1.
    """
    beta = _check_beta(beta)
    if np.ndim(z) == 0:
        z = complex(z)
        if cmath.isinf(z):
            return 1.0 + 0.0j
        den = z + 1j * beta
        if den == 0:
            return INFINITY
        return (z - 1j * beta) / den
    z = np.asarray(z, dtype=complex)
    out = np.empty(z.shape, dtype=complex)
    inf = np.isinf(z)
    den = z + 1j * beta
    pole = (den == 0) & ~inf
    ok = ~inf & ~pole
    out[ok] = (z[ok] - 1j * beta) / den[ok]
    out[inf] = 1.0
    out[pole] = INFINITY
    return out


def mobius_inv(m, beta: float = DEFAULT_BETA):
    """Inverse of :func:`mobius`: ``(beta/i) (m + 1)/(m - 1)``.

    On the unit circle ``mobius_inv(exp(i theta)) == -beta * cot(theta/2)``.
    """
    beta = _check_beta(beta)
    if np.ndim(m) == 0:
        m = complex(m)
        if cmath.isinf(m):
            return -1j * beta
        if m == 1:
            return INFINITY
        return -1j * beta * (m + 1) / (m - 1)
    m = np.asarray(m, dtype=complex)
    out = np.empty(m.shape, dtype=complex)
    inf = np.isinf(m)
    one = (m == 1) & ~inf
    ok = ~inf & ~one
    out[ok] = -1j * beta * (m[ok] + 1) / (m[ok] - 1)
    out[inf] = -1j * beta
    out[one] = INFINITY
    return out


def _convolve(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if a.size * b.size <= _DIRECT_CONV_LIMIT:
        return np.convolve(a, b)
    return signal.fftconvolve(a, b)


class RationalSeries:
    """Finite expansion ``sum_j a_j R_j(z)`` for a fixed Möbius scale ``beta``.

    Instances are immutable.  Build them from a mapping ``{j: a_j}`` or with
    :meth:`from_dense`; combine them with ``+``, ``-``, scalar ``*`` and series ``*``
    (pointwise product).
    """

    __slots__ = ("beta", "lo", "_c")

    def __init__(self, coeffs: Mapping[int, complex] | None = None, beta: float = DEFAULT_BETA):
        self.beta = _check_beta(beta)
        coeffs = dict(coeffs or {})
        if 0 in coeffs:
            raise ParameterError("index 0 is not a basis element (R_0 == 0)")
        if not coeffs:
            self._set(0, np.zeros(0, dtype=complex))
            return
        lo, hi = min(coeffs), max(coeffs)
        c = np.zeros(hi - lo + 1, dtype=complex)
        for j, a in coeffs.items():
            c[int(j) - lo] = a
        self._set(lo, c)
        self._trim()

    # -- construction helpers ------------------------------------------------
    def _set(self, lo: int, c: np.ndarray) -> None:
        self.lo = int(lo)
        c.flags.writeable = False
        self._c = c

    def _trim(self) -> None:
        c = self._c
        if 0 <= -self.lo < c.size and c[-self.lo] != 0:
            c = c.copy()
            c[-self.lo] = 0
        nz = np.flatnonzero(c)
        if nz.size == 0:
            self._set(0, np.zeros(0, dtype=complex))
        else:
            self._set(self.lo + nz[0], np.array(c[nz[0]:nz[-1] + 1]))

    @classmethod
    def from_dense(cls, lo: int, values, beta: float = DEFAULT_BETA, tol: float = 0.0) -> RationalSeries:
        """Series with coefficient ``values[k]`` on index ``lo + k``.

        Any value at index 0 is discarded; magnitudes below ``tol`` are dropped.
        """
        out = cls.__new__(cls)
        out.beta = _check_beta(beta)
        c = np.array(values, dtype=complex).ravel()
        if tol > 0:
            c[np.abs(c) < tol] = 0
        out._set(lo, c)
        out._trim()
        return out

    @classmethod
    def zero(cls, beta: float = DEFAULT_BETA) -> RationalSeries:
        return cls(None, beta)

    # -- views ---------------------------------------------------------------
    @property
    def hi(self) -> int:
        return self.lo + self._c.size - 1

    @property
    def dense(self) -> np.ndarray:
        """Read-only coefficient band for indices ``lo..hi``."""
        return self._c

    @property
    def coeffs(self) -> dict[int, complex]:
        """Sparse ``{j: a_j}`` view (nonzero coefficients only)."""
        nz = np.flatnonzero(self._c)
        return {int(self.lo + k): complex(self._c[k]) for k in nz}

    @property
    def nnz(self) -> int:
        return int(np.count_nonzero(self._c))

    def is_zero(self) -> bool:
        return self._c.size == 0

    def __getitem__(self, j: int) -> complex:
        k = int(j) - self.lo
        if 0 <= k < self._c.size:
            return complex(self._c[k])
        return 0j

    def max_abs_index(self) -> int:
        if self.is_zero():
            return 0
        return max(abs(self.lo), abs(self.hi))

    def total(self) -> complex:
        """Sum of all coefficients."""
        return complex(self._c.sum())

    # -- algebra -------------------------------------------------------------
    def _same_beta(self, other: RationalSeries) -> None:
        if other.beta != self.beta:
            raise ParameterError(f"mismatched beta: {self.beta} vs {other.beta}")

    def __add__(self, other):
        if isinstance(other, Number) and other == 0:
            return self
        if not isinstance(other, RationalSeries):
            return NotImplemented
        self._same_beta(other)
        if other.is_zero():
            return self
        if self.is_zero():
            return other
        lo = min(self.lo, other.lo)
        hi = max(self.hi, other.hi)
        c = np.zeros(hi - lo + 1, dtype=complex)
        c[self.lo - lo:self.hi - lo + 1] += self._c
        c[other.lo - lo:other.hi - lo + 1] += other._c
        return RationalSeries.from_dense(lo, c, self.beta)

    __radd__ = __add__

    def __neg__(self):
        return RationalSeries.from_dense(self.lo, -self._c, self.beta)

    def __sub__(self, other):
        if not isinstance(other, RationalSeries):
            return NotImplemented
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, RationalSeries):
            return multiply(self, other)
        if isinstance(other, Number):
            if other == 0:
                return RationalSeries.zero(self.beta)
            return RationalSeries.from_dense(self.lo, self._c * complex(other), self.beta)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, Number):
            return self * other
        return NotImplemented

    def __truediv__(self, other):
        if isinstance(other, Number):
            return self * (1 / complex(other))
        return NotImplemented

    def __eq__(self, other):
        if not isinstance(other, RationalSeries):
            return NotImplemented
        return (self.beta == other.beta and self.lo == other.lo
                and np.array_equal(self._c, other._c))

    __hash__ = None

    def allclose(self, other: RationalSeries, atol: float = 1e-13) -> bool:
        return self.beta == other.beta and (self - other).max_abs() <= atol

    def max_abs(self) -> float:
        return float(np.abs(self._c).max()) if self._c.size else 0.0

    def truncate(self, tol: float) -> RationalSeries:
        """Drop coefficients with magnitude below ``tol``."""
        if tol <= 0 or self.is_zero():
            return self
        return RationalSeries.from_dense(self.lo, self._c, self.beta, tol=tol)

    def conj(self) -> RationalSeries:
        return conjugate(self)

    def __call__(self, z):
        return eval_series(self, z)

    def __repr__(self):
        terms = ", ".join(f"{j}: {a:.6g}" for j, a in list(self.coeffs.items())[:6])
        more = ", ..." if self.nnz > 6 else ""
        return f"RationalSeries({{{terms}{more}}}, beta={self.beta:g})"


def basis(j: int, beta: float = DEFAULT_BETA) -> RationalSeries:
    """The single basis element ``R_j``."""
    return RationalSeries({j: 1.0}, beta)


def _powers_of_m(m: np.ndarray, lo: int, hi: int, on_axis: np.ndarray) -> np.ndarray:
    """``m[p]**j`` for ``j = lo..hi``; unit-modulus points use angles for accuracy."""
    j = np.arange(lo, hi + 1)
    out = np.empty((m.size, j.size), dtype=complex)
    if on_axis.any():
        theta = np.angle(m[on_axis])
        out[on_axis] = np.exp(1j * np.outer(theta, j))
    off = ~on_axis
    if off.any():
        out[off] = m[off, None] ** j[None, :]
    return out


def eval_series(s: RationalSeries, z):
    """Evaluate ``sum_j a_j R_j(z)`` at a point or array of points.

    Returns 0 at the point at infinity.  Raises :class:`PoleError` at ``-i beta`` when
    positive indices are present (or at ``+i beta`` with negative indices).
    """
    scalar = np.ndim(z) == 0
    z = np.atleast_1d(np.asarray(z, dtype=complex)).ravel()
    out = np.zeros(z.size, dtype=complex)
    if s.is_zero():
        return complex(out[0]) if scalar else out
    beta = s.beta
    inf = np.isinf(z)
    at_lower = np.isclose(z, -1j * beta, rtol=0, atol=0) & ~inf
    at_upper = np.isclose(z, 1j * beta, rtol=0, atol=0) & ~inf
    if (at_lower.any() and s.hi > 0) or (at_upper.any() and s.lo < 0):
        raise PoleError("evaluation at a pole of the basis")
    fin = ~inf
    if fin.any():
        zf = z[fin]
        m = np.empty(zf.size, dtype=complex)
        lower = np.isclose(zf, -1j * beta, rtol=0, atol=0)
        upper = np.isclose(zf, 1j * beta, rtol=0, atol=0)
        reg = ~lower & ~upper
        m[reg] = (zf[reg] - 1j * beta) / (zf[reg] + 1j * beta)
        on_axis = reg & (zf.imag == 0)
        vals = np.zeros(zf.size, dtype=complex)
        if reg.any():
            pw = _powers_of_m(m[reg], s.lo, s.hi, on_axis[reg])
            vals[reg] = (pw - 1.0) @ s.dense
        # R_j(-i beta) = -1 for j < 0, R_j(i beta) = -1 for j > 0
        if lower.any():
            vals[lower] = -s.dense[:max(0, -s.lo)].sum()
        if upper.any():
            vals[upper] = -s.dense[max(0, -s.lo):].sum()
        out[fin] = vals
    return complex(out[0]) if scalar else out


def fft_nodes(n: int, beta: float = DEFAULT_BETA) -> np.ndarray:
    """The ``2n+1`` real nodes ``M^{-1}(exp(i t_l))``, ``t_l = 2 pi l/(2n+1)``.

    Node 0 is ``+inf`` (the image of ``t = 0``).
    """
    if n < 1:
        raise ParameterError(f"n must be >= 1, got {n}")
    beta = _check_beta(beta)
    N = 2 * n + 1
    t = 2 * np.pi * np.arange(1, N) / N
    return np.concatenate([[np.inf], -beta / np.tan(t / 2)])


def expand_values(values, n: int, beta: float = DEFAULT_BETA, tol: float = EXPAND_DROP_TOL) -> RationalSeries:
    """Coefficients of the trigonometric interpolant through samples on :func:`fft_nodes`.

    ``values[0]`` (the sample at infinity) is replaced by 0.
    """
    v = np.array(values, dtype=complex)
    N = 2 * n + 1
    if v.shape != (N,):
        raise ParameterError(f"expected {N} samples, got shape {v.shape}")
    v[0] = 0.0
    a = np.fft.fftshift(np.fft.fft(v)) / N  # indices -n..n
    return RationalSeries.from_dense(-n, a, beta, tol=tol)


def expand_fft(f: Callable, n: int, beta: float = DEFAULT_BETA, *, tol: float = EXPAND_DROP_TOL,
               at_infinity: complex | None = None, decay_tol: float = 1e-10) -> RationalSeries:
    """Expand a smooth function decaying at infinity in ``{R_j}``, ``|j| <= n``.

    ``f`` is called once with the real array of finite nodes.  Its limit at infinity is
    taken from ``at_infinity`` or from ``f(inf)``; it must vanish to within ``decay_tol``
    (relative to the sample scale), otherwise :class:`NonDecayingInputError` is raised.
    """
    nodes = fft_nodes(n, beta)
    with np.errstate(all="ignore"):
        samples = np.asarray(f(nodes[1:]), dtype=complex)
        if at_infinity is None:
            at_infinity = complex(np.asarray(f(np.array([np.inf])), dtype=complex).ravel()[0])
    if samples.shape != (2 * n,):
        raise ParameterError("sampler must return one value per node")
    if not np.all(np.isfinite(samples)):
        raise DomainError("sampler returned non-finite values on the grid")
    scale = max(1.0, float(np.abs(samples).max()))
    if not cmath.isfinite(at_infinity) or abs(at_infinity) > decay_tol * scale:
        raise NonDecayingInputError(
            f"expansion requires f(inf) = 0, got {at_infinity!r}; pass at_infinity= if f(inf) is undefined")
    return expand_values(np.concatenate([[0.0], samples]), n, beta, tol)


def multiply(s1: RationalSeries, s2: RationalSeries) -> RationalSeries:
    """Exact product via ``R_j R_k = R_{j+k} - R_j - R_k``."""
    s1._same_beta(s2)
    if s1.is_zero() or s2.is_zero():
        return RationalSeries.zero(s1.beta)
    a, b = s1.dense, s2.dense
    conv = _convolve(a, b)
    lo = min(s1.lo + s2.lo, s1.lo, s2.lo)
    hi = max(s1.hi + s2.hi, s1.hi, s2.hi)
    c = np.zeros(hi - lo + 1, dtype=complex)
    off = s1.lo + s2.lo - lo
    c[off:off + conv.size] += conv
    c[s1.lo - lo:s1.hi - lo + 1] -= a * b.sum()
    c[s2.lo - lo:s2.hi - lo + 1] -= b * a.sum()
    return RationalSeries.from_dense(lo, c, s1.beta)


def cauchy_plus(s: RationalSeries) -> RationalSeries:
    """Boundary value from above: keeps positive indices, kills negative ones."""
    if s.hi < 1:
        return RationalSeries.zero(s.beta)
    start = max(s.lo, 1)
    return RationalSeries.from_dense(start, s.dense[start - s.lo:], s.beta)


def cauchy_minus(s: RationalSeries) -> RationalSeries:
    """Boundary value from below: negates negative indices, kills positive ones."""
    if s.lo > -1:
        return RationalSeries.zero(s.beta)
    stop = min(s.hi, -1)
    return RationalSeries.from_dense(s.lo, -s.dense[:stop - s.lo + 1], s.beta)


def cauchy_offaxis(s: RationalSeries, z):
    """Cauchy integral ``(1/2 pi i) int f(x)/(x - z) dx`` of the series at ``Im z != 0``."""
    scalar = np.ndim(z) == 0
    z = np.atleast_1d(np.asarray(z, dtype=complex)).ravel()
    if np.any(z.imag == 0):
        raise DomainError("cauchy_offaxis needs Im z != 0; use cauchy_plus/cauchy_minus on the axis")
    out = np.zeros(z.size, dtype=complex)
    up = z.imag > 0
    if up.any():
        out[up] = eval_series(cauchy_plus(s), z[up])
    if (~up).any():
        out[~up] = eval_series(cauchy_minus(s), z[~up])
    return complex(out[0]) if scalar else out


class PVIntegral(NamedTuple):
    value: complex
    upper: complex
    lower: complex

    @property
    def discrepancy(self) -> float:
        """Mismatch between the two one-sided forms; small only for integrable functions."""
        return abs(self.upper - self.lower)


def pv_integral(s: RationalSeries) -> complex:
    """Principal-value integral over the real line, ``-2 pi beta sum_j |j| a_j``."""
    if s.is_zero():
        return 0j
    j = np.arange(s.lo, s.hi + 1)
    return complex(-2 * np.pi * s.beta * np.dot(np.abs(j), s.dense))


def pv_integral_forms(s: RationalSeries) -> PVIntegral:
    """Symmetric principal-value integral plus the two one-sided residue forms."""
    if s.is_zero():
        return PVIntegral(0j, 0j, 0j)
    j = np.arange(s.lo, s.hi + 1)
    c = s.dense
    pos, neg = j > 0, j < 0
    upper = -4 * np.pi * s.beta * np.dot(j[pos], c[pos])
    lower = 4 * np.pi * s.beta * np.dot(j[neg], c[neg])
    return PVIntegral(pv_integral(s), complex(upper), complex(lower))


@dataclass(frozen=True)
class QuadratureRule:
    """Nodes and weights of the ``2n+1``-point rule; node 0 is the point at infinity."""

    nodes: np.ndarray
    weights: np.ndarray
    n: int

    def __post_init__(self):
        if not (len(self.nodes) == len(self.weights) == 2 * self.n + 1):
            raise ParameterError("node count and weight count must equal 2n+1")

    def integrate(self, f: Callable) -> complex:
        """Apply the rule; the integrand is taken to vanish at infinity."""
        vals = np.asarray(f(self.nodes[1:]), dtype=complex)
        return complex(np.dot(self.weights[1:], vals))


def quad_rule(n: int, beta: float = DEFAULT_BETA) -> QuadratureRule:
    nodes = fft_nodes(n, beta)
    N = 2 * n + 1
    ell = np.arange(1, N)
    # sum_{j<=n} j cos(j t) at t = 2 pi l / N collapses to (cos(n t) - 1) / (4 sin^2(t/2));
    # reducing n*l mod N keeps the cosine argument small
    cos_nt = np.cos(2 * np.pi * ((n * ell) % N) / N)
    kernel = np.empty(N)
    kernel[0] = n * (n + 1) / 2
    kernel[1:] = (cos_nt - 1) / (4 * np.sin(np.pi * ell / N) ** 2)
    return QuadratureRule(nodes, -(4 * np.pi * beta / N) * kernel, n)


def conjugate(s: RationalSeries) -> RationalSeries:
    """Series of the complex conjugate on the real line: ``a_j R_j -> conj(a_j) R_{-j}``."""
    if s.is_zero():
        return s
    return RationalSeries.from_dense(-s.hi, np.conj(s.dense[::-1]), s.beta)


def inner(s1: RationalSeries, s2: RationalSeries) -> complex:
    """L2 inner product ``int s1 conj(s2) dx`` (linear in the first argument)."""
    s1._same_beta(s2)
    return pv_integral(multiply(s1, conjugate(s2)))


def norm(s: RationalSeries) -> float:
    return math.sqrt(max(inner(s, s).real, 0.0))
