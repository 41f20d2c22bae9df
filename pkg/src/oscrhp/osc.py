"""Oscillatory basis ``R_{j,alpha}(z) = exp(i alpha z) R_j(z)``.

An :class:`OscSeries` groups coefficients by frequency.  Frequencies are exact rationals
(:class:`fractions.Fraction`) so that grouping never depends on a floating tolerance.
"""

from __future__ import annotations

from collections.abc import Mapping
from fractions import Fraction
from numbers import Number

import numpy as np

from . import special
from .basis import (DEFAULT_BETA, RationalSeries, _check_beta, _convolve, cauchy_minus,
                    cauchy_plus, conjugate, eval_series, multiply)
from .errors import ParameterError

Frequency = Fraction


def as_frequency(alpha) -> Fraction:
    """Exact rational frequency from an int, Fraction, ``(num, den)`` pair, string or float."""
    if isinstance(alpha, Fraction):
        return alpha
    if isinstance(alpha, (tuple, list)):
        num, den = alpha
        if int(den) <= 0:
            raise ParameterError("frequency denominator must be positive")
        return Fraction(int(num), int(den))
    if isinstance(alpha, str):
        return Fraction(alpha.strip())
    if isinstance(alpha, (int, np.integer)):
        return Fraction(int(alpha))
    if isinstance(alpha, (float, np.floating)):
        if not np.isfinite(alpha):
            raise ParameterError("frequency must be finite")
        return Fraction(float(alpha))
    raise ParameterError(f"cannot interpret {alpha!r} as a frequency")


class OscSeries:
    """Sum over frequencies ``alpha`` of ``exp(i alpha z) * s_alpha(z)``."""

    __slots__ = ("beta", "groups")

    def __init__(self, groups: Mapping | None = None, beta: float = DEFAULT_BETA):
        self.beta = _check_beta(beta)
        clean = {}
        for alpha, s in (groups or {}).items():
            if not isinstance(s, RationalSeries):
                s = RationalSeries(s, self.beta)
            if s.beta != self.beta:
                raise ParameterError(f"group beta {s.beta} differs from series beta {self.beta}")
            if not s.is_zero():
                alpha = as_frequency(alpha)
                clean[alpha] = clean[alpha] + s if alpha in clean else s
        self.groups = {a: s for a, s in clean.items() if not s.is_zero()}

    @classmethod
    def from_series(cls, s: RationalSeries, alpha=0) -> OscSeries:
        return cls({as_frequency(alpha): s}, s.beta)

    @classmethod
    def zero(cls, beta: float = DEFAULT_BETA) -> OscSeries:
        return cls(None, beta)

    @classmethod
    def term(cls, j: int, alpha=0, coeff: complex = 1.0, beta: float = DEFAULT_BETA) -> OscSeries:
        return cls({as_frequency(alpha): RationalSeries({j: coeff}, beta)}, beta)

    # -- views ----------------------------------------------------------------
    @property
    def frequencies(self) -> list[Fraction]:
        return sorted(self.groups)

    def group(self, alpha) -> RationalSeries:
        return self.groups.get(as_frequency(alpha), RationalSeries.zero(self.beta))

    def is_zero(self) -> bool:
        return not self.groups

    @property
    def nnz(self) -> int:
        return sum(s.nnz for s in self.groups.values())

    def max_abs_index(self) -> int:
        return max((s.max_abs_index() for s in self.groups.values()), default=0)

    def max_abs(self) -> float:
        return max((s.max_abs() for s in self.groups.values()), default=0.0)

    def terms(self):
        """Iterate ``(alpha, j, coeff)`` over nonzero terms, sorted by frequency then index."""
        for alpha in self.frequencies:
            for j, a in self.groups[alpha].coeffs.items():
                yield alpha, j, a

    # -- algebra --------------------------------------------------------------
    def _same_beta(self, other: OscSeries) -> None:
        if other.beta != self.beta:
            raise ParameterError(f"mismatched beta: {self.beta} vs {other.beta}")

    def __add__(self, other):
        if isinstance(other, Number) and other == 0:
            return self
        if isinstance(other, RationalSeries):
            other = OscSeries.from_series(other)
        if not isinstance(other, OscSeries):
            return NotImplemented
        self._same_beta(other)
        groups = dict(self.groups)
        for a, s in other.groups.items():
            groups[a] = groups[a] + s if a in groups else s
        return OscSeries(groups, self.beta)

    __radd__ = __add__

    def __neg__(self):
        return OscSeries({a: -s for a, s in self.groups.items()}, self.beta)

    def __sub__(self, other):
        if isinstance(other, RationalSeries):
            other = OscSeries.from_series(other)
        if not isinstance(other, OscSeries):
            return NotImplemented
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, RationalSeries):
            other = OscSeries.from_series(other)
        if isinstance(other, OscSeries):
            return multiply_osc(self, other)
        if isinstance(other, Number):
            if other == 0:
                return OscSeries.zero(self.beta)
            return OscSeries({a: s * other for a, s in self.groups.items()}, self.beta)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, Number):
            return self * other
        return NotImplemented

    def __truediv__(self, other):
        if isinstance(other, Number):
            return self * (1 / complex(other))
        return NotImplemented

    def shift(self, alpha) -> OscSeries:
        """Multiply by ``exp(i alpha z)``."""
        alpha = as_frequency(alpha)
        return OscSeries({a + alpha: s for a, s in self.groups.items()}, self.beta)

    def truncate(self, tol: float) -> OscSeries:
        if tol <= 0:
            return self
        return OscSeries({a: s.truncate(tol) for a, s in self.groups.items()}, self.beta)

    def conj(self) -> OscSeries:
        return conjugate_osc(self)

    def allclose(self, other: OscSeries, atol: float = 1e-13) -> bool:
        return self.beta == other.beta and (self - other).max_abs() <= atol

    def __eq__(self, other):
        if not isinstance(other, OscSeries):
            return NotImplemented
        return (self.beta == other.beta and self.groups.keys() == other.groups.keys()
                and all(self.groups[a] == other.groups[a] for a in self.groups))

    __hash__ = None

    def __call__(self, z):
        return eval_osc(self, z)

    def __repr__(self):
        parts = ", ".join(f"{a}: {s!r}" for a, s in sorted(self.groups.items()))
        return f"OscSeries({{{parts}}}, beta={self.beta:g})"


def _as_osc(s) -> OscSeries:
    return OscSeries.from_series(s) if isinstance(s, RationalSeries) else s


def eval_osc(s: OscSeries, z):
    """Pointwise value ``sum_alpha exp(i alpha z) s_alpha(z)``; 0 at infinity."""
    scalar = np.ndim(z) == 0
    zz = np.atleast_1d(np.asarray(z, dtype=complex)).ravel()
    out = np.zeros(zz.size, dtype=complex)
    fin = ~np.isinf(zz)
    for alpha, grp in s.groups.items():
        vals = eval_series(grp, zz)
        if alpha != 0:
            vals[fin] *= np.exp(1j * float(alpha) * zz[fin])
        out += vals
    return complex(out[0]) if scalar else out


def multiply_osc(s1: OscSeries, s2: OscSeries) -> OscSeries:
    """Product using ``R_{j,a1} R_{k,a2} = R_{j+k,a1+a2} - R_{j,a1+a2} - R_{k,a1+a2}``."""
    s1, s2 = _as_osc(s1), _as_osc(s2)
    s1._same_beta(s2)
    groups: dict[Fraction, RationalSeries] = {}
    for a1, g1 in s1.groups.items():
        for a2, g2 in s2.groups.items():
            p = multiply(g1, g2)
            a = a1 + a2
            groups[a] = groups[a] + p if a in groups else p
    return OscSeries(groups, s1.beta)


def conjugate_osc(s: OscSeries) -> OscSeries:
    """Conjugate on the real line: ``a R_{j,alpha} -> conj(a) R_{-j,-alpha}``."""
    s = _as_osc(s)
    return OscSeries({-a: conjugate(g) for a, g in s.groups.items()}, s.beta)


def _residue_correction(grp: RationalSeries, alpha: Fraction) -> RationalSeries:
    """Zero-frequency series ``sum_j a_j sum_n eta^j_n R_{sigma n}`` over the decaying terms.

    For ``alpha > 0`` the decaying terms are ``j < 0`` (sigma = -1), for ``alpha < 0``
    they are ``j > 0``.
    """
    beta = grp.beta
    if alpha > 0:
        if grp.lo >= 0:
            return RationalSeries.zero(beta)
        # A[J] = a_{-J}, J = 0..Jmax
        stop = min(grp.hi, -1)
        A = np.zeros(-grp.lo + 1, dtype=complex)
        A[-stop:] = grp.dense[:stop - grp.lo + 1][::-1]
        sigma = -1
    else:
        if grp.hi <= 0:
            return RationalSeries.zero(beta)
        start = max(grp.lo, 1)
        A = np.zeros(grp.hi + 1, dtype=complex)
        A[start:] = grp.dense[start - grp.lo:]
        sigma = 1
    Jmax = A.size - 1
    E = special.eta_kernel(abs(alpha), beta, Jmax)
    # c[n] = sum_L A[n + L] E[L]
    c = _convolve(A[::-1], E)[Jmax::-1][:Jmax + 1]
    if sigma > 0:
        return RationalSeries.from_dense(0, c, beta)
    return RationalSeries.from_dense(-Jmax, c[::-1], beta)


def cauchy_plus_osc(s: OscSeries) -> OscSeries:
    """Boundary value from above of the Cauchy integral, term by term."""
    s = _as_osc(s)
    groups: dict[Fraction, RationalSeries] = {}

    def add(a, g):
        if not g.is_zero():
            groups[a] = groups[a] + g if a in groups else g

    for alpha, grp in s.groups.items():
        if alpha == 0:
            add(alpha, cauchy_plus(grp))
        elif alpha > 0:
            add(alpha, grp)
            add(Fraction(0), _residue_correction(grp, alpha))
        else:
            add(Fraction(0), -_residue_correction(grp, alpha))
    return OscSeries(groups, s.beta)


def cauchy_minus_osc(s: OscSeries) -> OscSeries:
    """Boundary value from below of the Cauchy integral, term by term."""
    s = _as_osc(s)
    groups: dict[Fraction, RationalSeries] = {}

    def add(a, g):
        if not g.is_zero():
            groups[a] = groups[a] + g if a in groups else g

    for alpha, grp in s.groups.items():
        if alpha == 0:
            add(alpha, cauchy_minus(grp))
        elif alpha > 0:
            add(Fraction(0), _residue_correction(grp, alpha))
        else:
            add(alpha, -grp)
            add(Fraction(0), -_residue_correction(grp, alpha))
    return OscSeries(groups, s.beta)


def I_integral(j: int, alpha, beta: float = DEFAULT_BETA) -> float:
    """Principal-value integral of ``R_{j,alpha}`` over the real line."""
    return special.I_integral(j, as_frequency(alpha), beta)


def osc_pv_integral(s: OscSeries) -> complex:
    """Principal-value integral ``sum a_{j,alpha} I_{j,alpha}``."""
    s = _as_osc(s)
    total = 0j
    for alpha, grp in s.groups.items():
        if grp.is_zero():
            continue
        total += complex(np.dot(special.I_values(alpha, s.beta, grp.lo, grp.hi), grp.dense))
    return total


def inner_osc(s1: OscSeries, s2: OscSeries) -> complex:
    """``int s1 conj(s2) dx``, linear in the first argument."""
    s1, s2 = _as_osc(s1), _as_osc(s2)
    s1._same_beta(s2)
    return osc_pv_integral(multiply_osc(s1, conjugate_osc(s2)))


def norm_osc(s: OscSeries) -> float:
    return float(np.sqrt(max(inner_osc(s, s).real, 0.0)))


def fourier_transform(s: RationalSeries, alpha):
    """``int exp(-i alpha x) f(x) dx`` for the function represented by ``s``.

    ``alpha`` may be a scalar or an array of (float) frequencies.
    """
    if isinstance(s, OscSeries):
        if set(s.groups) - {Fraction(0)}:
            raise ParameterError("fourier_transform expects a zero-frequency series")
        s = s.group(0)
    scalar = np.ndim(alpha) == 0
    alphas = [alpha] if scalar else list(np.ravel(alpha))
    out = np.zeros(len(alphas), dtype=complex)
    if not s.is_zero():
        for k, a in enumerate(alphas):
            out[k] = np.dot(special.I_values(-as_frequency(a), s.beta, s.lo, s.hi), s.dense)
    return complex(out[0]) if scalar else out
