"""Extended-precision residue coefficients and oscillatory integrals.

Everything here is evaluated with mpmath at a working precision that is doubled until
two successive levels agree, then rounded to double.  Results are memoized in
process-wide tables guarded by a lock.

Notation: for a basis term ``R_{j,alpha}`` with ``sigma = sign(j)`` the residue
coefficients only appear when ``sigma * alpha < 0``; in that regime everything depends
on ``x = 2 |alpha| beta`` and on the generalized Laguerre functions
``l(J) = exp(-x/2) L^{(1)}_{J-1}(x)``.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from fractions import Fraction

import mpmath
import numpy as np

from .errors import ConvergenceError, DomainError, ParameterError

START_BITS = 128
PRECISION_CAP = 4096
AGREEMENT_RTOL = 1e-16
# entries this far below the largest one only need to agree in absolute terms; exact
# zeros (e.g. x at a Laguerre root) otherwise never settle in relative error
ZERO_FLOOR = 1e-40

_lock = threading.RLock()
_precision_cap = PRECISION_CAP


def set_precision_cap(bits: int) -> None:
    """Upper bound on the working precision used by the adaptive evaluations."""
    global _precision_cap
    if bits < START_BITS:
        raise ParameterError(f"precision cap must be >= {START_BITS} bits")
    _precision_cap = int(bits)


def get_precision_cap() -> int:
    return _precision_cap


def _mpf(value) -> mpmath.mpf:
    if isinstance(value, Fraction):
        return mpmath.mpf(value.numerator) / value.denominator
    return mpmath.mpf(value)


def _agree(a, b, rtol: float) -> bool:
    floor = ZERO_FLOOR * max((abs(v) for v in b), default=0)
    return all(abs(u - v) <= rtol * max(abs(v), floor) for u, v in zip(a, b))


def adaptive(fn, *, start_bits: int = START_BITS, cap: int | None = None,
             rtol: float = AGREEMENT_RTOL):
    """Evaluate ``fn(bits) -> sequence of mp numbers`` at doubling precision.

    Returns ``(values, bits)`` for the first level that agrees with the previous one to
    ``rtol`` elementwise.  Raises :class:`ConvergenceError` past the cap.
    """
    cap = cap or _precision_cap
    bits = start_bits
    with mpmath.workprec(bits):
        prev = list(fn(bits))
    while True:
        bits *= 2
        if bits > cap:
            raise ConvergenceError(f"no agreement to {rtol:g} below {cap} bits")
        with mpmath.workprec(bits):
            cur = list(fn(bits))
        if _agree(prev, cur, rtol):
            return cur, bits
        prev = cur


# -- gamma / eta through the residue lemma ---------------------------------------------

def _decaying(j: int, alpha) -> int:
    if j == 0:
        raise ParameterError("j must be nonzero")
    sigma = 1 if j > 0 else -1
    if not sigma * alpha < 0:
        raise DomainError("residue coefficients need sign(j) * alpha < 0")
    return sigma


def _gamma_sum(J: int, n: int, sa: mpmath.mpf, beta: mpmath.mpf) -> mpmath.mpf:
    # sa = sigma * alpha
    y = 2 * beta * sa
    total = mpmath.mpf(0)
    term_scale = mpmath.binomial(J - 1, J - n) * mpmath.factorial(n - 1)
    for k in range(J - n + 1):
        total += mpmath.binomial(J - n, k) / mpmath.factorial(n + k) * y ** k
    return -J * mpmath.exp(sa * beta) * term_scale * total


def gamma_coeff(j: int, n: int, alpha, beta: float = 1.0, precision: int | None = None) -> float:
    """Coefficient ``gamma^j_n`` of the residue at ``s = -sigma i beta`` (``1 <= n <= |j|``).

    Uses the double sum obtained by differentiating ``exp(i alpha s)(s - sigma i beta)^|j|``.
    With ``precision=None`` the precision is chosen adaptively.
    """
    sigma = _decaying(j, alpha)
    J = abs(j)
    if not 1 <= n <= J:
        raise ParameterError(f"n must lie in 1..{J}")

    def run(_bits):
        return [_gamma_sum(J, n, sigma * _mpf(alpha), _mpf(beta))]

    if precision is not None:
        with mpmath.workprec(precision):
            return float(run(precision)[0])
    vals, _ = adaptive(run)
    return float(vals[0])


def gamma_coeff_1f1(j: int, n: int, alpha, beta: float = 1.0, precision: int = 256) -> float:
    """Same coefficient through ``1F1(n - |j|, 1 + n, -2 sigma alpha beta)``.

    The binomial factor is ``C(|j| - 1, n - 1)``, which is what the double sum reduces to.
    """
    sigma = _decaying(j, alpha)
    J = abs(j)
    with mpmath.workprec(precision):
        sa = sigma * _mpf(alpha)
        b = _mpf(beta)
        f = hyp1f1_negint(J - n, 1 + n, -2 * sa * b)
        return float(-mpmath.mpf(J) / n * mpmath.exp(sa * b) * mpmath.binomial(J - 1, n - 1) * f)


def hyp1f1_negint(m: int, b: int, z) -> mpmath.mpf:
    """``1F1(-m, b, z)`` for a nonnegative integer ``m``: a terminating series."""
    term = mpmath.mpf(1)
    total = mpmath.mpf(1)
    for k in range(m):
        term *= mpmath.mpf(k - m) / ((b + k) * (k + 1)) * z
        total += term
    return total


def _eta_from_gammas(J: int, sa, beta) -> list:
    g = [None] + [_gamma_sum(J, k, sa, beta) for k in range(1, J + 1)]
    return [mpmath.fsum((-1) ** (n + k) * mpmath.binomial(k, n) * g[k] for k in range(n, J + 1))
            for n in range(1, J + 1)]


@dataclass(frozen=True)
class EtaTable:
    """``eta^j_n`` for ``n = 1..|j|``; entry ``eta[n-1]``."""

    j: int
    alpha: Fraction
    beta: float
    eta: np.ndarray
    precision_bits_used: int


_eta_cache: dict[tuple, EtaTable] = {}


def eta_table(j: int, alpha, beta: float = 1.0) -> EtaTable:
    """Residue coefficients of ``R_{j,alpha}`` mapped onto ``R_{sigma n, 0}``.

    Computed from the gamma coefficients entirely in extended precision; cached per
    ``(j, alpha, beta)``.
    """
    alpha = Fraction(alpha)
    sigma = _decaying(j, alpha)
    key = (j, alpha, float(beta))
    with _lock:
        hit = _eta_cache.get(key)
        if hit is not None:
            return hit
        J = abs(j)
        vals, bits = adaptive(lambda _b: _eta_from_gammas(J, sigma * _mpf(alpha), _mpf(beta)))
        table = EtaTable(j, alpha, float(beta), np.array([float(v) for v in vals]), bits)
        _eta_cache[key] = table
        return table


def eta_naive_double(j: int, alpha: float, beta: float = 1.0) -> np.ndarray:
    """The same sums in plain double precision (for demonstrating the cancellation)."""
    sigma = _decaying(j, alpha)
    J = abs(j)
    y = 2 * beta * sigma * alpha
    g = [0.0]
    for n in range(1, J + 1):
        tot = sum(math.comb(J - n, k) / math.factorial(n + k) * y ** k for k in range(J - n + 1))
        g.append(-J * math.exp(sigma * alpha * beta) * math.comb(J - 1, J - n) * math.factorial(n - 1) * tot)
    return np.array([sum((-1) ** (n + k) * math.comb(k, n) * g[k] for k in range(n, J + 1))
                     for n in range(1, J + 1)])


# -- Laguerre-function tables (hot path) --------------------------------------------------

def _laguerre_functions(x: mpmath.mpf, count: int) -> list:
    """``exp(-x/2) L^{(1)}_{J-1}(x)`` for ``J = 1..count`` by the three-term recurrence."""
    out = []
    p_prev, p = mpmath.mpf(0), mpmath.mpf(1)  # L_{-1}, L_0 with a = 1
    for k in range(count):
        out.append(p)
        # (k+1) L_{k+1} = (2k + 2 - x) L_k - (k + 1) L_{k-1}
        p_prev, p = p, ((2 * k + 2 - x) * p - (k + 1) * p_prev) / (k + 1)
    scale = mpmath.exp(-x / 2)
    return [v * scale for v in out]


def laguerre_1f1(J: int, x) -> mpmath.mpf:
    """``exp(-x/2) 1F1(1 - J, 2, x) * J`` via the direct series (cross-check route)."""
    return mpmath.exp(-x / 2) * J * hyp1f1_negint(J - 1, 2, x)


_ell_cache: dict[tuple, tuple[np.ndarray, int]] = {}


def laguerre_table(abs_alpha: Fraction, beta: float, count: int) -> np.ndarray:
    """Array ``t`` with ``t[J] = exp(-x/2) L^{(1)}_{J-1}(x)``, ``x = 2|alpha| beta``, ``J <= count``.

    ``t[0]`` is unused (0).  Cached and grown geometrically.
    """
    key = (Fraction(abs_alpha), float(beta))
    with _lock:
        hit = _ell_cache.get(key)
        if hit is not None and hit[0].size > count:
            return hit[0]
        size = max(count, 2 * (hit[0].size - 1) if hit else 0, 32)

        def run(_bits):
            x = 2 * _mpf(key[0]) * _mpf(key[1])
            return _laguerre_functions(x, size)

        vals, bits = adaptive(run)
        arr = np.zeros(size + 1)
        arr[1:] = [float(v) for v in vals]
        _ell_cache[key] = (arr, bits)
        return arr


def eta_kernel(abs_alpha: Fraction, beta: float, count: int) -> np.ndarray:
    """``E[L] = eta^j_n`` for ``L = |j| - n = 0..count`` (it only depends on the offset).

    ``E[0] = -exp(-x/2)`` and ``E[L] = (x/L) exp(-x/2) L^{(1)}_{L-1}(x)`` for ``L >= 1``.
    """
    ell = laguerre_table(abs_alpha, beta, max(count, 1))
    x = 2 * float(abs_alpha) * beta
    E = np.empty(count + 1)
    E[0] = -ell[1]
    L = np.arange(1, count + 1)
    E[1:] = x / L * ell[1:count + 1]
    return E


def I_values(alpha, beta: float, lo: int, hi: int) -> np.ndarray:
    """``I_{j,alpha}`` (principal-value integral of ``R_{j,alpha}``) for ``j = lo..hi``."""
    alpha = Fraction(alpha)
    j = np.arange(lo, hi + 1)
    out = np.zeros(j.size)
    if j.size == 0:
        return out
    if alpha == 0:
        out[:] = -2 * np.pi * np.abs(j) * beta
        return out
    # only terms with sign(j) = -sign(alpha) survive
    mask = j < 0 if alpha > 0 else j > 0
    if mask.any():
        J = np.abs(j[mask])
        ell = laguerre_table(abs(alpha), beta, int(J.max()))
        out[mask] = -4 * np.pi * beta * ell[J]
    return out


def I_integral(j: int, alpha, beta: float = 1.0) -> float:
    """Principal-value integral of ``exp(i alpha z) (M(z)^j - 1)`` over the real line."""
    if j == 0:
        return 0.0
    return float(I_values(alpha, beta, j, j)[0])


def clear_caches() -> None:
    with _lock:
        _eta_cache.clear()
        _ell_cache.clear()
