import math
import threading
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.special import eval_genlaguerre

from oracles import quad_real_line, residue_oracle
from oscrhp import ConvergenceError, DomainError, ParameterError, RationalSeries, eval_series, special


@pytest.fixture
def fresh_caches():
    special.clear_caches()
    yield
    special.clear_caches()
    special.set_precision_cap(special.PRECISION_CAP)


# -- gamma ------------------------------------------------------------------------

@pytest.mark.parametrize("alpha", [-0.5, -1, -3])
def test_gamma_first_index(alpha):
    assert special.gamma_coeff(1, 1, alpha) == pytest.approx(-math.exp(alpha), rel=1e-15)


@pytest.mark.parametrize("j,alpha", [(2, -1.5), (-2, 0.7)])
def test_gamma_second_index_closed_form(j, alpha):
    sa = math.copysign(1, j) * alpha
    assert special.gamma_coeff(j, 1, alpha) == pytest.approx(-2 * math.exp(sa) * (1 + sa), rel=1e-14)


@pytest.mark.parametrize("j", [1, 3, 7, -5, 12])
@pytest.mark.parametrize("alpha", [-2.0, -0.25])
def test_gamma_routes_agree(j, alpha):
    alpha = alpha if j > 0 else -alpha
    for n in range(1, abs(j) + 1):
        a = special.gamma_coeff(j, n, alpha)
        b = special.gamma_coeff_1f1(j, n, alpha)
        assert a == pytest.approx(b, rel=1e-13)


def test_hyp1f1_terminates():
    assert float(special.hyp1f1_negint(0, 2, 5)) == 1
    assert float(special.hyp1f1_negint(1, 2, -2)) == pytest.approx(2)
    with mpmath.workdps(30):
        assert special.hyp1f1_negint(6, 3, mpmath.mpf("1.7")) == pytest.approx(float(mpmath.hyp1f1(-6, 3, 1.7)))


def test_gamma_domain():
    with pytest.raises(DomainError):
        special.gamma_coeff(2, 1, 1.0)
    with pytest.raises(DomainError):
        special.gamma_coeff(-2, 1, -1.0)
    with pytest.raises(ParameterError):
        special.gamma_coeff(3, 4, -1.0)


# -- eta --------------------------------------------------------------------------

def test_eta_first_index():
    t = special.eta_table(1, -1)
    assert t.eta[0] == pytest.approx(-math.exp(-1), rel=1e-16)


@pytest.mark.parametrize("j,alpha", [(5, Fraction(-2)), (-7, Fraction(1, 2)), (11, Fraction(-3)), (-20, Fraction(1))])
def test_eta_reconstruction_matches_residue(j, alpha):
    t = special.eta_table(j, alpha)
    sigma = 1 if j > 0 else -1
    ser = RationalSeries({sigma * n: t.eta[n - 1] for n in range(1, abs(j) + 1)})
    for z in (0.3 + 0.1j, -2 + 0.5j, 1 - 3j):
        ref = residue_oracle(j, alpha, 1.0, z)
        assert abs(eval_series(ser, z) - ref) <= 1e-10 * abs(ref)


def test_eta_table_is_cached_and_records_precision(fresh_caches):
    t1 = special.eta_table(9, Fraction(-2))
    assert t1.precision_bits_used >= special.START_BITS
    assert special.eta_table(9, Fraction(-2)) is t1


def test_naive_double_precision_loses_digits():
    exact = special.eta_table(40, Fraction(-2)).eta
    naive = special.eta_naive_double(40, -2.0)
    rel = np.max(np.abs(naive - exact) / np.abs(exact))
    assert rel > 1e-10  # more than six of sixteen digits gone


@pytest.mark.parametrize("abs_alpha", [Fraction(1, 3), Fraction(1), Fraction(5, 2)])
def test_kernel_matches_lemma_route(abs_alpha):
    E = special.eta_kernel(abs_alpha, 1.0, 25)
    for j in (25, -25):
        alpha = -abs_alpha if j > 0 else abs_alpha
        eta = special.eta_table(j, alpha).eta
        # eta[n-1] depends only on |j| - n
        expected = E[25 - np.arange(1, 26)]
        assert np.allclose(eta, expected, rtol=1e-12, atol=1e-15 * np.abs(eta).max())


# -- Laguerre functions and I ----------------------------------------------------------

def test_laguerre_recurrence_against_scipy_and_series():
    x = 2 * 1.5
    table = special.laguerre_table(Fraction(3, 2), 1.0, 30)
    for J in range(1, 31):
        ref = math.exp(-x / 2) * eval_genlaguerre(J - 1, 1, x)
        assert table[J] == pytest.approx(ref, rel=1e-10, abs=1e-14)
        with mpmath.workdps(50):
            assert table[J] == pytest.approx(float(special.laguerre_1f1(J, mpmath.mpf(x))), rel=1e-12, abs=1e-14)


def test_laguerre_exact_zero_is_resolved(fresh_caches):
    # x = 2 is the root of L^(1)_1, so the table contains an exact zero
    table = special.laguerre_table(Fraction(1), 1.0, 5)
    assert abs(table[2]) < 1e-30


def test_I_examples():
    assert special.I_integral(1, 2, 1) == 0
    assert special.I_integral(3, 0, 1) == pytest.approx(-6 * math.pi)
    assert special.I_integral(-1, 1, 1) == pytest.approx(-4 * math.pi * math.exp(-1), rel=1e-15)
    assert special.I_integral(-1, 1, 2.0) == pytest.approx(-8 * math.pi * math.exp(-2), rel=1e-15)


@given(st.integers(-30, 30).filter(bool), st.fractions(-4, 4, max_denominator=8))
def test_I_conjugation_symmetry(j, alpha):
    assert special.I_integral(j, alpha) == pytest.approx(special.I_integral(-j, -alpha), rel=1e-14, abs=1e-300)


@pytest.mark.parametrize("j,alpha", [(-3, 1.0), (2, -0.5), (-1, 2.0), (4, -1.5)])
def test_I_against_oscillatory_quadrature(j, alpha):
    s = RationalSeries({j: 1.0, -j: 1.0})
    ref = quad_real_line(lambda x: eval_series(s, x), oscillation=alpha)
    val = special.I_integral(j, Fraction(alpha)) + special.I_integral(-j, Fraction(alpha))
    assert abs(val - ref) < 1e-8


# -- precision control -------------------------------------------------------------

def test_precision_cap_validation_and_exhaustion(fresh_caches):
    with pytest.raises(ParameterError):
        special.set_precision_cap(64)
    special.set_precision_cap(128)
    with pytest.raises(ConvergenceError):
        special.eta_table(6, Fraction(-1, 3))


def test_adaptive_doubles_until_agreement():
    calls = []

    def fn(bits):
        calls.append(bits)
        return [mpmath.mpf(1) / 3]

    vals, bits = special.adaptive(fn)
    assert bits == 2 * special.START_BITS and calls == [128, 256]


def test_concurrent_table_builds_agree(fresh_caches):
    results = []

    def work():
        results.append(special.eta_table(15, Fraction(-5, 2)).eta.copy())

    threads = [threading.Thread(target=work) for _ in range(6)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert all(np.array_equal(r, results[0]) for r in results)
