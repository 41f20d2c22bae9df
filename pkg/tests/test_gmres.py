import numpy as np
import pytest
from hypothesis import given, strategies as st

from oscrhp import JumpSpec, LinearProblem, ParameterError, RationalSeries, formulate, gmres, inner
from oscrhp.gmres import arnoldi_step, givens_update, solution, start, true_residual
from strategies import random_series, rank_k_operator


def vector_problem(A, b):
    return LinearProblem(lambda v: A @ v, lambda u, v: complex(np.vdot(v, u)), b)


def rank_k_problem(k, seed):
    rng = np.random.default_rng(seed)
    return LinearProblem(rank_k_operator(rng, k), inner, random_series(rng, 8, 6))


def test_identity_converges_in_one_step():
    rhs = RationalSeries({1: 1.0, -2: 0.5j})
    res = gmres(LinearProblem(lambda u: u, inner, rhs), tol=1e-12, trunc_tol=0)
    assert res.iterations == 1 and res.converged
    assert res.solution.allclose(rhs, 1e-14)


@pytest.mark.parametrize("k", [1, 2, 3])
@pytest.mark.parametrize("seed", [0, 1, 2])
def test_finite_rank_perturbation(k, seed):
    problem = rank_k_problem(k, seed)
    res = gmres(problem, tol=1e-12, trunc_tol=0)
    assert res.converged and res.iterations <= k + 1
    assert true_residual(problem, res.solution) < 1e-11


@given(st.integers(2, 8), st.integers(0, 1000))
def test_dense_matrix_agrees_with_direct_solve(n, seed):
    rng = np.random.default_rng(seed)
    A = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)) + 3 * n * np.eye(n)
    b = rng.normal(size=n) + 1j * rng.normal(size=n)
    res = gmres(vector_problem(A, b), tol=1e-13, trunc_tol=0, max_iter=n + 2)
    assert res.iterations <= n
    assert np.allclose(res.solution, np.linalg.solve(A, b), atol=1e-10)


def test_residuals_match_dense_least_squares():
    form = formulate(JumpSpec("nls", rho=RationalSeries({-1: 0.45})), "none")
    res = gmres(form.problem, tol=1e-9, max_iter=20)
    state = res.state
    m = state.size
    H = np.zeros((m + 1, m), dtype=complex)
    for k, col in enumerate(state.hessenberg):
        H[:k + 2, k] = col
    for step in range(1, m + 1):
        e1 = np.zeros(step + 1, dtype=complex)
        e1[0] = state.rhs_norm
        y, *_ = np.linalg.lstsq(H[:step + 1, :step], e1, rcond=None)
        dense = np.linalg.norm(e1 - H[:step + 1, :step] @ y) / state.rhs_norm
        assert res.residuals[step] == pytest.approx(dense, rel=1e-8, abs=1e-14)
    assert all(b <= a * (1 + 1e-12) for a, b in zip(res.residuals, res.residuals[1:]))


def test_arnoldi_orthogonality_and_subdiagonal():
    form = formulate(JumpSpec("scalar-sech"), "none")
    problem = form.problem
    state = start(problem)
    assert problem.inner(state.basis[0], state.basis[0]) == pytest.approx(1)
    for _ in range(10):
        arnoldi_step(state, problem, 1e-12)
        givens_update(state)
        h = state.hessenberg[-1][-1]
        assert h.imag == 0 and h.real >= 0
    Q = state.basis
    gram = np.array([[problem.inner(a, b) for b in Q] for a in Q])
    assert np.max(np.abs(gram - np.eye(len(Q)))) <= 1e-12


def test_single_step_residual_is_scalar_least_squares():
    A = np.array([[2.0, 1.0], [0.0, 1.0]])
    b = np.array([1.0, 1.0])
    p = vector_problem(A, b)
    state = start(p)
    arnoldi_step(state, p)
    r = givens_update(state)
    # minimize ||c A b - b|| over scalar c
    Ab = A @ b
    c = np.vdot(Ab, b) / np.vdot(Ab, Ab)
    assert r == pytest.approx(np.linalg.norm(c * Ab - b) / np.linalg.norm(b))
    assert np.allclose(solution(state), c * b)


def test_parameter_checks():
    p = LinearProblem(lambda u: u, inner, RationalSeries({1: 1.0}))
    with pytest.raises(ParameterError):
        gmres(p, tol=1e-12, trunc_tol=1e-12)
    with pytest.raises(ParameterError):
        gmres(p, max_iter=0)
    with pytest.raises(ParameterError):
        gmres(LinearProblem(lambda u: u, inner, RationalSeries()))


def test_callback_and_log():
    seen = []
    res = gmres(rank_k_problem(2, 5), tol=1e-12, trunc_tol=0, callback=lambda i, r, s: seen.append((i, r)))
    assert [i for i, _ in seen] == list(range(1, res.iterations + 1))
    lines = res.log_lines()
    assert lines[0] == "iter,residual" and lines[1] == "0,1.0"
    assert float(lines[-1].split(",")[1]) == res.residuals[-1]
    sol, hist = res
    assert hist is res.residuals


def test_non_convergence_reported():
    form = formulate(JumpSpec("scalar-sech"), "none")
    res = gmres(form.problem, tol=1e-10, max_iter=3)
    assert not res.converged and res.iterations == 3
