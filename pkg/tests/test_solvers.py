import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from conftest import fano_params, single_fb
from fano_cool.errors import ConvergenceFailure, StepTooLarge, UnstableDrift
from fano_cool.observables import linearize
from fano_cool.solvers import (
    StabilityMethod,
    char_poly,
    eigenvalues,
    integrate_covariance,
    lyapunov_residual,
    marginal_band,
    routh_hurwitz,
    solve_lyapunov,
    solve_lyapunov_kron,
    stability,
)


@pytest.fixture(scope="module")
def fig4_system():
    return linearize(fano_params(), single_fb(0.7)).dd


def _mp_lyapunov(M, N, dps=50):
    with mpmath.workdps(dps):
        n = M.shape[0]
        A = mpmath.matrix(n * n, n * n)
        b = mpmath.matrix(n * n, 1)
        for i in range(n):
            for j in range(n):
                row = i * n + j
                b[row] = -mpmath.mpf(float(N[i, j]))
                for k in range(n):
                    A[row, k * n + j] += mpmath.mpf(float(M[i, k]))
                    A[row, i * n + k] += mpmath.mpf(float(M[j, k]))
        x = mpmath.lu_solve(A, b)
        return np.array([[float(x[i * n + j]) for j in range(n)] for i in range(n)])


def test_scalar_lyapunov():
    V = solve_lyapunov(np.array([[-2.0]]), np.array([[3.0]]))
    assert V[0, 0] == pytest.approx(0.75, rel=1e-15)


def test_damped_oscillator_thermal_state():
    # x' = p, p' = -x - g p + noise: equipartition at the bath occupation
    g, n = 0.1, 5.0
    M = np.array([[0.0, 1.0], [-1.0, -g]])
    N = np.diag([0.0, g * (2 * n + 1)])
    V = solve_lyapunov(M, N)
    assert np.allclose(V, (n + 0.5) * np.eye(2), rtol=1e-12, atol=1e-12)


def test_unstable_drift_raises():
    with pytest.raises(UnstableDrift):
        solve_lyapunov(np.array([[0.1, 0.0], [0.0, -1.0]]), np.eye(2))


def test_fig4_lyapunov_against_mpmath(fig4_system):
    M, N = fig4_system.M, fig4_system.N
    V = solve_lyapunov(M, N)
    ref = _mp_lyapunov(M, N)
    for i in (4, 5):
        assert V[i, i] == pytest.approx(ref[i, i], rel=1e-9)
    # frozen high-precision values for the mechanical variances
    assert ref[4, 4] == pytest.approx(1.0461613073686884, rel=1e-12)
    assert ref[5, 5] == pytest.approx(1.044332118646424, rel=1e-12)
    assert lyapunov_residual(M, V, N) <= 1e-9


def test_fig4_kron_matches_schur(fig4_system):
    V1 = solve_lyapunov(fig4_system.M, fig4_system.N)
    V2 = solve_lyapunov_kron(fig4_system.M, fig4_system.N)
    for i in (4, 5):
        assert V1[i, i] == pytest.approx(V2[i, i], rel=1e-8)


def test_fig4_eigenvalues_match_exact_char_poly_roots(fig4_system):
    M = fig4_system.M
    coeffs = char_poly(M, exact=True)
    with mpmath.workdps(60):
        roots = mpmath.polyroots([mpmath.mpf(c.numerator) / c.denominator for c in coeffs], maxsteps=400, extraprec=400)
        ref = np.array([complex(r) for r in roots])
    ev = eigenvalues(M)
    scale = np.abs(ref).max()
    for z in ref:
        assert np.min(np.abs(ev - z)) <= 1e-8 * scale


def test_solution_symmetric_exactly():
    rng = np.random.default_rng(3)
    A = rng.normal(size=(5, 5))
    M = A - (np.linalg.eigvals(A).real.max() + 1.0) * np.eye(5)
    B = rng.normal(size=(5, 5))
    V = solve_lyapunov(M, B @ B.T)
    assert np.array_equal(V, V.T)
    assert np.array_equal(solve_lyapunov_kron(M, B @ B.T), solve_lyapunov_kron(M, B @ B.T).T)


def test_rk4_fixed_point_and_zero_drift():
    M = np.array([[-1.0, 0.5], [-0.5, -2.0]])
    N = np.array([[2.0, 0.3], [0.3, 1.0]])
    V = solve_lyapunov(M, N)
    out = integrate_covariance(M, N, V, t_final=3.0, dt=0.01)
    assert np.allclose(out, V, rtol=1e-13, atol=1e-14)
    # M = 0: V(t) = V0 + t N exactly
    Z = np.zeros((2, 2))
    out = integrate_covariance(Z, N, np.eye(2), t_final=2.5, dt=0.1)
    assert np.allclose(out, np.eye(2) + 2.5 * N, rtol=1e-14)


def test_rk4_step_guard():
    M = np.diag([-100.0, -1.0])
    with pytest.raises(StepTooLarge):
        integrate_covariance(M, np.eye(2), np.eye(2), 1.0, 0.01)
    with pytest.raises(StepTooLarge):
        integrate_covariance(M, np.eye(2), np.eye(2), 1.0, -1.0)


def test_rk4_lands_on_t_final():
    # scalar case has the closed form V(t) = V_inf + (V0 - V_inf) e^{2 m t}
    m, n = -1.0, 4.0
    out = integrate_covariance(np.array([[m]]), np.array([[n]]), np.array([[0.0]]), t_final=1.234, dt=0.05)
    exact = -n / (2 * m) * (1 - math.exp(2 * m * 1.234))
    assert out[0, 0] == pytest.approx(exact, rel=1e-6)


def test_rk4_convergence_rate():
    M = np.array([[-0.3, 1.0], [-1.0, -0.3]])
    N = np.diag([0.5, 1.5])
    V_inf = solve_lyapunov(M, N)
    times = np.linspace(2.0, 12.0, 6)
    errs = [np.linalg.norm(integrate_covariance(M, N, np.zeros((2, 2)), t, 0.01) - V_inf) for t in times]
    slope = np.polyfit(times, np.log(errs), 1)[0]
    expected = 2 * eigenvalues(M).real.max()
    assert abs(slope - expected) <= 0.2 * abs(expected)


def test_eigenvalue_guards():
    with pytest.raises(ValueError):
        eigenvalues(np.eye(9))
    with pytest.raises(ValueError):
        eigenvalues(np.ones((2, 3)))
    with pytest.raises(ConvergenceFailure):
        eigenvalues(np.array([[np.nan, 0.0], [0.0, 1.0]]))


def test_char_poly_known():
    M = np.array([[0.0, 1.0], [-2.0, -3.0]])
    assert char_poly(M) == pytest.approx([1.0, 3.0, 2.0])
    exact = char_poly(M, exact=True)
    assert exact == [1, 3, 2] and all(isinstance(c, Fraction) for c in exact)


@pytest.mark.parametrize(
    "coeffs, stable, marginal",
    [
        ([1, 3, 3, 1], True, False),  # (s+1)^3
        ([1, 1, 1, 1], False, True),  # (s+1)(s^2+1)
        ([1, -1, 1], False, False),
        ([1, 2, 3, 4, 5], False, False),
        ([1, 10, 35, 50, 24], True, False),  # roots -1..-4
        ([1, 0, 1], False, True),
    ],
)
def test_routh_hurwitz_examples(coeffs, stable, marginal):
    v = routh_hurwitz([Fraction(c) for c in coeffs])
    assert v.stable is stable
    assert v.marginal is marginal
    fv = routh_hurwitz([float(c) for c in coeffs])
    assert fv.marginal is marginal
    if not marginal:
        assert fv.stable is stable


def test_stability_methods_agree_on_fig4(fig4_system):
    M = fig4_system.M
    e = stability(M, "eigenvalue")
    r = stability(M, StabilityMethod.ROUTH_HURWITZ)
    b = stability(M, "both")
    assert e.stable and r.stable and b.stable
    assert b.method is StabilityMethod.BOTH
    assert marginal_band(M) == pytest.approx(1e-9 * np.linalg.norm(M))


def test_unstable_verdict():
    v = stability(np.array([[0.5, 0.0], [0.0, -1.0]]), "both")
    assert not v.stable and v.max_real_eigenvalue == pytest.approx(0.5)
    assert not v.marginal


@settings(max_examples=200, deadline=None)
@given(
    arrays(np.float64, (4, 4), elements=st.floats(-3, 3)),
    st.floats(-1.5, 1.5),
)
def test_routh_hurwitz_agrees_with_eigenvalues(A, shift):
    M = A + shift * np.eye(4)
    max_re = np.linalg.eigvals(M).real.max()
    if abs(max_re) < marginal_band(M):
        return
    v = routh_hurwitz(char_poly(M, exact=True))
    assert v.stable == (max_re < 0)
