"""Embedded golden checks of closed-form limits, run by ``fano-cool selfcheck``."""

from __future__ import annotations

import math
from typing import Callable

import numpy as np

from .dynamics import diffusion_double, diffusion_single, drift_double, drift_single, normal_modes
from .errors import ValidationError
from .feedback import SteadyState, effective_double, effective_single, steady_state_double, steady_state_single
from .observables import final_phonon, physicality
from .params import (
    RATE_FIELDS,
    FeedbackConfig,
    PhysicalParams,
    PumpSide,
    PumpSpec,
    nondimensionalize,
    pump_amplitude,
    redimensionalize,
    validate,
)
from .solvers import eigenvalues, integrate_covariance, routh_hurwitz, solve_lyapunov

TWO_PI = 2.0 * math.pi


def _close(a, b, tol=1e-12) -> bool:
    return bool(np.allclose(a, b, rtol=tol, atol=tol))


def _set_equal(a, b, tol=1e-12) -> bool:
    a = sorted(np.asarray(a, dtype=complex), key=lambda z: (round(z.real, 9), round(z.imag, 9)))
    b = sorted(np.asarray(b, dtype=complex), key=lambda z: (round(z.real, 9), round(z.imag, 9)))
    return len(a) == len(b) and _close(a, b, tol)


_P = PhysicalParams(
    Omega_m=1.0, gamma_m=1e-3, kappa_1=0.8, kappa_2=0.3, kappa_f=0.5, lambda_=0.4,
    Delta_a=1.2, Delta_f=0.7, g_a0=1e-2, g_f0=-2e-2, n_m=10.0, eps_p=5.0,
)


def _validate_eta_one() -> bool:
    try:
        validate(_P, FeedbackConfig("double", eta=1.0))
    except ValidationError as exc:
        return [(e.name, e.value, e.constraint) for e in exc.errors] == [("eta", 1.0, "< 1")]
    return False


def _validate_ok() -> bool:
    validate(_P, FeedbackConfig("double", eta=0.5))
    return True


def _nondim_zero() -> bool:
    q = nondimensionalize(PhysicalParams(Omega_m=3.7))
    return q.Omega_m == 1.0 and all(getattr(q, f) == 0.0 for f in RATE_FIELDS if f != "Omega_m")


def _round_trip() -> bool:
    p = PhysicalParams(Omega_m=TWO_PI * 1.3e6, kappa_1=TWO_PI * 20e12, kappa_f=TWO_PI * 1.08e9, Delta_a=-3.3e7)
    back = redimensionalize(nondimensionalize(p))
    return all(math.isclose(getattr(back, f), getattr(p, f), rel_tol=1e-15, abs_tol=0.0) for f in RATE_FIELDS)


def _pump_zero() -> bool:
    return pump_amplitude(PumpSpec(0.0, 1e15), _P) == 0.0


def _pump_sides() -> bool:
    p = _P.replace(kappa_1=4.0, kappa_2=1.0)
    left = pump_amplitude(PumpSpec(1e-3, 1e15, PumpSide.LEFT), p)
    right = pump_amplitude(PumpSpec(1e-3, 1e15, PumpSide.RIGHT), p)
    return math.isclose(left / right, 2.0, rel_tol=1e-14)


def _double_no_feedback() -> bool:
    e = effective_double(_P, FeedbackConfig("double", eta=0.0, phi=1.1))
    return e.kappa_tot_eff == _P.kappa_tot and e.Delta_eff == _P.Delta_a


def _double_closed_form() -> bool:
    p = _P.replace(kappa_1=0.7, kappa_2=0.7)
    e = effective_double(p, FeedbackConfig("double", eta=0.81, phi=0.0))
    return math.isclose(e.kappa_tot_eff, 0.2 * 0.7, rel_tol=1e-12)


def _double_cooling_locus() -> bool:
    return effective_double(_P.replace(Delta_a=1.0), FeedbackConfig("double", eta=0.6)).Delta_eff == 1.0


def _single_no_feedback() -> bool:
    e = effective_single(_P, FeedbackConfig("single", r_cbs=0.6, eta_ex=0.0, phi=2.0))
    return (
        e.eta == 0.0
        and e.kappa_a_eff == _P.kappa_tot
        and e.kappa_f_eff == _P.kappa_f
        and _close(e.G_eff, _P.lambda_ - 1j * _P.kappa_1f)
    )


def _single_eta() -> bool:
    fb = FeedbackConfig("single", r_cbs=math.sqrt(0.5), eta_ex=0.9)
    return math.isclose(fb.efficiency, 0.225, rel_tol=1e-14)


def _single_kappa_f() -> bool:
    fb = FeedbackConfig("single", r_cbs=math.sqrt(0.5), eta_ex=0.9, phi=math.pi)
    e = effective_single(_P, fb)
    return math.isclose(e.kappa_f_eff / _P.kappa_f, 1.0 + 2.0 * math.sqrt(0.225), rel_tol=1e-14)


def _t_cbs() -> bool:
    return math.isclose(FeedbackConfig("single", r_cbs=0.7).t_cbs, math.sqrt(0.51), rel_tol=1e-15)


def _steady_zero_pump() -> bool:
    p = _P.replace(eps_p=0.0)
    s1 = steady_state_single(p, effective_single(p, FeedbackConfig()))
    s2 = steady_state_double(p, effective_double(p, FeedbackConfig("double", eta=0.3)))
    return s1.a_bar == 0 and s1.f_bar == 0 and s2.a_bar == 0


def _steady_decoupled() -> bool:
    p = _P.replace(lambda_=0.0, kappa_f=0.0)
    e = effective_single(p, FeedbackConfig())
    s = steady_state_single(p, e)
    return _close(s.a_bar, p.eps_p / (1j * p.Delta_a + p.kappa_tot)) and s.f_bar == 0


def _steady_double_resonant() -> bool:
    p = _P.replace(Delta_a=0.0)
    e = effective_double(p, FeedbackConfig("double"))
    return _close(steady_state_double(p, e).a_bar, p.eps_p / p.kappa_tot)


def _drift_double_blocks() -> bool:
    e = effective_double(_P, FeedbackConfig("double"))
    M = drift_double(_P, e, 0.0)
    return not M[:2, 2:].any() and not M[2:, :2].any() and M[2, 3] == _P.Omega_m


def _diffusion_double() -> bool:
    p = _P.replace(n_m=0.0)
    e = effective_double(p, FeedbackConfig("double"))
    return _close(diffusion_double(p, e), np.diag([p.kappa_tot, p.kappa_tot, 0.0, p.gamma_m]))


def _drift_single_entries() -> bool:
    e = effective_single(_P, FeedbackConfig())
    M = drift_single(_P, e, steady_state_single(_P, e))
    M0 = drift_single(_P, e, SteadyState(1.0, 1.0, 0j, 0j))
    return M[4, 5] == _P.Omega_m and M[5, 4] == -_P.Omega_m and not M0[:4, 4:].any() and not M0[4:, :4].any()


def _diffusion_single() -> bool:
    fb = FeedbackConfig("single", r_cbs=0.6, eta_ex=0.0)
    N = diffusion_single(_P, effective_single(_P, fb))
    return (
        _close(N[0, 0], _P.kappa_tot)
        and _close(N[0, 2], _P.kappa_1f)
        and _close(N[2, 2], _P.kappa_f)
        and N[4, 4] == 0.0
    )


def _modes_uncoupled() -> bool:
    m = normal_modes(1.2, 0.7, 0.3, 0.05, 0.0)
    return _set_equal([m.omega_plus, m.omega_minus], [1.2 - 0.3j, 0.7 - 0.05j])


def _modes_symmetric() -> bool:
    m = normal_modes(1.5, 1.5, 0.2, 0.2, 0.4)
    return _set_equal([m.omega_plus, m.omega_minus], [1.9 - 0.2j, 1.1 - 0.2j])


def _lyapunov_scalar() -> bool:
    n = np.array([1.0, 2.0, 3.0, 4.0])
    V = solve_lyapunov(-0.5 * np.eye(4), np.diag(n))
    return _close(V, np.diag(n) / 1.0)


def _integrate_free() -> bool:
    V0 = np.diag([1.0, 2.0])
    N = np.array([[0.5, 0.1], [0.1, 0.2]])
    return _close(integrate_covariance(np.zeros((2, 2)), N, V0, 3.0, 0.01), V0 + 3.0 * N, 1e-12)


def _integrate_fixed_point() -> bool:
    M = np.array([[-1.0, 2.0], [-2.0, -0.5]])
    N = np.diag([1.0, 0.3])
    V = solve_lyapunov(M, N)
    Vt = integrate_covariance(M, N, V, 10.0, 0.01)
    return _close(Vt, V, 1e-9)


def _eig_diag() -> bool:
    return _set_equal(eigenvalues(np.diag([-1.0, -2.0])), [-1.0, -2.0])


def _eig_rotation() -> bool:
    return _set_equal(eigenvalues(np.array([[0.0, -2.5], [2.5, 0.0]])), [2.5j, -2.5j])


def _routh_stable() -> bool:
    return routh_hurwitz([1.0, 3.0, 2.0]).stable


def _routh_unstable() -> bool:
    return not routh_hurwitz([1.0, 0.0, -1.0]).stable


def _phonon_vacuum() -> bool:
    return final_phonon(0.5 * np.eye(4), (2, 3)) == 0.0


def _phonon_thermal() -> bool:
    V = np.diag([0.5, 0.5, 7.5, 7.5])
    return final_phonon(V, (2, 3)) == 7.0


def _physicality_vacuum() -> bool:
    return abs(physicality(0.5 * np.eye(4))) < 1e-15


def _physicality_identity() -> bool:
    return math.isclose(physicality(np.eye(6)), 0.5, rel_tol=1e-14)


CHECKS: list[tuple[str, Callable[[], bool]]] = [
    ("validate accepts a valid point", _validate_ok),
    ("validate rejects eta = 1", _validate_eta_one),
    ("t_cbs from r_cbs = 0.7", _t_cbs),
    ("nondimensionalize zero rates", _nondim_zero),
    ("nondimensionalize round trip", _round_trip),
    ("pump amplitude at zero power", _pump_zero),
    ("pump amplitude side ratio", _pump_sides),
    ("double-sided eta = 0", _double_no_feedback),
    ("double-sided kappa at eta = 0.81", _double_closed_form),
    ("double-sided cooling locus", _double_cooling_locus),
    ("single-sided eta_ex = 0", _single_no_feedback),
    ("single-sided loop efficiency", _single_eta),
    ("single-sided Fano decay at phi = pi", _single_kappa_f),
    ("steady state without pump", _steady_zero_pump),
    ("steady state without coupling", _steady_decoupled),
    ("double-sided resonant amplitude", _steady_double_resonant),
    ("double-sided drift blocks", _drift_double_blocks),
    ("double-sided diffusion", _diffusion_double),
    ("single-sided drift entries", _drift_single_entries),
    ("single-sided diffusion", _diffusion_single),
    ("normal modes without coupling", _modes_uncoupled),
    ("normal modes symmetric pair", _modes_symmetric),
    ("Lyapunov scalar case", _lyapunov_scalar),
    ("covariance ODE with zero drift", _integrate_free),
    ("covariance ODE fixed point", _integrate_fixed_point),
    ("eigenvalues of a diagonal", _eig_diag),
    ("eigenvalues of a rotation", _eig_rotation),
    ("Routh array s^2 + 3s + 2", _routh_stable),
    ("Routh array s^2 - 1", _routh_unstable),
    ("phonon number of vacuum", _phonon_vacuum),
    ("phonon number of thermal state", _phonon_thermal),
    ("physicality of vacuum", _physicality_vacuum),
    ("physicality of V = I", _physicality_identity),
]


def run_selfcheck() -> list[tuple[str, bool, str]]:
    """Run every golden check; returns (name, passed, detail) triples."""
    results = []
    for name, fn in CHECKS:
        try:
            ok, detail = bool(fn()), ""
        except Exception as exc:  # a crashing check is a failed check
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        results.append((name, ok, detail))
    return results
