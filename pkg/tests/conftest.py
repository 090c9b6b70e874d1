import math
import sys

import pytest

from fano_cool.params import FeedbackConfig, PhysicalParams

TWO_PI = 2.0 * math.pi


def double_sided_params(**changes) -> PhysicalParams:
    """Unresolved-sideband membrane cavity used for the double-sided loop."""
    W = TWO_PI * 0.13e6
    p = PhysicalParams(
        Omega_m=W,
        gamma_m=TWO_PI * 0.12,
        kappa_1=TWO_PI * 0.25e6,
        kappa_2=TWO_PI * 0.25e6,
        g_a0=TWO_PI * 50.0,
        eps_p=TWO_PI * 80e6,
        n_m=9.6e4,
        Delta_a=W,
    )
    return p.replace(**changes)


def fano_params(delta_Delta_over_Om: float = -50.0, **changes) -> PhysicalParams:
    """Fano-mirror cavity with a strongly asymmetric two-sided decay."""
    W = TWO_PI * 1.3e6
    p = PhysicalParams(
        Omega_m=W,
        gamma_m=TWO_PI * 5e-3,
        kappa_1=TWO_PI * 20e12,
        kappa_2=TWO_PI * 0.6e9,
        kappa_f=TWO_PI * 1.08e9,
        lambda_=TWO_PI * 7e9,
        Delta_a=30.0 * W,
        Delta_f=(30.0 - delta_Delta_over_Om) * W,
        g_a0=6.5e-5 * W,
        g_f0=-1.6e-4 * W,
        n_m=1e5,
        eps_p=TWO_PI * 80e9,
    )
    return p.replace(**changes)


def single_fb(r_cbs: float = 0.7, phi: float = math.pi, eta_ex: float = 0.9) -> FeedbackConfig:
    return FeedbackConfig("single", phi=phi, r_cbs=r_cbs, eta_ex=eta_ex)


@pytest.fixture
def p_double():
    return double_sided_params()


@pytest.fixture
def p_fano():
    return fano_params()


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None:
        return
    terminalreporter.section("acceptance criteria")
    for k, title in mod.CRITERIA.items():
        parts = mod.RESULTS[k]
        if not parts:
            continue
        ok = all(p[1] for p in parts)
        failed = [f"{name}: {detail}" for name, good, detail in parts if not good]
        summary = "; ".join(failed) if failed else "; ".join(f"{name}: {detail}" for name, _, detail in parts)
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} criterion {k} ({title}) -- {summary}")
