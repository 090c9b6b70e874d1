"""Feedback-dressed parameters and semiclassical steady states."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from .errors import SingularSteadyState
from .params import FeedbackConfig, PhysicalParams, PumpSpec, Scheme, loop_pump_amplitude

SINGULAR_TOL = 1e-12


@dataclass(frozen=True)
class EffectiveDouble:
    Delta_eff: float
    kappa_tot_eff: float
    eps_p_eff_mag: float


@dataclass(frozen=True)
class EffectiveSingle:
    Delta_a_eff: float
    Delta_f_eff: float
    kappa_a_eff: float
    kappa_f_eff: float
    G_eff: complex
    eta: float
    W1: float
    W2: float
    W3: float
    W4: float

    @property
    def noise_weight(self) -> float:
        """W1^2 + W2^2 + W3^2 + W4^2, the common factor of the optical diffusion terms."""
        return self.W1**2 + self.W2**2 + self.W3**2 + self.W4**2


@dataclass(frozen=True)
class SteadyState:
    a_bar: complex
    f_bar: complex
    g_a: complex
    g_f: complex


def effective_double(p: PhysicalParams, fb: FeedbackConfig, pump: PumpSpec | None = None) -> EffectiveDouble:
    """Cavity decay and detuning renormalized by the double-sided loop.

    With a ``pump`` the drive enters through the loop and its amplitude picks up
    the same interference factor as the left-port noise; otherwise
    ``p.eps_p`` is taken to be the effective amplitude already.
    """
    root_eta = math.sqrt(fb.efficiency)
    k12 = p.kappa_12
    kappa_tot_eff = p.kappa_tot - 2.0 * k12 * root_eta * math.cos(fb.phi)
    delta_eff = p.Delta_a - 2.0 * k12 * root_eta * math.sin(fb.phi)
    eps = loop_pump_amplitude(pump, p, fb) if pump is not None else p.eps_p
    return EffectiveDouble(delta_eff, kappa_tot_eff, eps)


def effective_single(p: PhysicalParams, fb: FeedbackConfig) -> EffectiveSingle:
    """Effective two-mode optical parameters under single-sided feedback.

    Also used for the bare Fano system, where the efficiency is zero and every
    quantity reduces to its feedback-free value.  ``zeta`` scales the whole
    dissipative part of the cavity-Fano coupling, feedback term included.
    """
    eta = fb.efficiency
    root_eta = math.sqrt(eta)
    c, s = math.cos(fb.phi), math.sin(fb.phi)
    r, t = fb.r_cbs, fb.t_cbs

    G_eff = p.lambda_ - 1j * p.zeta * p.kappa_1f * (1.0 - 2.0 * root_eta * cmath.exp(1j * fb.phi))
    return EffectiveSingle(
        Delta_a_eff=p.Delta_a - 2.0 * p.kappa_1 * root_eta * s,
        Delta_f_eff=p.Delta_f - 2.0 * p.kappa_f * root_eta * s,
        kappa_a_eff=p.kappa_1 * (1.0 - 2.0 * root_eta * c) + p.kappa_2,
        kappa_f_eff=p.kappa_f * (1.0 - 2.0 * root_eta * c),
        G_eff=complex(G_eff),
        eta=eta,
        W1=r * (1.0 - root_eta * c),
        W2=r * root_eta * s,
        W3=t * (1.0 - root_eta * c),
        W4=t * root_eta * s,
    )


def effective(p: PhysicalParams, fb: FeedbackConfig, pump: PumpSpec | None = None):
    if fb.scheme is Scheme.DOUBLE_SIDED:
        return effective_double(p, fb, pump)
    return effective_single(p, fb)


def steady_state_single(p: PhysicalParams, eff: EffectiveSingle, eps_p: complex | None = None) -> SteadyState:
    """Mean cavity and Fano amplitudes with the pump on the right mirror.

    Solves
        (i Da + ka) a + i G f = eps
        i G a + (i Df + kf) f = 0
    in closed form.  ``eps_p`` defaults to ``p.eps_p``.
    """
    eps = p.eps_p if eps_p is None else eps_p
    inv_chi_a = 1j * eff.Delta_a_eff + eff.kappa_a_eff
    inv_chi_f = 1j * eff.Delta_f_eff + eff.kappa_f_eff
    den = inv_chi_a * inv_chi_f + eff.G_eff**2
    if abs(den) < SINGULAR_TOL:
        raise SingularSteadyState(f"steady-state denominator |{den}| below {SINGULAR_TOL}")
    a_bar = inv_chi_f * eps / den
    f_bar = -1j * eff.G_eff * eps / den
    return SteadyState(complex(a_bar), complex(f_bar), p.g_a0 * a_bar, p.g_f0 * f_bar)


def steady_state_double(p: PhysicalParams, eff: EffectiveDouble) -> SteadyState:
    """Real cavity amplitude |eps_eff / (i Delta_eff + kappa_eff)| (pump phase absorbs the argument)."""
    inv_chi = 1j * eff.Delta_eff + eff.kappa_tot_eff
    if abs(inv_chi) < SINGULAR_TOL:
        raise SingularSteadyState(f"|i Delta_eff + kappa_tot_eff| = {abs(inv_chi)} below {SINGULAR_TOL}")
    a_bar = abs(eff.eps_p_eff_mag / inv_chi)
    return SteadyState(complex(a_bar), 0j, complex(p.g_a0 * a_bar), 0j)
