"""Drift/diffusion matrices of the linearized fluctuation dynamics and optical normal modes.

Quadrature conventions: X = (o + o^dag)/sqrt(2), P = i(o^dag - o)/sqrt(2), so a
vacuum state has covariance 1/2 on each diagonal entry.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import NegativeDiffusion
from .feedback import (
    EffectiveDouble,
    EffectiveSingle,
    SteadyState,
    effective_double,
    effective_single,
    steady_state_double,
    steady_state_single,
)
from .params import FeedbackConfig, PhysicalParams, PumpSpec, Scheme, pump_amplitude

SQRT2 = math.sqrt(2.0)

ORDER_DOUBLE = ("dX_a", "dP_a", "dx", "dp")
ORDER_SINGLE = ("dX_a", "dP_a", "dX_f", "dP_f", "dx", "dp")


@dataclass(frozen=True)
class DriftDiffusion:
    M: np.ndarray
    N: np.ndarray | None
    quadrature_order: tuple[str, ...]
    mech_indices: tuple[int, int]

    @property
    def size(self) -> int:
        return self.M.shape[0]


@dataclass(frozen=True)
class NormalModes:
    """Complex eigen-energies of the optical modes, omega - i kappa.

    ``omega_plus``/``omega_minus`` follow the principal square-root branch;
    ``narrow``/``broad`` are sorted by linewidth and are what sweeps track.
    """

    omega_plus: complex
    omega_minus: complex

    @property
    def kappa_plus(self) -> float:
        return -self.omega_plus.imag

    @property
    def kappa_minus(self) -> float:
        return -self.omega_minus.imag

    @property
    def narrow_index(self) -> int:
        """0 for the '+' branch, 1 for '-'; ties go to '-'."""
        return 0 if self.kappa_plus < self.kappa_minus else 1

    @property
    def narrow(self) -> complex:
        return (self.omega_plus, self.omega_minus)[self.narrow_index]

    @property
    def broad(self) -> complex:
        return (self.omega_plus, self.omega_minus)[1 - self.narrow_index]

    def scaled(self, factor: float) -> "NormalModes":
        return NormalModes(self.omega_plus * factor, self.omega_minus * factor)


def drift_double(p: PhysicalParams, eff: EffectiveDouble, g_a: float) -> np.ndarray:
    """4x4 drift matrix over (dX_a, dP_a, dx, dp) for a real coupling ``g_a``."""
    g_a = float(np.real(g_a))
    k, d = eff.kappa_tot_eff, eff.Delta_eff
    sg = SQRT2 * g_a
    return -np.array(
        [
            [k, -d, 0.0, 0.0],
            [d, k, sg, 0.0],
            [0.0, 0.0, 0.0, -p.Omega_m],
            [sg, 0.0, p.Omega_m, p.gamma_m],
        ]
    )


def diffusion_double(p: PhysicalParams, eff: EffectiveDouble) -> np.ndarray:
    k = eff.kappa_tot_eff
    if k < 0:
        raise NegativeDiffusion(f"kappa_tot_eff = {k} < 0: outside the noise model's validity")
    return np.diag([k, k, 0.0, p.gamma_m * (2.0 * p.n_m + 1.0)])


def drift_single(p: PhysicalParams, eff: EffectiveSingle, ss: SteadyState) -> np.ndarray:
    """6x6 drift matrix over (dX_a, dP_a, dX_f, dP_f, dx, dp)."""
    Gr, Gi = eff.G_eff.real, eff.G_eff.imag
    gar, gai = SQRT2 * ss.g_a.real, SQRT2 * ss.g_a.imag
    gfr, gfi = SQRT2 * ss.g_f.real, SQRT2 * ss.g_f.imag
    ka, kf = eff.kappa_a_eff, eff.kappa_f_eff
    da, df = eff.Delta_a_eff, eff.Delta_f_eff
    return -np.array(
        [
            [ka, -da, -Gi, -Gr, -gai, 0.0],
            [da, ka, Gr, -Gi, gar, 0.0],
            [-Gi, -Gr, kf, -df, -gfi, 0.0],
            [Gr, -Gi, df, kf, gfr, 0.0],
            [0.0, 0.0, 0.0, 0.0, 0.0, -p.Omega_m],
            [gar, gai, gfr, gfi, p.Omega_m, p.gamma_m],
        ]
    )


def diffusion_single(p: PhysicalParams, eff: EffectiveSingle) -> np.ndarray:
    w = eff.noise_weight
    F1 = w * p.kappa_1 + p.kappa_2
    F2 = w * p.kappa_1f
    F3 = w * p.kappa_f
    N = np.zeros((6, 6))
    N[0, 0] = N[1, 1] = F1
    N[2, 2] = N[3, 3] = F3
    N[0, 2] = N[2, 0] = N[1, 3] = N[3, 1] = F2
    N[5, 5] = p.gamma_m * (2.0 * p.n_m + 1.0)
    return N


def normal_modes(Delta_a: float, Delta_f: float, kappa_a: float, kappa_f: float, G: complex, GG: complex | None = None) -> NormalModes:
    """Eigen-energies of two coupled lossy modes.

    ``GG`` replaces ``G**2`` under the square root when the coupling is
    non-reciprocal.
    """
    coupling = G * G if GG is None else GG
    centre = 0.5 * (Delta_a + Delta_f) - 0.5j * (kappa_a + kappa_f)
    half_split = 0.5 * (Delta_a - Delta_f) - 0.5j * (kappa_a - kappa_f)
    root = cmath.sqrt(half_split * half_split + coupling)
    return NormalModes(complex(centre + root), complex(centre - root))


def normal_modes_single(eff: EffectiveSingle) -> NormalModes:
    return normal_modes(eff.Delta_a_eff, eff.Delta_f_eff, eff.kappa_a_eff, eff.kappa_f_eff, eff.G_eff)


def normal_modes_double_fano(p: PhysicalParams, fb: FeedbackConfig) -> NormalModes:
    """Normal modes of the Fano system with the double-sided loop.

    The loop makes the cavity->Fano coupling G' = G + 2i kappa_2f sqrt(eta) e^{i phi}
    differ from the Fano->cavity coupling G, so G^2 becomes G G'.
    """
    eff = effective_double(p, fb)
    G = p.lambda_ - 1j * p.zeta * p.kappa_1f
    G_prime = G + 2j * p.kappa_2f * math.sqrt(fb.efficiency) * cmath.exp(1j * fb.phi)
    return normal_modes(eff.Delta_eff, p.Delta_f, eff.kappa_tot_eff, p.kappa_f, G, GG=G * G_prime)


def cavity_mode_double(eff: EffectiveDouble) -> NormalModes:
    """Without a Fano mode there is a single optical resonance; both labels carry it."""
    w = complex(eff.Delta_eff, -eff.kappa_tot_eff)
    return NormalModes(w, w)


@dataclass(frozen=True)
class LinearizedSystem:
    effective: EffectiveDouble | EffectiveSingle
    steady: SteadyState
    dd: DriftDiffusion
    modes: NormalModes

    @property
    def negative_decay(self) -> bool:
        e = self.effective
        if isinstance(e, EffectiveDouble):
            return e.kappa_tot_eff < 0
        return e.kappa_a_eff < 0 or e.kappa_f_eff < 0


def assemble(p: PhysicalParams, fb: FeedbackConfig, pump: PumpSpec | None = None) -> LinearizedSystem:
    """Effective parameters, steady state, drift/diffusion and optical modes for one point.

    Double-sided feedback uses the 4x4 cavity-only model; a Fano mode, if
    present, enters only through the reported normal modes.  No feedback and
    single-sided feedback share the 6x6 model.
    """
    if fb.scheme is Scheme.DOUBLE_SIDED:
        eff = effective_double(p, fb, pump)
        ss = steady_state_double(p, eff)
        M = drift_double(p, eff, ss.g_a.real)
        try:
            N = diffusion_double(p, eff)
        except NegativeDiffusion:
            N = None  # kappa_tot_eff < 0 also makes M unstable; callers check stability first
        dd = DriftDiffusion(M, N, ORDER_DOUBLE, (2, 3))
        modes = normal_modes_double_fano(p, fb) if p.has_fano_mode else cavity_mode_double(eff)
        return LinearizedSystem(eff, ss, dd, modes)

    eff = effective_single(p, fb)
    eps = None
    if pump is not None:
        eps = pump_amplitude(pump, p) * cmath.exp(1j * pump.theta)
    ss = steady_state_single(p, eff, eps)
    dd = DriftDiffusion(drift_single(p, eff, ss), diffusion_single(p, eff), ORDER_SINGLE, (4, 5))
    return LinearizedSystem(eff, ss, dd, normal_modes_single(eff))
