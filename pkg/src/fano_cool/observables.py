"""Mechanical observables from steady-state covariances and the end-to-end cooling pipeline."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np

from .dynamics import LinearizedSystem, NormalModes, assemble, cavity_mode_double, normal_modes_double_fano, normal_modes_single
from .feedback import effective_double, effective_single
from .errors import SolverError
from .params import FeedbackConfig, PhysicalParams, PumpSpec, Scheme, nondimensionalize, validate, validate_pump
from .solvers import StabilityMethod, StabilityVerdict, lyapunov_residual, solve_lyapunov, solve_lyapunov_kron, stability


@dataclass(frozen=True)
class CoolingReport:
    """Result of one cooling evaluation.

    Frequencies (``modes``, ``stability.max_real_eigenvalue``) are in units of
    the mechanical frequency; ``scale`` is that frequency in rad/s.  Quantities
    that need a steady state are ``None`` at unstable points.
    """

    n_fin: float | None
    var_x: float | None
    var_p: float | None
    equipartition_dev: float | None
    stability: StabilityVerdict
    modes: NormalModes
    physicality_min_eig: float | None
    ground_state: bool
    scale: float = 1.0
    residual: float | None = None
    negative_decay: bool = False
    V: np.ndarray | None = dataclasses.field(default=None, repr=False, compare=False)

    @property
    def stable(self) -> bool:
        return self.stability.stable

    def to_dict(self) -> dict:
        """Flat JSON-ready mapping; ``omega_minus``/``kappa_minus`` are the narrow mode."""
        narrow, broad = self.modes.narrow, self.modes.broad
        return {
            "n_fin": self.n_fin,
            "var_x": self.var_x,
            "var_p": self.var_p,
            "equipartition_dev": self.equipartition_dev,
            "stable": bool(self.stability.stable),
            "marginal": bool(self.stability.marginal),
            "max_real_eigenvalue": float(self.stability.max_real_eigenvalue),
            "stability_method": self.stability.method.value,
            "omega_minus": narrow.real,
            "kappa_minus": -narrow.imag,
            "omega_plus": broad.real,
            "kappa_plus": -broad.imag,
            "physicality_min_eig": self.physicality_min_eig,
            "ground_state": bool(self.ground_state),
            "negative_decay": bool(self.negative_decay),
            "lyapunov_residual": self.residual,
            "Omega_m": self.scale,
        }


def final_phonon(V, mech_indices) -> float:
    ix, ip = mech_indices
    return 0.5 * (V[ix, ix] + V[ip, ip] - 1.0)


def equipartition_deviation(var_x: float, var_p: float) -> float:
    return abs(var_x - var_p) / (var_x + var_p)


def symplectic_form(n_modes: int) -> np.ndarray:
    return np.kron(np.eye(n_modes), np.array([[0.0, 1.0], [-1.0, 0.0]]))


def physicality(V) -> float:
    """Smallest eigenvalue of V + (i/2) sigma; nonnegative for a valid Gaussian state."""
    V = np.asarray(V, dtype=float)
    sigma = symplectic_form(V.shape[0] // 2)
    return float(np.linalg.eigvalsh(V + 0.5j * sigma)[0])


def _context(p: PhysicalParams, fb: FeedbackConfig) -> dict:
    ctx = {k: v for k, v in dataclasses.asdict(p).items() if v}
    ctx.update(scheme=fb.scheme.value, phi=fb.phi, eta=fb.efficiency, r_cbs=fb.r_cbs)
    return ctx


def linearize(p: PhysicalParams, fb: FeedbackConfig, pump: PumpSpec | None = None) -> LinearizedSystem:
    """Validate, move to mechanical-frequency units and assemble the linear model."""
    validate(p, fb)
    if pump is not None:
        validate_pump(pump)
    return assemble(nondimensionalize(p), fb, pump)


def optical_modes(p: PhysicalParams, fb: FeedbackConfig) -> NormalModes:
    """Optical normal modes in units of the mechanical frequency.

    Double-sided feedback on a system with a Fano mode uses the
    non-reciprocal coupling; without a Fano mode the single cavity resonance
    fills both slots.
    """
    validate(p, fb)
    q = nondimensionalize(p)
    if fb.scheme is Scheme.DOUBLE_SIDED:
        if q.has_fano_mode:
            return normal_modes_double_fano(q, fb)
        return cavity_mode_double(effective_double(q, fb))
    return normal_modes_single(effective_single(q, fb))


def cool(
    p: PhysicalParams,
    fb: FeedbackConfig,
    pump: PumpSpec | None = None,
    lyapunov: str = "schur",
    stability_method: StabilityMethod | str = StabilityMethod.EIGENVALUE,
) -> CoolingReport:
    """Steady-state cooling report for one parameter point.

    ``lyapunov="kron"`` swaps in the Kronecker-vectorized solve, used to
    cross-check the production path.
    """
    try:
        sys = linearize(p, fb, pump)
        dd = sys.dd
        verdict = stability(dd.M, stability_method)
        modes = sys.modes
        scale = p.Omega_m * p.scale
        if not verdict.stable or dd.N is None:
            return CoolingReport(
                None, None, None, None, verdict, modes, None, False,
                scale=scale, negative_decay=sys.negative_decay,
            )
        if lyapunov == "schur":
            V = solve_lyapunov(dd.M, dd.N, check_stability=False)
        elif lyapunov == "kron":
            V = solve_lyapunov_kron(dd.M, dd.N)
        else:
            raise ValueError(f"unknown Lyapunov path {lyapunov!r}")
    except SolverError as exc:
        exc.context.update(_context(p, fb))
        raise

    ix, ip = dd.mech_indices
    var_x, var_p = float(V[ix, ix]), float(V[ip, ip])
    n_fin = final_phonon(V, dd.mech_indices)
    return CoolingReport(
        n_fin=float(n_fin),
        var_x=var_x,
        var_p=var_p,
        equipartition_dev=equipartition_deviation(var_x, var_p),
        stability=verdict,
        modes=modes,
        physicality_min_eig=physicality(V),
        ground_state=bool(n_fin < 1.0),
        scale=scale,
        residual=lyapunov_residual(dd.M, V, dd.N),
        negative_decay=sys.negative_decay,
        V=V,
    )


__all__ = [
    "CoolingReport",
    "cool",
    "equipartition_deviation",
    "final_phonon",
    "linearize",
    "optical_modes",
    "physicality",
    "symplectic_form",
]
