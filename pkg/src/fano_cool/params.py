"""Physical and feedback parameter containers.

All rates and frequencies are angular (rad/s) unless a parameter set has been
passed through :func:`nondimensionalize`, after which they are expressed in
units of the mechanical frequency and ``scale`` records that frequency in
rad/s.
"""

from __future__ import annotations

import dataclasses
import enum
import math
from dataclasses import dataclass

from scipy.constants import hbar

from .errors import InvalidParameter, ValidationError

# fields that carry units of angular frequency
RATE_FIELDS = (
    "Omega_m",
    "gamma_m",
    "kappa_1",
    "kappa_2",
    "kappa_f",
    "lambda_",
    "Delta_a",
    "Delta_f",
    "g_a0",
    "g_f0",
    "eps_p",
)
DIMENSIONLESS_FIELDS = ("n_m", "zeta")


class Scheme(str, enum.Enum):
    NONE = "none"
    DOUBLE_SIDED = "double"
    SINGLE_SIDED = "single"

    @classmethod
    def parse(cls, value) -> "Scheme":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower().replace("-", "").replace("_", "")
        aliases = {
            "none": cls.NONE,
            "bare": cls.NONE,
            "double": cls.DOUBLE_SIDED,
            "doublesided": cls.DOUBLE_SIDED,
            "single": cls.SINGLE_SIDED,
            "singlesided": cls.SINGLE_SIDED,
        }
        try:
            return aliases[key]
        except KeyError:
            raise ValueError(f"unknown feedback scheme {value!r}") from None


class PumpSide(str, enum.Enum):
    LEFT = "left"
    RIGHT = "right"

    @classmethod
    def parse(cls, value) -> "PumpSide":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower().replace("mirror", "").replace("_", "")
        if key in ("left", "l", "1"):
            return cls.LEFT
        if key in ("right", "r", "2"):
            return cls.RIGHT
        raise ValueError(f"unknown pump side {value!r}")


@dataclass(frozen=True)
class PhysicalParams:
    """Bare system parameters of the Fano-mirror optomechanical cavity.

    Detunings already include the static optomechanical shifts.  ``lambda_``
    is the coherent cavity-Fano coupling (``lambda`` in config files).
    """

    Omega_m: float
    gamma_m: float = 0.0
    kappa_1: float = 0.0
    kappa_2: float = 0.0
    kappa_f: float = 0.0
    lambda_: float = 0.0
    Delta_a: float = 0.0
    Delta_f: float = 0.0
    g_a0: float = 0.0
    g_f0: float = 0.0
    n_m: float = 0.0
    eps_p: float = 0.0
    zeta: float = 1.0
    scale: float = 1.0

    @property
    def kappa_tot(self) -> float:
        return self.kappa_1 + self.kappa_2

    @property
    def kappa_1f(self) -> float:
        return math.sqrt(self.kappa_1 * self.kappa_f)

    @property
    def kappa_12(self) -> float:
        return math.sqrt(self.kappa_1 * self.kappa_2)

    @property
    def kappa_2f(self) -> float:
        return math.sqrt(self.kappa_2 * self.kappa_f)

    @property
    def delta_Delta(self) -> float:
        return self.Delta_a - self.Delta_f

    @property
    def has_fano_mode(self) -> bool:
        return self.kappa_f != 0.0 or self.lambda_ != 0.0 or self.g_f0 != 0.0

    def replace(self, **changes) -> "PhysicalParams":
        return dataclasses.replace(self, **changes)


@dataclass(frozen=True)
class FeedbackConfig:
    """Coherent-feedback loop settings.

    ``eta`` is the loop efficiency for the double-sided scheme only; the
    single-sided efficiency follows from the beam-splitter and extra-loss
    factors (see :attr:`efficiency`).
    """

    scheme: Scheme = Scheme.NONE
    phi: float = 0.0
    eta: float = 0.0
    r_cbs: float = 0.0
    eta_ex: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "scheme", Scheme.parse(self.scheme))

    @property
    def t_cbs(self) -> float:
        return math.sqrt(max(0.0, 1.0 - self.r_cbs**2))

    @property
    def efficiency(self) -> float:
        if self.scheme is Scheme.DOUBLE_SIDED:
            return self.eta
        if self.scheme is Scheme.SINGLE_SIDED:
            return self.t_cbs**2 * self.r_cbs**2 * self.eta_ex
        return 0.0

    def replace(self, **changes) -> "FeedbackConfig":
        return dataclasses.replace(self, **changes)


@dataclass(frozen=True)
class PumpSpec:
    power: float
    omega_p: float
    side: PumpSide = PumpSide.RIGHT
    theta: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "side", PumpSide.parse(self.side))


def _ge(value, bound) -> bool:
    return value >= bound  # NaN compares False and is therefore rejected


def validate(raw: PhysicalParams, fb: FeedbackConfig) -> tuple[PhysicalParams, FeedbackConfig]:
    """Check every parameter invariant and return the pair unchanged.

    All violations are collected before raising a single
    :class:`~fano_cool.errors.ValidationError`.
    """
    errors: list[InvalidParameter] = []

    def need(ok, name, value, constraint):
        if not ok:
            errors.append(InvalidParameter(name, value, constraint))

    p = raw
    need(p.Omega_m > 0, "Omega_m", p.Omega_m, "> 0")
    for name in ("gamma_m", "kappa_1", "kappa_2", "kappa_f", "n_m", "eps_p"):
        v = getattr(p, name)
        need(_ge(v, 0.0), name, v, ">= 0")
    need(_ge(p.zeta, 0.0) and p.zeta <= 1.0, "zeta", p.zeta, "in [0, 1]")

    need(_ge(fb.eta, 0.0) and fb.eta < 1.0, "eta", fb.eta, "< 1" if fb.eta >= 1.0 else "in [0, 1)")
    need(_ge(fb.eta_ex, 0.0) and fb.eta_ex <= 1.0, "eta_ex", fb.eta_ex, "in [0, 1]")
    need(_ge(fb.r_cbs, 0.0) and fb.r_cbs <= 1.0, "r_cbs", fb.r_cbs, "in [0, 1]")
    if fb.scheme is Scheme.SINGLE_SIDED:
        need(fb.eta == 0.0, "eta", fb.eta, "derived as t_cbs^2 r_cbs^2 eta_ex for single-sided feedback")

    if errors:
        raise ValidationError(errors)
    return raw, fb


def validate_pump(ps: PumpSpec) -> PumpSpec:
    errors = []
    if not _ge(ps.power, 0.0):
        errors.append(InvalidParameter("power", ps.power, ">= 0"))
    if not ps.omega_p > 0:
        errors.append(InvalidParameter("omega_p", ps.omega_p, "> 0"))
    if errors:
        raise ValidationError(errors)
    return ps


def nondimensionalize(p: PhysicalParams) -> PhysicalParams:
    """Express every rate in units of ``Omega_m``; ``scale`` keeps the unit."""
    w = p.Omega_m
    if not w > 0:
        raise ValidationError([InvalidParameter("Omega_m", w, "> 0")])
    changes = {name: getattr(p, name) / w for name in RATE_FIELDS}
    changes["Omega_m"] = 1.0
    changes["scale"] = p.scale * w
    return dataclasses.replace(p, **changes)


def redimensionalize(p: PhysicalParams) -> PhysicalParams:
    """Inverse of :func:`nondimensionalize` (back to rad/s, ``scale == 1``)."""
    s = p.scale
    changes = {name: getattr(p, name) * s for name in RATE_FIELDS}
    changes["scale"] = 1.0
    return dataclasses.replace(p, **changes)


def pump_amplitude(ps: PumpSpec, p: PhysicalParams) -> float:
    """Pump amplitude sqrt(2 kappa_side P / (hbar omega_p)) in the units of ``p``.

    ``ps`` is always SI; the result is divided by ``p.scale`` so that it can be
    stored directly in a nondimensionalized parameter set.
    """
    kappa = p.kappa_1 if ps.side is PumpSide.LEFT else p.kappa_2
    kappa_si = kappa * p.scale
    eps_si = math.sqrt(2.0 * kappa_si * ps.power / (hbar * ps.omega_p))
    return eps_si / p.scale


def loop_pump_amplitude(ps: PumpSpec, p: PhysicalParams, fb: FeedbackConfig) -> float:
    """|sqrt(2k1) - sqrt(2 k2 eta) e^{i phi}| sqrt(P / hbar omega_p), pump routed through the double-sided loop."""
    k1 = p.kappa_1 * p.scale
    k2 = p.kappa_2 * p.scale
    eta = fb.efficiency
    coupling = math.sqrt(2 * k1) - math.sqrt(2 * k2 * eta) * complex(math.cos(fb.phi), math.sin(fb.phi))
    return abs(coupling) * math.sqrt(ps.power / (hbar * ps.omega_p)) / p.scale
