"""JSON configuration documents and dotted parameter paths.

Frequencies in config files are ordinary frequencies nu = omega / 2pi in Hz;
they are converted to rad/s on ingestion.  A document looks like::

    {
      "physical": {"Omega_m": 1.3e6, "kappa_1": 2.0e13, ...},
      "feedback": {"scheme": "single", "phi": 3.14159, "r_cbs": 0.7, "eta_ex": 0.9},
      "pump":     {"power": 1e-3, "omega_p": 2.82e14, "side": "right"},
      "sweep":    {"axes": [...], "outputs": [...]}
    }

``pump`` and ``sweep`` are optional.  Unknown keys raise :class:`ConfigError`.
"""

from __future__ import annotations

import copy
import dataclasses
import json
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .errors import ConfigError
from .params import (
    DIMENSIONLESS_FIELDS,
    RATE_FIELDS,
    FeedbackConfig,
    PhysicalParams,
    PumpSide,
    PumpSpec,
    Scheme,
)

TWO_PI = 2.0 * math.pi

# JSON key -> dataclass attribute
_PHYSICAL_KEYS = {name.rstrip("_"): name for name in RATE_FIELDS + DIMENSIONLESS_FIELDS}
_FEEDBACK_KEYS = {"scheme", "phi", "eta", "r_cbs", "eta_ex"}
_PUMP_KEYS = {"power", "omega_p", "side", "theta"}
_TOP_KEYS = {"physical", "feedback", "pump", "sweep"}

# virtual paths accepted wherever a parameter path is
VIRTUAL_PATHS = ("physical.delta_Delta",)

UNIT_FACTORS = {"hz": TWO_PI, "rad/s": 1.0, "1": 1.0, "pi": math.pi}


@dataclass(frozen=True)
class Config:
    physical: PhysicalParams
    feedback: FeedbackConfig = field(default_factory=FeedbackConfig)
    pump: PumpSpec | None = None
    sweep: dict | None = None
    source: dict = field(default_factory=dict, compare=False, repr=False)

    def replace(self, **changes) -> "Config":
        return dataclasses.replace(self, **changes)


def bundled_config_names() -> list[str]:
    return sorted(p.name for p in resources.files("fano_cool").joinpath("configs").iterdir() if p.name.endswith(".json"))


def resolve_config_path(path: str | Path) -> Path:
    """Return ``path`` if it exists, otherwise look it up among the bundled configs."""
    p = Path(path)
    if p.exists():
        return p
    bundled = resources.files("fano_cool").joinpath("configs").joinpath(p.name)
    if bundled.is_file():
        return Path(str(bundled))
    raise ConfigError(f"config file not found: {path} (bundled: {', '.join(bundled_config_names())})")


def _check_keys(section: str, obj, allowed) -> None:
    if not isinstance(obj, dict):
        raise ConfigError(f"'{section}' must be a JSON object")
    unknown = sorted(set(obj) - set(allowed))
    if unknown:
        raise ConfigError(f"unknown key(s) in '{section}': {', '.join(unknown)}")


def _number(section, key, value) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{section}.{key} must be a number, got {value!r}")
    return float(value)


def parse_config(doc: dict) -> Config:
    """Build a :class:`Config` from a decoded JSON document (no validation)."""
    _check_keys("<top>", doc, _TOP_KEYS)
    if "physical" not in doc:
        raise ConfigError("config needs a 'physical' section")

    phys_raw = doc["physical"]
    _check_keys("physical", phys_raw, _PHYSICAL_KEYS)
    if "Omega_m" not in phys_raw:
        raise ConfigError("physical.Omega_m is required")
    kwargs = {}
    for key, value in phys_raw.items():
        attr = _PHYSICAL_KEYS[key]
        x = _number("physical", key, value)
        kwargs[attr] = x * TWO_PI if attr in RATE_FIELDS else x
    physical = PhysicalParams(**kwargs)

    fb_raw = doc.get("feedback", {})
    _check_keys("feedback", fb_raw, _FEEDBACK_KEYS)
    fb_kwargs = {}
    for key, value in fb_raw.items():
        if key == "scheme":
            try:
                fb_kwargs[key] = Scheme.parse(value)
            except ValueError as exc:
                raise ConfigError(str(exc)) from None
        else:
            fb_kwargs[key] = _number("feedback", key, value)
    feedback = FeedbackConfig(**fb_kwargs)

    pump = None
    if doc.get("pump") is not None:
        pr = doc["pump"]
        _check_keys("pump", pr, _PUMP_KEYS)
        if "power" not in pr or "omega_p" not in pr:
            raise ConfigError("pump needs 'power' and 'omega_p'")
        if "eps_p" in phys_raw:
            raise ConfigError("give either physical.eps_p or a pump section, not both")
        try:
            side = PumpSide.parse(pr.get("side", "right"))
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        pump = PumpSpec(
            power=_number("pump", "power", pr["power"]),
            omega_p=_number("pump", "omega_p", pr["omega_p"]) * TWO_PI,
            side=side,
            theta=_number("pump", "theta", pr.get("theta", 0.0)),
        )

    sweep = doc.get("sweep")
    if sweep is not None and not isinstance(sweep, dict):
        raise ConfigError("'sweep' must be a JSON object")
    return Config(physical, feedback, pump, copy.deepcopy(sweep), source=copy.deepcopy(doc))


def load_config(path: str | Path, overrides: list[str] | tuple[str, ...] = ()) -> Config:
    p = resolve_config_path(path)
    try:
        doc = json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{p}: invalid JSON ({exc})") from None
    cfg = parse_config(doc)
    for item in overrides:
        cfg = apply_override(cfg, item)
    return cfg


def default_unit(path: str) -> str:
    section, _, name = path.partition(".")
    if path == "physical.delta_Delta" or path == "pump.omega_p":
        return "hz"
    if section == "physical" and _PHYSICAL_KEYS.get(name) in RATE_FIELDS:
        return "hz"
    return "1"


def is_numeric_path(path: str) -> bool:
    section, _, name = path.partition(".")
    if path in VIRTUAL_PATHS:
        return True
    if section == "physical":
        return name in _PHYSICAL_KEYS
    if section == "feedback":
        return name in _FEEDBACK_KEYS - {"scheme"}
    if section == "pump":
        return name in {"power", "omega_p", "theta"}
    return False


def to_internal(path: str, value: float, unit: str | None, physical: PhysicalParams) -> float:
    """Convert ``value`` given in ``unit`` to the SI/rad/s value stored on the dataclass."""
    unit = (unit or default_unit(path)).lower()
    if unit in ("omega_m", "omegam"):
        return value * physical.Omega_m
    try:
        return value * UNIT_FACTORS[unit]
    except KeyError:
        raise ConfigError(f"unknown unit {unit!r} for {path}") from None


def set_param(cfg: Config, path: str, value, unit: str | None = None) -> Config:
    """Return a copy of ``cfg`` with the dotted ``path`` set.

    Numeric values are interpreted in ``unit`` (default: Hz for rates, as in
    config files).  ``physical.delta_Delta`` sets ``Delta_f = Delta_a - value``.
    """
    section, _, name = path.partition(".")
    if section == "feedback" and name == "scheme":
        try:
            return cfg.replace(feedback=cfg.feedback.replace(scheme=Scheme.parse(value)))
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
    if section == "pump" and name == "side":
        if cfg.pump is None:
            raise ConfigError("no pump section to override")
        return cfg.replace(pump=dataclasses.replace(cfg.pump, side=PumpSide.parse(value)))
    if not is_numeric_path(path):
        raise ConfigError(f"unknown parameter path {path!r}")
    try:
        x = float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{path}: expected a number, got {value!r}") from None
    x = to_internal(path, x, unit, cfg.physical)

    if path == "physical.delta_Delta":
        return cfg.replace(physical=cfg.physical.replace(Delta_f=cfg.physical.Delta_a - x))
    if section == "physical":
        return cfg.replace(physical=cfg.physical.replace(**{_PHYSICAL_KEYS[name]: x}))
    if section == "feedback":
        return cfg.replace(feedback=cfg.feedback.replace(**{name: x}))
    if cfg.pump is None:
        raise ConfigError("no pump section to override")
    return cfg.replace(pump=dataclasses.replace(cfg.pump, **{name: x}))


def apply_override(cfg: Config, item: str) -> Config:
    """Apply a ``path=value`` override string (value in config-file units)."""
    if "=" not in item:
        raise ConfigError(f"override must look like path=value, got {item!r}")
    path, _, value = item.partition("=")
    return set_param(cfg, path.strip(), value.strip())


def config_to_doc(cfg: Config) -> dict:
    """Serialize back to the config-file convention (Hz)."""
    p = cfg.physical
    physical = {}
    for key, attr in _PHYSICAL_KEYS.items():
        v = getattr(p, attr)
        physical[key] = v / TWO_PI if attr in RATE_FIELDS else v
    fb = cfg.feedback
    doc = {
        "physical": physical,
        "feedback": {"scheme": fb.scheme.value, "phi": fb.phi, "eta": fb.eta, "r_cbs": fb.r_cbs, "eta_ex": fb.eta_ex},
    }
    if cfg.pump is not None:
        doc["pump"] = {
            "power": cfg.pump.power,
            "omega_p": cfg.pump.omega_p / TWO_PI,
            "side": cfg.pump.side.value,
            "theta": cfg.pump.theta,
        }
        doc["physical"].pop("eps_p", None)
    if cfg.sweep is not None:
        doc["sweep"] = copy.deepcopy(cfg.sweep)
    return doc
