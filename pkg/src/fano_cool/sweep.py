"""One- and two-axis parameter grids over the cooling pipeline."""

from __future__ import annotations

import csv
import io
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .config import Config, config_to_doc, default_unit, is_numeric_path, set_param
from .errors import AllUnstable, FanoCoolError, SpecError
from .observables import cool

CSV_COLUMNS = ("axis1", "axis2", "n_fin", "var_x", "var_p", "equip_dev", "omega_minus", "kappa_minus", "stable")
# CSV column -> CoolingReport.to_dict key
CSV_FIELDS = {
    "n_fin": "n_fin",
    "var_x": "var_x",
    "var_p": "var_p",
    "equip_dev": "equipartition_dev",
    "omega_minus": "omega_minus",
    "kappa_minus": "kappa_minus",
    "stable": "stable",
}
DEFAULT_OUTPUTS = tuple(CSV_FIELDS.values())
REPORT_KEYS = frozenset({
    "n_fin", "var_x", "var_p", "equipartition_dev", "stable", "marginal", "max_real_eigenvalue",
    "stability_method", "omega_minus", "kappa_minus", "omega_plus", "kappa_plus",
    "physicality_min_eig", "ground_state", "negative_decay", "lyapunov_residual", "Omega_m",
})
THREADS_ENV = "FANO_COOL_THREADS"
SERIAL_BELOW = 32


@dataclass(frozen=True)
class Axis:
    """A grid axis; ``min``/``max`` are in ``unit`` (default: the config-file unit of the path)."""

    param_path: str
    min: float
    max: float
    points: int
    scale: str = "linear"
    unit: str | None = None

    def validate(self) -> "Axis":
        if not is_numeric_path(self.param_path):
            raise SpecError(f"axis path {self.param_path!r} is not a numeric parameter")
        if isinstance(self.points, bool) or not isinstance(self.points, int) or self.points < 2:
            raise SpecError(f"axis {self.param_path}: points must be an integer >= 2, got {self.points!r}")
        if not (math.isfinite(self.min) and math.isfinite(self.max)) or not self.min < self.max:
            raise SpecError(f"axis {self.param_path}: need finite min < max, got [{self.min}, {self.max}]")
        if self.scale not in ("linear", "log"):
            raise SpecError(f"axis {self.param_path}: scale must be 'linear' or 'log'")
        if self.scale == "log" and self.min <= 0:
            raise SpecError(f"axis {self.param_path}: log scale needs min > 0")
        return self

    def values(self) -> np.ndarray:
        if self.scale == "log":
            return np.geomspace(self.min, self.max, self.points)
        return np.linspace(self.min, self.max, self.points)

    def as_dict(self) -> dict:
        return {
            "param_path": self.param_path,
            "min": self.min,
            "max": self.max,
            "points": self.points,
            "scale": self.scale,
            "unit": self.unit or default_unit(self.param_path),
        }


@dataclass(frozen=True)
class SweepSpec:
    base: Config
    axes: tuple[Axis, ...]
    outputs: tuple[str, ...] = DEFAULT_OUTPUTS

    def __post_init__(self):
        object.__setattr__(self, "axes", tuple(self.axes))
        object.__setattr__(self, "outputs", tuple(self.outputs))
        if not 1 <= len(self.axes) <= 2:
            raise SpecError(f"a sweep needs 1 or 2 axes, got {len(self.axes)}")
        for ax in self.axes:
            ax.validate()
        if len({ax.param_path for ax in self.axes}) != len(self.axes):
            raise SpecError("axes must sweep distinct parameters")
        for key in self.outputs:
            if key not in REPORT_KEYS:
                raise SpecError(f"unknown output field {key!r}")

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(ax.points for ax in self.axes)


@dataclass(frozen=True)
class SweepCell:
    """One grid point.  ``values`` is None only when evaluation raised (see ``error``)."""

    index: tuple[int, ...]
    coords: tuple[float, ...]
    values: dict | None
    error: str | None = None

    @property
    def stable(self) -> bool:
        return self.values is not None and bool(self.values.get("stable"))

    def get(self, name: str):
        if self.values is None:
            return None
        return self.values.get(name)


@dataclass(frozen=True)
class SweepTable:
    axes: tuple[Axis, ...]
    cells: tuple[SweepCell, ...]
    outputs: tuple[str, ...]
    provenance: dict = field(default_factory=dict)

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(ax.points for ax in self.axes)

    def column(self, name: str) -> list:
        return [c.get(name) for c in self.cells]

    def grid(self, name: str) -> np.ndarray:
        """Values reshaped to the grid, absent entries as NaN."""
        vals = [np.nan if v is None else float(v) for v in self.column(name)]
        return np.array(vals).reshape(self.shape)

    def axis_values(self) -> list[np.ndarray]:
        return [ax.values() for ax in self.axes]


def _grid_points(spec: SweepSpec):
    values = [ax.values() for ax in spec.axes]
    for index in np.ndindex(*spec.shape):
        yield tuple(int(i) for i in index), tuple(float(values[k][i]) for k, i in enumerate(index))


def _evaluate(job) -> SweepCell:
    base, axes, outputs, index, coords = job
    try:
        cfg = base
        for ax, x in zip(axes, coords):
            cfg = set_param(cfg, ax.param_path, x, ax.unit)
        report = cool(cfg.physical, cfg.feedback, cfg.pump).to_dict()
        return SweepCell(index, coords, {k: report[k] for k in outputs})
    except (FanoCoolError, ArithmeticError, ValueError, np.linalg.LinAlgError) as exc:
        return SweepCell(index, coords, None, f"{type(exc).__name__}: {exc}")


def worker_count(workers: int | None = None) -> int:
    if workers is not None:
        return max(1, int(workers))
    env = os.environ.get(THREADS_ENV)
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise SpecError(f"{THREADS_ENV} must be an integer, got {env!r}") from None
    return len(os.sched_getaffinity(0)) if hasattr(os, "sched_getaffinity") else (os.cpu_count() or 1)


def run_sweep(spec: SweepSpec, workers: int | None = None) -> SweepTable:
    """Evaluate every grid cell; results are stored in row-major grid order.

    Cells run in a process pool of ``workers`` (default: ``FANO_COOL_THREADS``
    or the core count).  Small grids run in-process.  A cell that raises is
    recorded with its error message instead of aborting the sweep.
    """
    outputs = tuple(dict.fromkeys(DEFAULT_OUTPUTS + spec.outputs))
    jobs = [(spec.base, spec.axes, outputs, idx, xy) for idx, xy in _grid_points(spec)]
    n = worker_count(workers)
    if n <= 1 or len(jobs) < SERIAL_BELOW:
        cells = [_evaluate(j) for j in jobs]
    else:
        chunk = max(1, len(jobs) // (4 * n))
        with ProcessPoolExecutor(max_workers=n) as pool:
            cells = list(pool.map(_evaluate, jobs, chunksize=chunk))
    provenance = {
        "version": __version__,
        "base": config_to_doc(spec.base),
        "axes": [ax.as_dict() for ax in spec.axes],
    }
    return SweepTable(spec.axes, tuple(cells), outputs, provenance)


def find_minimum(table: SweepTable, name: str = "n_fin") -> tuple[tuple[float, ...], float]:
    """Smallest recorded value of ``name``; ties go to the lowest grid index."""
    best = None
    for cell in table.cells:
        v = cell.get(name)
        if v is None or (isinstance(v, float) and math.isnan(v)):
            continue
        if best is None or v < best[1]:
            best = (cell, v)
    if best is None:
        raise AllUnstable(f"no cell has a value for {name!r}")
    return best[0].coords, best[1]


def format_field(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return "" if math.isnan(v) else repr(v)
    return str(v)


def write_csv(table: SweepTable, stream) -> None:
    stream.write(f"# fano-cool v{__version__}\r\n")
    w = csv.writer(stream)
    w.writerow(CSV_COLUMNS)
    for cell in table.cells:
        row = [format_field(cell.coords[0]), format_field(cell.coords[1]) if len(cell.coords) > 1 else ""]
        row += [format_field(cell.get(CSV_FIELDS[c])) for c in CSV_COLUMNS[2:]]
        w.writerow(row)


def table_to_csv(table: SweepTable) -> str:
    buf = io.StringIO(newline="")
    write_csv(table, buf)
    return buf.getvalue()


def table_to_json(table: SweepTable) -> dict:
    cells = []
    for cell in table.cells:
        entry = {"index": list(cell.index), "coords": list(cell.coords)}
        entry.update({k: cell.get(k) for k in table.outputs})
        if cell.error is not None:
            entry["error"] = cell.error
        cells.append(entry)
    return {"provenance": table.provenance, "outputs": list(table.outputs), "cells": cells}


def write_table(table: SweepTable, path, fmt: str = "csv") -> None:
    with open(path, "w", newline="") as fh:
        if fmt == "csv":
            write_csv(table, fh)
        elif fmt == "json":
            json.dump(table_to_json(table), fh, indent=2)
            fh.write("\n")
        else:
            raise SpecError(f"unknown output format {fmt!r}")


def read_csv(path) -> tuple[list[str], list[list[str]]]:
    """Header and raw string rows of a CSV written by :func:`write_csv`."""
    with open(path, newline="") as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    rows = list(csv.reader(lines))
    return rows[0], rows[1:]


def sweep_spec_from_config(cfg: Config) -> SweepSpec:
    """Build a spec from the config's ``sweep`` section.

    Each axis object takes ``param`` (or ``param_path``), ``min``, ``max``,
    ``points`` and optionally ``scale`` and ``unit``; ``outputs`` is optional.
    """
    if not cfg.sweep:
        raise SpecError("config has no 'sweep' section")
    raw = cfg.sweep
    unknown = set(raw) - {"axes", "outputs"}
    if unknown:
        raise SpecError(f"unknown key(s) in 'sweep': {', '.join(sorted(unknown))}")
    axes = []
    for a in raw.get("axes", []):
        if not isinstance(a, dict):
            raise SpecError("each sweep axis must be an object")
        extra = set(a) - {"param", "param_path", "min", "max", "points", "scale", "unit"}
        if extra:
            raise SpecError(f"unknown key(s) in sweep axis: {', '.join(sorted(extra))}")
        try:
            axes.append(
                Axis(
                    param_path=a.get("param_path", a.get("param")),
                    min=float(a["min"]),
                    max=float(a["max"]),
                    points=a["points"],
                    scale=a.get("scale", "linear"),
                    unit=a.get("unit"),
                )
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise SpecError(f"malformed sweep axis {a!r}: {exc}") from None
    outputs = tuple(raw.get("outputs", DEFAULT_OUTPUTS))
    return SweepSpec(cfg.replace(sweep=None), tuple(axes), outputs)
