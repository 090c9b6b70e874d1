"""Command-line interface: ``fano-cool {report,modes,sweep,stability,selfcheck}``.

Exit codes: 0 success, 1 configuration or validation error, 2 solver error,
3 sweep in which no cell produced a steady state.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

from . import __version__
from .config import Config, load_config
from .errors import AllUnstable, ConfigError, FanoCoolError, SolverError
from .observables import cool, linearize, optical_modes
from .selfcheck import run_selfcheck
from .solvers import StabilityMethod, char_poly, eigenvalues, stability
from .sweep import (
    CSV_COLUMNS,
    CSV_FIELDS,
    SweepTable,
    find_minimum,
    format_field,
    run_sweep,
    sweep_spec_from_config,
    table_to_csv,
    table_to_json,
)

EXIT_OK, EXIT_CONFIG, EXIT_SOLVER, EXIT_ALL_UNSTABLE = 0, 1, 2, 3

# 1D series grouped by panel; every column is optional
_LINE_PANELS = (
    ("phonon statistics", True, ("n_fin", "var_x", "var_p", "equip_dev")),
    ("narrow optical mode / Omega_m", False, ("omega_minus", "kappa_minus")),
)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def _column_has_data(table: SweepTable, column: str) -> bool:
    return any(v is not None for v in table.column(CSV_FIELDS[column]))


def _axis_label(table: SweepTable, k: int) -> str:
    ax = table.axes[k]
    unit = ax.as_dict()["unit"]
    return f"{ax.param_path} [{unit}]" if unit and unit != "1" else ax.param_path


def emit_plot_script(table: SweepTable, csv_path: str, output: str | None = None, terminal: str = "pngcairo size 900,700") -> str:
    """Standalone gnuplot script plotting a sweep CSV.

    One axis gives line plots (log-scale phonon statistics and, separately,
    the narrow optical mode); two axes give a log-scale heat map of ``n_fin``
    in which cells without a value stay blank.  Columns without any data
    are left out.
    """
    output = output or str(Path(csv_path).with_suffix(".png"))
    col = {name: i + 1 for i, name in enumerate(CSV_COLUMNS)}
    lines = [
        f"# generated by fano-cool v{__version__}",
        f"set terminal {terminal}",
        f'set output "{output}"',
        'set datafile separator ","',
        "set key autotitle columnhead",
        "set grid",
    ]
    x_log = table.axes[0].scale == "log"

    if len(table.axes) == 1:
        panels = []
        for title, logy, names in _LINE_PANELS:
            present = [n for n in names if _column_has_data(table, n)]
            if present:
                panels.append((title, logy, present))
        if len(panels) > 1:
            lines.append(f"set multiplot layout {len(panels)},1")
        lines.append(f'set xlabel "{_axis_label(table, 0)}"')
        if x_log:
            lines.append("set logscale x")
        for title, logy, present in panels:
            lines.append(f'set title "{title}"')
            lines.append("set logscale y" if logy else "unset logscale y")
            series = [f'"{csv_path}" using 1:{col[n]} with linespoints pt 7 ps 0.4 title "{n}"' for n in present]
            lines.append("plot " + ", \\\n     ".join(series))
        if len(panels) > 1:
            lines.append("unset multiplot")
        return "\n".join(lines) + "\n"

    y_log = table.axes[1].scale == "log"
    xs, ys = ([float(v) for v in vals] for vals in table.axis_values())

    def half_width(values, log):
        if log:
            return f"{math.sqrt(values[1] / values[0])!r}", True
        return f"{0.5 * (values[1] - values[0])!r}", False

    hx, mx = half_width(xs, x_log)
    hy, my = half_width(ys, y_log)
    xlo, xhi = ("($1/dx)", "($1*dx)") if mx else ("($1-dx)", "($1+dx)")
    ylo, yhi = ("($2/dy)", "($2*dy)") if my else ("($2-dy)", "($2+dy)")
    lines += [
        f"dx = {hx}",
        f"dy = {hy}",
        f'set xlabel "{_axis_label(table, 0)}"',
        f'set ylabel "{_axis_label(table, 1)}"',
        'set cblabel "n_fin"',
        "set logscale cb",
        "set format cb \"10^{%L}\"",
        "set palette rgb 33,13,10",
        "set style fill solid noborder",
        "unset key",
        "set object 1 rectangle from graph 0,0 to graph 1,1 fillcolor rgb \"white\" behind",
    ]
    if x_log:
        lines.append("set logscale x")
    if y_log:
        lines.append("set logscale y")
    lines.append(f"set xrange [{xs[0]!r}:{xs[-1]!r}]")
    lines.append(f"set yrange [{ys[0]!r}:{ys[-1]!r}]")
    if _column_has_data(table, "n_fin"):
        # rows with an empty n_fin field are skipped, so unstable cells stay white
        lines.append(
            f'plot "{csv_path}" using 1:2:{xlo}:{xhi}:{ylo}:{yhi}:{col["n_fin"]} '
            "with boxxyerror fillcolor palette"
        )
    else:
        lines.append(f'plot "{csv_path}" using 1:2 with points pt 0 notitle')
    return "\n".join(lines) + "\n"


def _load(args) -> Config:
    if not args.config:
        raise ConfigError("--config is required")
    return load_config(args.config, args.set or [])


def _write(text: str, path: str | None) -> None:
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


def _dumps(obj) -> str:
    return json.dumps(obj, indent=2, allow_nan=False) + "\n"


def _dict_to_csv(d: dict) -> str:
    buf = io.StringIO(newline="")
    w = csv.writer(buf)
    w.writerow(list(d))
    w.writerow([format_field(v) for v in d.values()])
    return buf.getvalue()


def _cmd_report(args) -> int:
    cfg = _load(args)
    d = cool(cfg.physical, cfg.feedback, cfg.pump).to_dict()
    _write(_dict_to_csv(d) if args.format == "csv" else _dumps(d), args.output)
    return EXIT_OK


def _complex(z: complex) -> dict:
    return {"re": z.real, "im": z.imag}


def _cmd_modes(args) -> int:
    cfg = _load(args)
    m = optical_modes(cfg.physical, cfg.feedback)
    d = {
        "units": "Omega_m",
        "Omega_m": cfg.physical.Omega_m,
        "omega_plus": _complex(m.omega_plus),
        "kappa_plus": m.kappa_plus,
        "omega_minus": _complex(m.omega_minus),
        "kappa_minus": m.kappa_minus,
        "narrow": ("plus", "minus")[m.narrow_index],
    }
    if args.format == "csv":
        flat = {
            "omega_plus_re": m.omega_plus.real, "omega_plus_im": m.omega_plus.imag,
            "omega_minus_re": m.omega_minus.real, "omega_minus_im": m.omega_minus.imag,
            "kappa_plus": m.kappa_plus, "kappa_minus": m.kappa_minus, "narrow": d["narrow"],
        }
        _write(_dict_to_csv(flat), args.output)
    else:
        _write(_dumps(d), args.output)
    return EXIT_OK


def _cmd_stability(args) -> int:
    cfg = _load(args)
    M = linearize(cfg.physical, cfg.feedback, cfg.pump).dd.M
    verdict = stability(M, args.method)
    ev = eigenvalues(M)
    d = verdict.as_dict()
    d["units"] = "Omega_m"
    d["eigenvalues"] = [_complex(complex(z)) for z in sorted(ev, key=lambda z: (z.real, z.imag))]
    d["char_poly"] = [float(c) for c in char_poly(M, exact=True)]
    if args.format == "csv":
        _write(_dict_to_csv({k: d[k] for k in ("stable", "marginal", "max_real_eigenvalue", "method")}), args.output)
    else:
        _write(_dumps(d), args.output)
    return EXIT_OK


def _cmd_sweep(args) -> int:
    cfg = _load(args)
    spec = sweep_spec_from_config(cfg)
    table = run_sweep(spec, workers=args.workers)
    if args.format == "json":
        text = json.dumps(table_to_json(table), indent=2) + "\n"
    else:
        text = table_to_csv(table)
    _write(text, args.output)
    if args.plot_script:
        if args.format != "csv" or not args.output:
            raise ConfigError("--plot-script needs CSV output written to a file (-o)")
        Path(args.plot_script).write_text(emit_plot_script(table, args.output))
    errors = sum(c.error is not None for c in table.cells)
    unstable = sum(c.values is not None and not c.stable for c in table.cells)
    print(f"{len(table.cells)} cells, {unstable} unstable, {errors} failed", file=sys.stderr)
    try:
        coords, value = find_minimum(table, "n_fin")
    except AllUnstable:
        print("no stable cell", file=sys.stderr)
        return EXIT_ALL_UNSTABLE
    print(f"minimum n_fin = {value:.6g} at {', '.join(f'{x:.6g}' for x in coords)}", file=sys.stderr)
    return EXIT_OK


def _cmd_selfcheck(args) -> int:
    results = run_selfcheck()
    for name, ok, detail in results:
        print(f"{'PASS' if ok else 'FAIL'}  {name}" + (f"  ({detail})" if detail else ""))
    failed = sum(not ok for _, ok, _ in results)
    print(f"{len(results) - failed}/{len(results)} checks passed")
    return EXIT_OK if failed == 0 else EXIT_CONFIG


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="fano-cool", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"fano-cool {__version__}")
    sub = parser.add_subparsers(dest="verb", required=True, parser_class=_Parser)

    def common(p, formats=True):
        p.add_argument("--config", help="JSON config file (or the name of a bundled one)")
        p.add_argument("--set", action="append", metavar="PATH=VALUE", help="override a parameter (config-file units)")
        p.add_argument("-o", "--output", help="write data here instead of standard output")
        if formats:
            p.add_argument("--format", choices=("csv", "json"), default="json")

    common(sub.add_parser("report", help="steady-state cooling report for one point"))
    common(sub.add_parser("modes", help="optical normal modes"))
    p = sub.add_parser("stability", help="stability verdict of the drift matrix")
    common(p)
    p.add_argument("--method", choices=[m.value for m in StabilityMethod], default=StabilityMethod.BOTH.value)
    p = sub.add_parser("sweep", help="grid sweep defined by the config's 'sweep' section")
    common(p, formats=False)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--plot-script", metavar="PATH", help="also write a gnuplot script for the CSV")
    p.add_argument("--workers", type=int, help="worker processes (default: FANO_COOL_THREADS or all cores)")
    sub.add_parser("selfcheck", help="run the embedded golden checks")
    return parser


_COMMANDS = {
    "report": _cmd_report,
    "modes": _cmd_modes,
    "stability": _cmd_stability,
    "sweep": _cmd_sweep,
    "selfcheck": _cmd_selfcheck,
}


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return _COMMANDS[args.verb](args)
    except SolverError as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except AllUnstable as exc:
        print(f"all unstable: {exc}", file=sys.stderr)
        return EXIT_ALL_UNSTABLE
    except (FanoCoolError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
