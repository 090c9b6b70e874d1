import json
import subprocess
import sys

import pytest

from fano_cool.cli import emit_plot_script, main
from fano_cool.config import load_config, resolve_config_path
from fano_cool.sweep import Axis, SweepSpec, find_minimum, read_csv, run_sweep


def _small_sweep_config(tmp_path, points=12, extra=None):
    doc = json.loads(resolve_config_path("fig4b.json").read_text())
    doc["sweep"]["axes"][0]["points"] = points
    doc["sweep"]["axes"][0]["min"] = 0.4
    doc["sweep"]["axes"][0]["max"] = 0.9
    if extra:
        extra(doc)
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(doc))
    return path


def test_report_json(capsys):
    assert main(["report", "--config", "fig4.json"]) == 0
    d = json.loads(capsys.readouterr().out)
    assert d["stable"] and d["n_fin"] == pytest.approx(0.5452467, rel=1e-6)


def test_report_csv_with_override(capsys):
    assert main(["report", "--config", "fig4.json", "--set", "feedback.r_cbs=0.5", "--format", "csv"]) == 0
    header, row = capsys.readouterr().out.strip().splitlines()
    fields = dict(zip(header.split(","), row.split(",")))
    assert fields["stable"] == "true"
    assert float(fields["n_fin"]) > 0.5452467


def test_modes(capsys):
    assert main(["modes", "--config", "fig2-eq3.json"]) == 0
    d = json.loads(capsys.readouterr().out)
    assert d["units"] == "Omega_m"
    assert d["narrow"] in ("plus", "minus")
    assert d["kappa_plus"] > 0 and d["kappa_minus"] > 0


def test_stability(capsys):
    assert main(["stability", "--config", "fig4.json", "--method", "routh-hurwitz"]) == 0
    d = json.loads(capsys.readouterr().out)
    assert d["stable"] and len(d["eigenvalues"]) == 6 and len(d["char_poly"]) == 7


def test_selfcheck(capsys):
    assert main(["selfcheck"]) == 0
    assert "checks passed" in capsys.readouterr().out


def test_exit_codes(tmp_path, capsys):
    assert main(["report"]) == 1  # no config
    assert main(["report", "--config", str(tmp_path / "missing.json")]) == 1
    assert main(["report", "--config", "fig4.json", "--set", "feedback.r_cbs=2"]) == 1
    assert main(["frobnicate"]) == 1
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["report", "--config", str(bad)]) == 1
    assert main(["sweep", "--config", "fig4.json"]) == 1  # no sweep section


def test_solver_error_exit_code(monkeypatch, capsys):
    import fano_cool.observables as obs
    from fano_cool.errors import IllConditioned

    def fail(*a, **k):
        raise IllConditioned("forced", residual=1.0)

    monkeypatch.setattr(obs, "solve_lyapunov", fail)
    assert main(["report", "--config", "fig4.json"]) == 2
    assert "forced" in capsys.readouterr().err


def test_all_unstable_exit_code(tmp_path, capsys):
    # blue-detuned, strongly pumped cavity: parametric instability everywhere
    doc = {
        "physical": {
            "Omega_m": 0.13e6, "gamma_m": 0.12, "kappa_1": 0.25e6, "kappa_2": 0.25e6,
            "g_a0": 50.0, "eps_p": 2.4e9, "n_m": 9.6e4, "Delta_a": -0.13e6,
        },
        "feedback": {"scheme": "double", "eta": 0.9, "phi": 0.0},
        "sweep": {"axes": [{"param": "feedback.phi", "min": -0.05, "max": 0.05, "points": 4}]},
    }
    cfg = tmp_path / "blue.json"
    cfg.write_text(json.dumps(doc))
    assert main(["sweep", "--config", str(cfg)]) == 3
    assert "no stable cell" in capsys.readouterr().err


def test_sweep_csv_minimum_matches_library(tmp_path, capsys):
    cfg = _small_sweep_config(tmp_path)
    out = tmp_path / "out.csv"
    assert main(["sweep", "--config", str(cfg), "-o", str(out), "--workers", "1"]) == 0
    err = capsys.readouterr().err
    header, rows = read_csv(out)
    vals = [(float(r[0]), float(r[2])) for r in rows if r[2]]
    best = min(vals, key=lambda t: t[1])
    spec_cfg = load_config(cfg)
    from fano_cool.sweep import sweep_spec_from_config

    coords, value = find_minimum(run_sweep(sweep_spec_from_config(spec_cfg), workers=1))
    assert best == (coords[0], value)
    assert f"{value:.6g}" in err


def test_plot_script_requires_file_output(tmp_path, capsys):
    cfg = _small_sweep_config(tmp_path, 3)
    assert main(["sweep", "--config", str(cfg), "--plot-script", str(tmp_path / "p.gp")]) == 1


def test_plot_script_1d(tmp_path, capsys):
    cfg = _small_sweep_config(tmp_path, 5)
    out, gp = tmp_path / "o.csv", tmp_path / "o.gp"
    assert main(["sweep", "--config", str(cfg), "-o", str(out), "--plot-script", str(gp)]) == 0
    text = gp.read_text()
    assert str(out) in text and "linespoints" in text
    assert "np.float64" not in text


def test_plot_script_2d_and_omitted_series(tmp_path):
    base = load_config("fig4.json")
    spec = SweepSpec(
        base,
        (Axis("feedback.r_cbs", 0.3, 0.9, 3), Axis("physical.delta_Delta", -80, 80, 3, unit="omega_m")),
    )
    t = run_sweep(spec, workers=1)
    text = emit_plot_script(t, "grid.csv")
    assert "boxxyerror" in text and "set logscale cb" in text
    assert 'set output "grid.png"' in text

    # a single-axis table whose cells carry no phonon data drops those series
    from fano_cool.sweep import SweepCell, SweepTable

    ax = Axis("feedback.r_cbs", 0.1, 0.9, 2)
    cells = tuple(
        SweepCell((i,), (x,), {"n_fin": None, "var_x": None, "var_p": None, "equipartition_dev": None,
                               "omega_minus": 1.0, "kappa_minus": 0.5, "stable": False})
        for i, x in enumerate((0.1, 0.9))
    )
    text = emit_plot_script(SweepTable((ax,), cells, ("n_fin",)), "x.csv")
    assert "using 1:3" not in text and "using 1:7" in text
    assert "multiplot" not in text


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "fano_cool", "--version"], capture_output=True, text=True)
    assert out.returncode == 0 and "fano-cool" in out.stdout
