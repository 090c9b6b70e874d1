import io
import json
import math

import numpy as np
import pytest

from fano_cool.config import load_config
from fano_cool.errors import AllUnstable, SpecError
from fano_cool.sweep import (
    CSV_COLUMNS,
    Axis,
    SweepCell,
    SweepSpec,
    SweepTable,
    find_minimum,
    format_field,
    read_csv,
    run_sweep,
    sweep_spec_from_config,
    table_to_csv,
    table_to_json,
    worker_count,
    write_table,
)


@pytest.fixture(scope="module")
def base():
    return load_config("fig4.json")


def _r_axis(points=9, lo=0.1, hi=0.9):
    return Axis("feedback.r_cbs", lo, hi, points)


def test_axis_validation(base):
    for bad in (
        Axis("feedback.r_cbs", 0.5, 0.5, 10),
        Axis("feedback.r_cbs", 0.6, 0.5, 10),
        Axis("feedback.r_cbs", 0.1, 0.5, 1),
        Axis("feedback.r_cbs", 0.1, 0.5, 2.5),
        Axis("feedback.r_cbs", 0.0, 0.5, 5, scale="log"),
        Axis("feedback.r_cbs", 0.1, math.inf, 5),
        Axis("feedback.scheme", 0.1, 0.5, 5),
        Axis("physical.nothing", 0.1, 0.5, 5),
    ):
        with pytest.raises(SpecError):
            SweepSpec(base, (bad,))
    with pytest.raises(SpecError):
        SweepSpec(base, ())
    with pytest.raises(SpecError):
        SweepSpec(base, (_r_axis(), _r_axis()))
    with pytest.raises(SpecError):
        SweepSpec(base, (_r_axis(),), outputs=("nonsense",))


def test_axis_values():
    assert np.allclose(Axis("feedback.r_cbs", 0.1, 0.9, 5).values(), [0.1, 0.3, 0.5, 0.7, 0.9])
    assert np.allclose(Axis("physical.kappa_2", 1e8, 1e10, 3, "log").values(), [1e8, 1e9, 1e10])


def test_sweep_deterministic_and_ordered(base):
    spec = SweepSpec(base, (_r_axis(4), Axis("physical.delta_Delta", -60, -40, 3, unit="omega_m")))
    a = run_sweep(spec, workers=1)
    b = run_sweep(spec, workers=1)
    assert table_to_csv(a) == table_to_csv(b)
    assert [c.index for c in a.cells] == [(i, j) for i in range(4) for j in range(3)]
    assert a.grid("n_fin").shape == (4, 3)
    assert a.provenance["axes"][1]["unit"] == "omega_m"


def test_serial_and_parallel_agree(base, monkeypatch):
    spec = SweepSpec(base, (_r_axis(40),))
    serial = run_sweep(spec, workers=1)
    parallel = run_sweep(spec, workers=2)
    assert table_to_csv(serial) == table_to_csv(parallel)


def test_worker_count_env(monkeypatch):
    monkeypatch.setenv("FANO_COOL_THREADS", "1")
    assert worker_count() == 1
    assert worker_count(3) >= 1


def test_cells_match_direct_reports(base):
    from fano_cool.config import set_param
    from fano_cool.observables import cool

    t = run_sweep(SweepSpec(base, (_r_axis(3),)), workers=1)
    for cell in t.cells:
        cfg = set_param(base, "feedback.r_cbs", cell.coords[0])
        assert cell.get("n_fin") == cool(cfg.physical, cfg.feedback).n_fin


def test_refinement_never_raises_minimum(base):
    coarse = run_sweep(SweepSpec(base, (_r_axis(5, 0.5, 0.9),)), workers=1)
    fine = run_sweep(SweepSpec(base, (_r_axis(9, 0.5, 0.9),)), workers=1)
    # the coarse grid is a subset of the fine one
    assert find_minimum(fine)[1] <= find_minimum(coarse)[1]
    assert np.allclose(fine.grid("n_fin")[::2], coarse.grid("n_fin"), rtol=1e-14)


def _table(values):
    ax = Axis("feedback.r_cbs", 0.0, 1.0, len(values))
    cells = tuple(
        SweepCell((i,), (float(x),), None if v is None else {"n_fin": v, "stable": True})
        for i, (x, v) in enumerate(zip(ax.values(), values))
    )
    return SweepTable((ax,), cells, ("n_fin", "stable"))


def test_minimum_tie_goes_to_lowest_index():
    coords, v = find_minimum(_table([3.0, 1.0, None, 1.0]))
    assert v == 1.0 and coords == (pytest.approx(1 / 3),)


def test_all_unstable_raises():
    with pytest.raises(AllUnstable):
        find_minimum(_table([None, None]))


def test_format_field():
    assert format_field(None) == ""
    assert format_field(True) == "true" and format_field(False) == "false"
    assert format_field(float("nan")) == ""
    assert float(format_field(0.1 + 0.2)) == 0.1 + 0.2


def test_csv_layout(base, tmp_path):
    spec = SweepSpec(base, (Axis("physical.delta_Delta", -60, 40, 6, unit="omega_m"),))
    t = run_sweep(spec, workers=1)
    text = table_to_csv(t)
    assert text.startswith("# fano-cool v")
    assert "\r\n" in text
    path = tmp_path / "out.csv"
    write_table(t, path)
    header, rows = read_csv(path)
    assert tuple(header) == CSV_COLUMNS
    assert len(rows) == 6 and all(len(r) == len(CSV_COLUMNS) for r in rows)
    assert all(r[1] == "" for r in rows)  # no second axis
    for r, cell in zip(rows, t.cells):
        if cell.stable:
            assert float(r[2]) == cell.get("n_fin")
            assert r[8] == "true"
        else:
            assert r[2] == "" and r[8] in ("false", "")


def test_unstable_cells_leave_empty_fields(base):
    # blue detuning of the narrow mode heats and destabilizes
    spec = SweepSpec(base, (Axis("physical.delta_Delta", -80, 80, 17, unit="omega_m"),))
    t = run_sweep(spec, workers=1)
    unstable = [c for c in t.cells if not c.stable]
    assert unstable
    for c in unstable:
        assert c.get("n_fin") is None


def test_json_output(base, tmp_path):
    spec = SweepSpec(base, (_r_axis(3),), outputs=("physicality_min_eig",))
    t = run_sweep(spec, workers=1)
    doc = table_to_json(t)
    assert "physicality_min_eig" in doc["outputs"] and "n_fin" in doc["outputs"]
    assert len(doc["cells"]) == 3
    path = tmp_path / "out.json"
    write_table(t, path, "json")
    assert json.loads(path.read_text())["provenance"]["base"]["feedback"]["scheme"] == "single"
    with pytest.raises(SpecError):
        write_table(t, path, "xml")


def test_spec_from_bundled_config():
    spec = sweep_spec_from_config(load_config("fig4a.json"))
    assert spec.shape == (100, 141)
    assert spec.base.sweep is None
    with pytest.raises(SpecError):
        sweep_spec_from_config(load_config("fig4.json"))


def test_errors_recorded_per_cell(base):
    # a zero-pump double-sided resonance is singular only at one point
    cfg = base.replace(physical=base.physical.replace(kappa_1=0.0, kappa_2=0.0, kappa_f=0.0, lambda_=0.0, gamma_m=1.0))
    spec = SweepSpec(cfg, (Axis("physical.Delta_a", -1.0, 1.0, 3),))
    t = run_sweep(spec, workers=1)
    mid = t.cells[1]
    assert mid.values is None and "SingularSteadyState" in mid.error
    assert "error" in table_to_json(t)["cells"][1]
    assert io.StringIO(table_to_csv(t)).getvalue().count("\r\n") == 5
