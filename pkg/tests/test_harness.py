import json
import math

import numpy as np
import pytest

from dephased_battery.errors import ConfigError
from dephased_battery.harness import (
    ResultRecord,
    SweepSpec,
    charging_time,
    optimal_gamma,
    reproduce,
    steady_energetics,
    sweep_gamma,
    sweep_n,
)
from dephased_battery.harness.cli import main
from dephased_battery.harness.io import format_number, matrix_from_pairs, matrix_pairs, read_csv, write_csv
from dephased_battery.lindblad import ModelParams


# ---------------------------------------------------------------- io


@pytest.mark.parametrize(
    "value, text",
    [(0.5, "0.5"), (2.0e-4, "2.000000000000e-04"), (-1e-5, "-1.000000000000e-05"), (0.0, "0"), (3, "3"),
     (1234.5, "1234.5"), (None, ""), (float("nan"), "nan")],
)
def test_number_format(value, text):
    assert format_number(value) == text


def test_csv_round_trip(tmp_path):
    path = write_csv(tmp_path / "x.csv", ["a", "b"], [(1, 1e-7), (2, 0.25)])
    header, table = read_csv(path)
    assert header == ["a", "b"]
    np.testing.assert_array_equal(table, [[1, 1e-7], [2, 0.25]])
    assert path.read_text(encoding="utf-8").splitlines()[0] == "a,b"


def test_matrix_pairs_round_trip():
    mat = np.array([[0.5, 0.1 - 0.2j], [0.1 + 0.2j, 0.5]])
    pairs = matrix_pairs(mat)
    assert pairs[0][1] == [0.1, -0.2]
    np.testing.assert_array_equal(matrix_from_pairs(pairs), mat)


# ---------------------------------------------------------------- config types


@pytest.mark.parametrize(
    "kwargs",
    [dict(n_list=(), drive_ratio=0.5), dict(n_list=(2,), drive_ratio=0.5, gamma_list=(0.1, -1.0)),
     dict(n_list=(2,), drive_ratio=0.5, gamma_scaling="absolute"), dict(n_list=(0,), drive_ratio=0.5),
     dict(n_list=(2,), drive_ratio=0.5, gamma_scaling="linear")],
)
def test_spec_validation(kwargs):
    with pytest.raises(ConfigError):
        SweepSpec(**kwargs)


def test_spec_from_dict_and_grids():
    spec = SweepSpec.from_dict({"n_list": [3, 1], "drive_ratio": 0.5, "gamma_list": [0.1, 1.0], "gamma_scaling": "absolute"})
    np.testing.assert_allclose(spec.gamma_grid(3), [0.1, 1.0])
    assert spec.params(3, 0.2) == ModelParams(3, 0.5, 0.2)
    with pytest.raises(ConfigError):
        SweepSpec.from_dict({"n_list": [1], "drive_ratio": 0.5, "colour": "red"})
    relative = SweepSpec(n_list=(2,), drive_ratio=10.0)
    grid = relative.gamma_grid(2)
    assert len(grid) == 5 and grid[-1] / grid[0] == pytest.approx(10.0)


def test_record_requires_finite_values():
    with pytest.raises(ConfigError):
        ResultRecord(params={}, energy=math.inf)
    assert ResultRecord(params={}).meta["status"] == "ok"


# ---------------------------------------------------------------- sweeps


def test_steady_record_is_self_describing():
    record = steady_energetics(ModelParams(5, 0.5, 1.0))
    again = steady_energetics(ModelParams(**record.params))
    assert again.energy == pytest.approx(record.energy, abs=1e-12)
    assert again.ergotropy == pytest.approx(record.ergotropy, abs=1e-12)
    assert record.meta["bounds_satisfied"]
    assert record.meta["solver"]["kernel_dim"] == 6


def test_energy_and_ergotropy_grow_linearly():
    records = sweep_n(SweepSpec(n_list=tuple(range(10, 21)), drive_ratio=0.5))
    energy = np.array([r.energy for r in records])
    erg = np.array([r.ergotropy for r in records])
    np.testing.assert_allclose(np.diff(energy), 0.5, atol=1e-9)
    steps = np.diff(erg)
    assert np.ptp(steps) < 0.1 * steps.mean()


def test_weak_drive_ratio_above_strong_drive():
    ns = tuple(range(2, 21))
    weak = sweep_n(SweepSpec(n_list=ns, drive_ratio=0.2))
    strong = sweep_n(SweepSpec(n_list=ns, drive_ratio=10.0))
    assert all(w.ratio > s.ratio for w, s in zip(weak, strong))


def test_sweep_output_is_byte_identical(tmp_path):
    spec = SweepSpec(n_list=(1, 2, 3, 6), drive_ratio=0.2)
    texts = []
    for k in range(2):
        rows = [(r.params["n_qubits"], r.energy, r.ergotropy, r.ratio) for r in sweep_n(spec)]
        texts.append(write_csv(tmp_path / f"run{k}.csv", ["N", "E_B", "ergotropy", "ratio"], rows).read_bytes())
    assert texts[0] == texts[1]


@pytest.fixture(scope="module")
def single_qubit_scan():
    return sweep_gamma(SweepSpec(n_list=(1,), drive_ratio=0.5), 1)


def test_single_qubit_scan_is_u_shaped(single_qubit_scan):
    scan = single_qubit_scan
    assert scan.meta["interior_minimum"]
    valid = scan.taus[scan.valid]
    assert valid[0] > scan.tau_star and valid[-1] > scan.tau_star
    assert 2.5 < scan.tau_star < 3.5


def test_optimum_stable_under_grid_refinement(single_qubit_scan):
    grid = single_qubit_scan.meta["grid"]
    fine = np.exp(np.linspace(np.log(grid[0]), np.log(grid[-1]), 2 * len(grid) - 1))
    rescan = optimal_gamma(ModelParams(1, 0.5, 1.0), fine)
    assert rescan.tau_star == pytest.approx(single_qubit_scan.tau_star, rel=0.02)


def test_weak_drive_optimal_time_grows():
    spec = SweepSpec(n_list=(1, 2), drive_ratio=0.2)
    assert sweep_gamma(spec, 2).tau_star > sweep_gamma(spec, 1).tau_star


def test_charging_point_metadata():
    point = charging_time(ModelParams(2, 10.0, 2.0))
    assert point.e_stationary == pytest.approx(1.0, abs=1e-9)
    assert len(point.meta["tau_history"]) == 3
    assert point.meta["max_trace_deviation"] <= 1e-10
    assert point.t_final == pytest.approx(20 * point.meta["tau_history"][-2])


# ---------------------------------------------------------------- pipelines


def test_reproduce_fig2(tmp_path):
    manifest = reproduce("fig2", tmp_path, {"n_list": [1, 2, 3]})
    header, table = read_csv(tmp_path / "fig2" / "fig2.csv")
    assert header[:3] == ["N", "E_B", "ergotropy"]
    np.testing.assert_allclose(table[:, 1], [0.5, 1.0, 1.5], atol=1e-9)
    saved = json.loads((tmp_path / "fig2" / "manifest.json").read_text())
    assert saved["figure"] == "fig2" and "numpy" in saved["versions"]
    assert all(p["status"] == "ok" for p in manifest["points"])


def test_reproduce_fig3(tmp_path):
    manifest = reproduce("fig3", tmp_path)
    header, table = read_csv(tmp_path / "fig3" / "fig3.csv")
    assert header == ["n", "population", "trial"] and table.shape == (9, 3)
    state = json.loads((tmp_path / "fig3" / "fig3_state.json").read_text())
    assert np.trace(matrix_from_pairs(state["battery_state"])).real == pytest.approx(1.0)
    assert manifest["edge_fit"].mu < 0


def test_reproduce_table_a_and_fig5(tmp_path):
    manifest = reproduce("table_a", tmp_path, {"n_list": [4, 5, 6, 7, 8]})
    assert set(manifest["table"]) == {"strong", "intermediate", "weak"}
    assert all(v["a"] > 0 for v in manifest["table"].values())
    manifest = reproduce("fig5", tmp_path, {"n_lists": {"strong": [1]}})
    assert manifest["files"] == ["fig5_strong_N1.csv"]


def test_reproduce_rejects_unknown(tmp_path):
    with pytest.raises(ConfigError):
        reproduce("fig9", tmp_path)
    with pytest.raises(ConfigError):
        reproduce("fig2", tmp_path, {"colour": 1})


# ---------------------------------------------------------------- command line


def test_cli_steady_and_ergotropy(tmp_path, capsys):
    assert main(["--out", str(tmp_path), "steady", "--n-qubits", "3", "--f", "0.5", "--gamma-c", "1"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["energy"] == pytest.approx(1.5)
    assert main(["--out", str(tmp_path), "ergotropy", "--state", str(tmp_path / "steady.json")]) == 0
    again = json.loads(capsys.readouterr().out)
    assert again["ergotropy"] == pytest.approx(out["ergotropy"], abs=1e-12)
    assert again["bounds_satisfied"]


def test_cli_config_file_and_override(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"n_qubits": 2, "f": 10.0, "gamma_c": 1.0}))
    assert main(["--config", str(cfg), "--out", str(tmp_path), "steady", "--f", "0.2"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["ratio"] == pytest.approx(0.5438769398, abs=1e-9)


def test_cli_evolve_and_fit(tmp_path, capsys):
    args = ["--out", str(tmp_path), "evolve", "--n-qubits", "1", "--f", "0.5", "--gamma-c", "1",
            "--t-final", "60", "--method", "expm"]
    assert main(args) == 0
    capsys.readouterr()
    assert main(["--out", str(tmp_path), "fit", "charging", str(tmp_path / "evolve.csv")]) == 0
    fit = json.loads(capsys.readouterr().out)
    assert 2.0 < fit["tau"] < 4.0


def test_cli_sweep_n_and_linear_fits(tmp_path, capsys):
    assert main(["--out", str(tmp_path), "sweep-n", "--n-list", "4", "5", "6", "7", "--drive-ratio", "0.5"]) == 0
    capsys.readouterr()
    header, table = read_csv(tmp_path / "sweep_n.csv")
    write_csv(tmp_path / "ratios.csv", ["N", "ratio"], table[:, [0, 3]])
    assert main(["--out", str(tmp_path), "fit", "deficit", str(tmp_path / "ratios.csv")]) == 0
    assert json.loads(capsys.readouterr().out)["a"] > 0
    write_csv(tmp_path / "pl.csv", ["N", "tau"], [(n, 3 * n**2) for n in (1, 2, 4)])
    assert main(["--out", str(tmp_path), "fit", "power-law", str(tmp_path / "pl.csv")]) == 0
    assert json.loads(capsys.readouterr().out)["b"] == pytest.approx(2.0)


@pytest.mark.parametrize(
    "argv",
    [
        ["steady", "--n-qubits", "2", "--f", "0.5", "--gamma-c", "-1"],
        ["steady", "--n-qubits", "2"],
        ["teleport"],
        ["steady", "--n-qubits", "two"],
        ["sweep-n", "--drive-ratio", "0.5"],
    ],
)
def test_cli_invalid_config_exit_code(tmp_path, argv, capsys):
    assert main(["--out", str(tmp_path)] + argv) == 1
    assert capsys.readouterr().err


def test_cli_missing_config_file(tmp_path):
    assert main(["--config", str(tmp_path / "nope.json"), "--out", str(tmp_path), "steady"]) == 1


def test_cli_numerical_failure_exit_code(tmp_path, capsys):
    t = np.linspace(0, 2, 200)
    write_csv(tmp_path / "short.csv", ["t", "E_B"], zip(t, 1 - np.exp(-t)))
    assert main(["--out", str(tmp_path), "fit", "charging", str(tmp_path / "short.csv")]) == 2
    assert "saturated" in capsys.readouterr().err
