import json
import math
import subprocess
import sys
import shutil

import numpy as np
import pytest

from depinner.constants import celsius_to_kelvin
from depinner.depinning import DepinningParams, classify_point, estimate_tau, fit_depinning_boundary
from depinner.fitting import compare_models, fit_log_model
from depinner.junction_iv import BarrierMaps, breakdown_from_maps, detect_breakdown, fit_simmons, ohmic_fit
from depinner.phase_diagram import apply_self_heating, build_grid, extract_contour, fit_boundary_line
from depinner.self_heating import HeatParams, effective_temperature, heating_power, mean_temperature_rise
from depinner.transmon import TransmonParams, harmonic_deviation_report, infer_EJ_EC, spectrum
from depinner.workbench import io as fio
from depinner.workbench.cli import grid_report, log_fit_report
from depinner.workbench.samples import DATA_DIR
from depinner.workbench.simulate import (
    DEFAULT_OVERSHOOT_RATE,
    CampaignSpec,
    records_from_runs,
    simulate_campaign,
    simulate_targeted_run,
    synth_tuning_curve,
)

from conftest import run_cli

GOLDEN = __import__("pathlib").Path(__file__).parent / "golden"
SUBCOMMANDS = [
    "fit-curve", "compare-fits", "phase-grid", "contour", "boundary-line", "fit-breakdown-boundary",
    "classify", "self-heat", "deform-grid", "simmons-fit", "ohmic-fit", "detect-breakdown",
    "breakdown-map", "transmon-spectrum", "infer-ejec", "harmonics-report", "estimate-tau",
    "synth", "simulate-campaign", "simulate-target",
]


def ok(argv):
    code, out, err = run_cli(argv)
    assert code == 0, err
    return out


def doc(argv):
    return json.loads(ok(argv))


def test_every_subcommand_has_a_case(cli_cases):
    assert sorted(cli_cases) == sorted(SUBCOMMANDS)


@pytest.mark.parametrize("name", SUBCOMMANDS)
def test_subcommand_deterministic(cli_cases, name):
    assert ok(cli_cases[name]) == ok(cli_cases[name])


# -- outputs equal the library calls --------------------------------------------------

def test_fit_curve_matches_library(cli_cases):
    curve = fio.read_tuning_csv(DATA_DIR / "tuning_8Hz.csv")
    assert ok(cli_cases["fit-curve"]) == fio.dumps(log_fit_report(curve, fit_log_model(curve)))


def test_compare_fits_matches_library(cli_cases):
    cmp = compare_models(fio.read_tuning_csv(DATA_DIR / "tuning_81Hz.csv"))
    d = doc(cli_cases["compare-fits"])
    assert d["log"]["a"] == cmp.log_fit.a and d["power"]["n"] == cmp.power_fit.n
    assert d["preferred"] == cmp.preferred


def test_phase_grid_matches_library(cli_cases, workspace):
    recs = [fio.record_from_dict(r) for r in fio.read_json(workspace / "campaign_103.json")["records"]]
    assert ok(cli_cases["phase-grid"]) == fio.dumps(grid_report(build_grid(recs, 103.0)))


def test_campaign_json_matches_library(workspace):
    d = fio.read_json(workspace / "campaign_1000.json")
    spec = CampaignSpec(
        tuple(np.round(np.arange(0.5, 1.21, 0.1), 10).tolist()),
        tuple(celsius_to_kelvin(t) for t in (20.0, 40.0, 60.0, 80.0, 100.0)),
        1000.0, DepinningParams(1900.0, 1.3, tau=1e-5), seed=4,
    )
    recs = records_from_runs(simulate_campaign(spec))
    assert [fio.record_from_dict(r) for r in d["records"]] == recs


def test_contour_and_line_match_library(cli_cases, workspace):
    grid = fio.grid_from_dict(fio.read_json(workspace / "grid.json"))
    pts = extract_contour(grid, 0.01)
    d = doc(cli_cases["contour"])
    assert [(p["v_V"], p["t_K"]) for p in d["points"]] == pts
    line = fit_boundary_line(pts, 1000.0)
    b = doc(cli_cases["boundary-line"])
    assert b["slope_K_per_V"] == line.slope and b["intercept_K"] == line.intercept_T


def test_fit_breakdown_boundary_matches_library(cli_cases):
    t = fio.read_column_csv(DATA_DIR / "dc_breakdown.csv", "t_C")
    v = fio.read_column_csv(DATA_DIR / "dc_breakdown.csv", "v_bd_V")
    p = fit_depinning_boundary(zip(celsius_to_kelvin(t), v))
    d = doc(cli_cases["fit-breakdown-boundary"])
    assert (d["T_P_K"], d["V_th_V"], d["degenerate"]) == (p.T_P, p.V_th, False)


def test_classify_matches_library(cli_cases):
    p = DepinningParams(1900.0, 1.3, tau=1e-5)
    assert doc(cli_cases["classify"])["regime"] == classify_point(0.9, 358.15, 2 * math.pi * 1000, p).value


def test_self_heat_matches_library(cli_cases):
    d = doc(cli_cases["self-heat"])
    P = heating_power(1.0, 5000.0)
    assert d["power_W"] == P and d["delta_T_K"] == mean_temperature_rise(P, HeatParams())
    assert d["t_eff_K"] == effective_temperature(358.15, 1.0, 5000.0, HeatParams())


def test_deform_grid_matches_library(cli_cases, workspace):
    grid = fio.grid_from_dict(fio.read_json(workspace / "grid.json"))
    assert ok(cli_cases["deform-grid"]) == fio.dumps(fio.heated_to_dict(apply_self_heating(grid, 5000.0)))


def test_simmons_fit_matches_library(cli_cases):
    trace = fio.read_iv_csv(DATA_DIR / "iv_J1.csv")
    v_bd = detect_breakdown(trace)
    fit = fit_simmons(trace.truncate(v_bd), 8.86e-14)
    d = doc(cli_cases["simmons-fit"])
    assert d["d_nm"] == fit.d * 1e9 and d["phi_eV"] == fit.phi and d["breakdown_V"] == v_bd


def test_iv_subcommands_match_library(cli_cases):
    assert doc(cli_cases["ohmic-fit"])["resistance_ohm"] == ohmic_fit(fio.read_iv_csv(DATA_DIR / "iv_J2.csv"))
    assert doc(cli_cases["detect-breakdown"])["breakdown_V"] == detect_breakdown(fio.read_iv_csv(DATA_DIR / "iv_J3.csv"))
    t = fio.read_matrix_csv(DATA_DIR / "barrier_thickness_nm.csv") * 1e-9
    e = fio.read_matrix_csv(DATA_DIR / "barrier_strength_v_per_nm.csv") * 1e9
    assert doc(cli_cases["breakdown-map"])["breakdown_V"] == breakdown_from_maps(BarrierMaps(t, e))


def test_transmon_subcommands_match_library(cli_cases):
    s = spectrum(TransmonParams(166e6, 23.2e9))
    assert doc(cli_cases["transmon-spectrum"])["transitions_Hz"] == s.transitions.tolist()
    p = infer_EJ_EC(5.379e9, 5.2e9)
    d = doc(cli_cases["infer-ejec"])
    assert (d["E_C_Hz"], d["E_J_Hz"]) == (p.E_C, p.E_J)
    measured = fio.read_column_csv(DATA_DIR / "transitions.csv", "f_Hz")
    q = infer_EJ_EC(measured[0], measured[1])
    rows = harmonic_deviation_report(measured, q)
    d = doc(cli_cases["harmonics-report"])
    assert [r["delta_f_Hz"] for r in d["deviations"]] == [x for _, x in rows]
    assert d["deviations"][2]["transition"] == "2-3" and d["inferred"]


def test_harmonics_report_with_given_params():
    d = doc(["harmonics-report", "--measured", "5.379,5.2", "--ec-mhz", "166", "--ej-ghz", "23.2"])
    assert not d["inferred"] and len(d["deviations"]) == 2


def test_estimate_tau(cli_cases):
    d = doc(cli_cases["estimate-tau"])
    assert d["tau_s"] == estimate_tau(103, 1000, 424.95, 437.95)
    assert 1e-37 < d["tau_s"] < 1e-35 and d["adiabatic"]
    assert d["lambda_low"] > d["lambda_high"] > 0


def test_synth_matches_library(cli_cases):
    curve = synth_tuning_curve(0.04, 2.0, noise=0.01, seed=9, junction_id="synthetic")
    assert ok(cli_cases["synth"]) == fio.format_tuning_csv(curve)


def test_simulate_target_matches_library(cli_cases):
    res = simulate_targeted_run(5000.0, 0.3, 0.1, 1e4, DEFAULT_OVERSHOOT_RATE)
    d = doc(cli_cases["simulate-target"])
    assert d["final_fraction"] == res.final_fraction and d["t_target_s"] == res.t_target
    assert d["final_fraction"] == pytest.approx(0.346)


def test_synth_then_fit_pipeline(tmp_path):
    p = tmp_path / "c.csv"
    ok(["synth", "--a", "0.03", "--c", "5", "--v", "0.9", "--t-c", "80", "--f-hz", "81", "--out", p])
    d = doc(["fit-curve", p])
    assert d["a"] == pytest.approx(0.03, rel=1e-6) and d["t_set_K"] == pytest.approx(353.15)


def test_phase_grid_from_curve_directory(tmp_path):
    d = tmp_path / "curves"
    ok(["simulate-campaign", "--v-values", "0.9,1.0", "--t-values-c", "80,100", "--f-hz", "103",
        "--tp-k", "1900", "--vth-v", "1.3", "--tau-s", "1e-5", "--curves-dir", d, "--out", tmp_path / "c.json"])
    assert len(list(d.glob("*.csv"))) == 12
    g = doc(["phase-grid", d])
    assert g["f_drive_Hz"] == 103.0 and len(g["median_a"]) == 2


# -- golden file -------------------------------------------------------------------------

def test_fit_curve_golden(cli_cases):
    assert ok(cli_cases["fit-curve"]) == (GOLDEN / "fit_curve_tuning_8Hz.json").read_text(encoding="utf-8")


# -- errors -------------------------------------------------------------------------------

@pytest.mark.parametrize(
    "argv",
    [[], ["no-such-command"], ["fit-curve"], ["classify", "--v", "1"], ["synth", "--a", "0.1"],
     ["transmon-spectrum", "--ec-mhz", "x"], ["simulate-campaign", "--v-values", "a,b"]],
)
def test_usage_errors(argv):
    code, out, err = run_cli(argv)
    assert code == 1 and out == ""
    assert "usage" in err or "error" in err


@pytest.mark.parametrize(
    "argv",
    [["fit-curve", "/nonexistent.csv"],
     ["estimate-tau", "--f-low", "103", "--f-high", "1000", "--intercept-low", "430", "--intercept-high", "430"],
     ["self-heat", "--v", "1", "--r-ohm", "-5"],
     ["infer-ejec", "--f01-ghz", "5", "--f12-ghz", "5.1"],
     ["simulate-target", "--start-r-ohm", "5000", "--target-fraction", "0.3", "--a", "0.01", "--c", "1"]],
)
def test_data_errors(argv):
    code, out, err = run_cli(argv)
    assert code == 2 and out == "" and err


def test_iv_file_for_tuning_command():
    assert run_cli(["fit-curve", DATA_DIR / "iv_J1.csv"])[0] == 2


# -- seeds, config, output -----------------------------------------------------------------

SYNTH = ["synth", "--a", "0.04", "--c", "2", "--noise", "0.01"]


def test_seed_env(monkeypatch):
    monkeypatch.delenv("DEPINNER_SEED", raising=False)
    base = ok(SYNTH)
    monkeypatch.setenv("DEPINNER_SEED", "17")
    env = ok(SYNTH)
    assert env != base
    assert env == ok(SYNTH + ["--seed", "17"])
    assert ok(SYNTH + ["--seed", "0"]) == base


def test_seed_env_must_be_integer(monkeypatch):
    monkeypatch.setenv("DEPINNER_SEED", "abc")
    assert run_cli(SYNTH)[0] == 1


def test_config_supplies_flags(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"ec-mhz": 166, "ej_ghz": 23.2}))
    from_cfg = ok(["transmon-spectrum", "--config", cfg])
    assert from_cfg == ok(["transmon-spectrum", "--ec-mhz", "166", "--ej-ghz", "23.2"])
    override = doc(["transmon-spectrum", "--config", cfg, "--ec-mhz", "200"])
    assert override["E_C_Hz"] == 200e6


@pytest.mark.parametrize("content", ['{"bogus": 1}', "[1, 2]", "not json"])
def test_config_errors(tmp_path, content):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(content)
    assert run_cli(["transmon-spectrum", "--config", cfg])[0] == 1


def test_out_writes_file(tmp_path, cli_cases):
    p = tmp_path / "o.json"
    code, out, _ = run_cli(cli_cases["estimate-tau"] + ["--out", p])
    assert code == 0 and out == ""
    assert p.read_text(encoding="utf-8") == ok(cli_cases["estimate-tau"])


def test_output_is_strict_json(cli_cases):
    for name in SUBCOMMANDS:
        if name != "synth":
            json.loads(ok(cli_cases[name]), parse_constant=lambda c: pytest.fail(f"{name}: {c}"))


@pytest.mark.skipif(shutil.which("depinner") is None, reason="console script not installed")
def test_console_script():
    res = subprocess.run(["depinner", "infer-ejec", "--f01-ghz", "5.379", "--f12-ghz", "5.2"],
                         capture_output=True, text=True, check=False)
    assert res.returncode == 0
    assert json.loads(res.stdout)["EJ_over_EC"] > 20


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "depinner", "--help"], capture_output=True, text=True, check=False)
    assert res.returncode == 0 and "simulate-campaign" in res.stdout
