import contextlib
import io

import pytest

from depinner.workbench.cli import main
from depinner.workbench.samples import DATA_DIR

CAMPAIGN_FLAGS = [
    "--v-values", "0.5,0.6,0.7,0.8,0.9,1.0,1.1,1.2",
    "--t-values-c", "20,40,60,80,100",
    "--tp-k", "1900", "--vth-v", "1.3", "--tau-s", "1e-5",
    "--seed", "4",
]


def run_cli(argv):
    """Run the CLI in-process; returns (exit code, stdout, stderr)."""
    out, err = io.StringIO(), io.StringIO()
    with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
        code = main([str(a) for a in argv])
    return code, out.getvalue(), err.getvalue()


@pytest.fixture(scope="session")
def workspace(tmp_path_factory):
    """Chained CLI inputs: campaign -> grid -> contour, plus the bundled samples."""
    d = tmp_path_factory.mktemp("cli")
    for f in ("103", "1000"):
        code, _, err = run_cli(["simulate-campaign", *CAMPAIGN_FLAGS, "--f-hz", f, "--out", d / f"campaign_{f}.json"])
        assert code == 0, err
    code, _, err = run_cli(["phase-grid", d / "campaign_1000.json", "--out", d / "grid.json"])
    assert code == 0, err
    code, _, err = run_cli(["contour", d / "grid.json", "--out", d / "contour.json"])
    assert code == 0, err
    return d


@pytest.fixture(scope="session")
def cli_cases(workspace):
    """One representative argv per subcommand."""
    d, s = workspace, DATA_DIR
    return {
        "fit-curve": ["fit-curve", s / "tuning_8Hz.csv"],
        "compare-fits": ["compare-fits", s / "tuning_81Hz.csv"],
        "phase-grid": ["phase-grid", d / "campaign_103.json"],
        "contour": ["contour", d / "grid.json", "--level", "0.01"],
        "boundary-line": ["boundary-line", d / "contour.json"],
        "fit-breakdown-boundary": ["fit-breakdown-boundary", s / "dc_breakdown.csv"],
        "classify": ["classify", "--v", "0.9", "--t-c", "85", "--f-hz", "1000",
                     "--tp-k", "1900", "--vth-v", "1.3", "--tau-s", "1e-5"],
        "self-heat": ["self-heat", "--v", "1", "--r-ohm", "5000", "--t-c", "85"],
        "deform-grid": ["deform-grid", d / "grid.json", "--r-ohm", "5000"],
        "simmons-fit": ["simmons-fit", s / "iv_J1.csv"],
        "ohmic-fit": ["ohmic-fit", s / "iv_J2.csv"],
        "detect-breakdown": ["detect-breakdown", s / "iv_J3.csv"],
        "breakdown-map": ["breakdown-map", "--thickness-nm", s / "barrier_thickness_nm.csv",
                          "--strength-v-per-nm", s / "barrier_strength_v_per_nm.csv"],
        "transmon-spectrum": ["transmon-spectrum", "--ec-mhz", "166", "--ej-ghz", "23.2"],
        "infer-ejec": ["infer-ejec", "--f01-ghz", "5.379", "--f12-ghz", "5.2"],
        "harmonics-report": ["harmonics-report", "--measured-csv", s / "transitions.csv"],
        "estimate-tau": ["estimate-tau", "--f-low", "103", "--f-high", "1000",
                         "--intercept-low", "424.95", "--intercept-high", "437.95"],
        "synth": ["synth", "--a", "0.04", "--c", "2", "--noise", "0.01", "--seed", "9"],
        "simulate-campaign": ["simulate-campaign", *CAMPAIGN_FLAGS, "--f-hz", "103"],
        "simulate-target": ["simulate-target", "--start-r-ohm", "5000", "--target-fraction", "0.3",
                            "--a", "0.1", "--c", "1e4"],
    }


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for n in sorted(results):
            terminalreporter.write_line(results[n])
