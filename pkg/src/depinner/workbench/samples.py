"""Bundled sample data, all synthetic.

None of these files are measurements. They are generated here, with fixed
seeds, so the CLI has realistic inputs to chew on and the tests can check the
package copy against a fresh regeneration.

Tuning-curve time convention: ``t`` counts seconds from drive turn-on and
the first sample sits at ``r = 1``, so log-law fits absorb the origin
into ``c``.
"""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np

from ..constants import celsius_to_kelvin
from ..depinning import DepinningParams, depinning_voltage
from ..fitting import TuningConditions, TuningCurve
from ..junction_iv import IVTrace, simmons_current
from ..transmon import TransmonParams, spectrum
from . import io as fio
from .simulate import SHORTED_R, synth_tuning_curve

DATA_DIR = Path(__file__).resolve().parent.parent / "data"
BANNER = "# synthetic sample data generated by depinner.workbench.samples; not a measurement\n"

# (file stem, drive frequency Hz, speed parameter a)
TUNING_SAMPLES = (("tuning_8Hz", 8.0, 0.040), ("tuning_81Hz", 81.0, 0.028), ("tuning_811Hz", 811.0, 0.016))
TUNING_T_C = 80.0
TUNING_V = 0.95
TUNING_NOISE = 0.003
FAILED_T_FAIL_S = 37.0

# (file stem, d nm, phi eV, breakdown V)
IV_SAMPLES = (("iv_J1", 0.80, 1.45, 1.25), ("iv_J2", 0.79, 1.50, 1.38), ("iv_J3", 0.81, 1.42, 1.47))
IV_AREA_M2 = 8.86e-14
IV_STEP_V = 0.01
IV_V_MAX = 1.7
IV_NOISE = 0.01
SHORT_OHM = 100.0

DC_PARAMS = DepinningParams(T_P=1000.0, V_th=1.4)
DC_T_C = (20.0, 50.0, 80.0, 110.0, 140.0, 170.0, 200.0)

QUDIT = TransmonParams(E_C=166e6, E_J=23.2e9)
PLANTED_HZ = (0.0, 0.0, 0.4e6, -0.7e6, 1.1e6)


def tuning_samples() -> dict[str, TuningCurve]:
    out = {}
    t0 = 150.0 / 200
    for k, (stem, f, a) in enumerate(TUNING_SAMPLES):
        cond = TuningConditions(TUNING_V, celsius_to_kelvin(TUNING_T_C), f)
        out[stem] = synth_tuning_curve(
            a, math.exp(1.0 / a) / t0, noise=TUNING_NOISE, seed=100 + k, conditions=cond, junction_id=stem
        )
    base = out["tuning_811Hz"]
    cond = TuningConditions(1.15, celsius_to_kelvin(TUNING_T_C), 811.0)
    r = np.where(base.t < FAILED_T_FAIL_S, base.r * 1.2, SHORTED_R)
    out["tuning_failed"] = TuningCurve(base.t, r, cond, "tuning_failed")
    return out


def iv_samples() -> dict[str, IVTrace]:
    v = np.round(np.arange(0.0, IV_V_MAX + IV_STEP_V / 2, IV_STEP_V), 10)
    out = {}
    for k, (stem, d_nm, phi, v_bd) in enumerate(IV_SAMPLES):
        rng = np.random.default_rng(200 + k)
        i = simmons_current(v, d_nm * 1e-9, phi, IV_AREA_M2) * (1.0 + rng.normal(0.0, IV_NOISE, v.size))
        i = np.where(v >= v_bd - 1e-9, v / SHORT_OHM, i)
        out[stem] = IVTrace(v, i)
    return out


def dc_breakdown_table() -> str:
    rng = np.random.default_rng(300)
    lines = ["t_C,v_bd_V"]
    for t_c in DC_T_C:
        v = depinning_voltage(celsius_to_kelvin(t_c), DC_PARAMS)
        for _ in range(3):
            lines.append(f"{t_c!r},{float(v * (1.0 + rng.normal(0.0, 0.005)))!r}")
    return "\n".join(lines) + "\n"


def transitions_table() -> str:
    f = spectrum(QUDIT).transitions
    lines = ["k,f_Hz"] + [f"{k},{float(f[k] + PLANTED_HZ[k])!r}" for k in range(f.size)]
    return "\n".join(lines) + "\n"


def _matrix(m) -> str:
    return "".join(",".join(repr(float(x)) for x in row) + "\n" for row in m)


def barrier_maps() -> tuple[str, str]:
    rng = np.random.default_rng(400)
    thickness = np.clip(rng.normal(2.0, 0.15, (16, 16)), 1.2, None)  # nm
    strength = np.clip(rng.normal(0.6, 0.03, (16, 16)), 0.4, None)  # V/nm
    return _matrix(np.round(thickness, 4)), _matrix(np.round(strength, 4))


def sample_files() -> dict[str, str]:
    """File name -> exact text of every bundled sample."""
    files = {}
    for stem, curve in tuning_samples().items():
        files[f"{stem}.csv"] = BANNER + fio.format_tuning_csv(curve)
    for stem, trace in iv_samples().items():
        files[f"{stem}.csv"] = BANNER + fio.format_iv_csv(trace)
    files["dc_breakdown.csv"] = BANNER + dc_breakdown_table()
    files["transitions.csv"] = BANNER + transitions_table()
    t, e = barrier_maps()
    files["barrier_thickness_nm.csv"] = BANNER + t
    files["barrier_strength_v_per_nm.csv"] = BANNER + e
    return files


def write_sample_data(directory=DATA_DIR) -> list[Path]:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    written = []
    for name, text in sorted(sample_files().items()):
        path = directory / name
        path.write_text(text, encoding="utf-8")
        written.append(path)
    return written


if __name__ == "__main__":
    for p in write_sample_data():
        print(p)
