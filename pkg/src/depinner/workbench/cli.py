"""``depinner`` command-line interface.

Each subcommand reads files or flags, calls one library operation and prints
a JSON document (or writes it with ``--out``). Temperatures on the command
line are celsius; JSON output carries kelvin.

Exit codes: 0 success, 1 usage error, 2 data or convergence error.

``--config FILE`` supplies flag values from a JSON object whose keys are the
flag names (``"f_hz"`` or ``"f-hz"``); explicit flags win. ``DEPINNER_SEED``
sets the default seed of the generating subcommands.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import warnings
from pathlib import Path

import numpy as np

from ..constants import celsius_to_kelvin
from ..depinning import (
    DepinningParams,
    classify_point,
    estimate_tau,
    fit_depinning_boundary,
    lambda_factor,
)
from ..errors import DomainError, FitError
from ..fitting import TuningConditions, compare_models, fit_log_model
from ..junction_iv import (
    BarrierMaps,
    breakdown_from_maps,
    detect_breakdown,
    fit_simmons,
    ohmic_fit,
)
from ..phase_diagram import (
    FAILURE_CUTOFF_S,
    apply_self_heating,
    build_grid,
    extract_contour,
    failure_fraction_map,
    fit_boundary_line,
    record_from_curve,
    speed_matrix,
)
from ..self_heating import HeatParams, effective_temperature, heating_power, mean_temperature_rise
from ..transmon import TransmonParams, harmonic_deviation_report, infer_EJ_EC, spectrum
from . import io as fio
from .simulate import (
    DEFAULT_OVERSHOOT_RATE,
    CampaignSpec,
    records_from_runs,
    simulate_campaign,
    simulate_targeted_run,
    synth_tuning_curve,
)

SEED_ENV = "DEPINNER_SEED"
DEFAULT_AREA_NM2 = 8.86e4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"{SEED_ENV} must be an integer, got {raw!r}") from None


def _floats(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _need(args, *names):
    missing = [n for n in names if getattr(args, n, None) is None]
    if missing:
        flags = ", ".join("--" + n.replace("_", "-") for n in missing)
        raise UsageError(f"{args.command}: missing required {flags}")


def _emit(args, payload) -> None:
    text = payload if isinstance(payload, str) else fio.dumps(payload)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _depinning_from(args, need_tau=False) -> DepinningParams:
    _need(args, "tp_k", "vth_v")
    if need_tau:
        _need(args, "tau_s")
    return DepinningParams(args.tp_k, args.vth_v, args.mu, args.tau_s)


def _heat_from(args) -> HeatParams:
    return HeatParams(k=args.k, r_max=args.r_max_nm / 1e9, semi_infinite_factor=args.factor)


# -- handlers --------------------------------------------------------------

def log_fit_report(curve, fit) -> dict:
    c = curve.conditions
    out = {"junction": curve.junction_id}
    if c is not None:
        out.update(v_amp_V=c.v_amp, t_set_K=c.t_set, f_drive_Hz=c.f_drive)
    out["n_samples"] = len(curve)
    out.update(fio.log_fit_to_dict(fit))
    return out


def cmd_fit_curve(args):
    _need(args, "input")
    curve = fio.read_tuning_csv(args.input)
    return log_fit_report(curve, fit_log_model(curve))


def cmd_compare_fits(args):
    _need(args, "input")
    curve = fio.read_tuning_csv(args.input)
    cmp = compare_models(curve)
    pf = cmp.power_fit
    return {
        "junction": curve.junction_id,
        "log": fio.log_fit_to_dict(cmp.log_fit),
        "power": {"a": pf.a, "n": pf.n, "rss": pf.rss, "converged": pf.converged},
        "preferred": cmp.preferred,
    }


def _load_records(paths, cutoff, collapse_fraction):
    records = []
    for p in paths:
        p = Path(p)
        if p.is_dir():
            records += _load_records(sorted(p.glob("*.csv")), cutoff, collapse_fraction)
        elif p.suffix == ".json":
            doc = fio.read_json(p)
            records += [fio.record_from_dict(d) for d in doc["records"]]
        else:
            records.append(record_from_curve(fio.read_tuning_csv(p), cutoff, collapse_fraction))
    return records


def grid_report(grid) -> dict:
    doc = fio.grid_to_dict(grid)
    doc["median_a"] = speed_matrix(grid).tolist()
    doc["failure_fraction"] = failure_fraction_map(grid).tolist()
    return doc


def cmd_phase_grid(args):
    if not args.inputs:
        raise UsageError("phase-grid: give tuning CSV files, directories or a records JSON")
    records = _load_records(args.inputs, args.cutoff_s, args.collapse_fraction)
    if not records:
        raise DomainError("no tuning records found")
    f = args.f_hz
    if f is None:
        freqs = sorted({r.conditions.f_drive for r in records})
        if len(freqs) != 1:
            raise DomainError(f"records span several frequencies {freqs}; pass --f-hz")
        f = freqs[0]
    return grid_report(build_grid(records, f))


def cmd_contour(args):
    _need(args, "input")
    grid = fio.grid_from_dict(fio.read_json(args.input))
    pts = extract_contour(grid, args.level)
    return {
        "kind": "contour",
        "level": args.level,
        "f_drive_Hz": grid.f_drive,
        "points": [{"v_V": v, "t_K": t} for v, t in pts],
    }


def cmd_boundary_line(args):
    _need(args, "input")
    doc = fio.read_json(args.input)
    pts = [(p["v_V"], p["t_K"]) for p in doc["points"]]
    line = fit_boundary_line(pts, doc.get("f_drive_Hz", 0.0))
    return {
        "slope_K_per_V": line.slope,
        "intercept_K": line.intercept_T,
        "frequency_Hz": line.frequency,
        "n_points": len(pts),
    }


def cmd_fit_breakdown_boundary(args):
    _need(args, "input")
    t_c = fio.read_column_csv(args.input, "t_C")
    v_bd = fio.read_column_csv(args.input, "v_bd_V")
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        p = fit_depinning_boundary(zip(celsius_to_kelvin(t_c), v_bd), mu=args.mu)
    return {"T_P_K": p.T_P, "V_th_V": p.V_th, "mu": p.mu, "degenerate": bool(caught)}


def cmd_classify(args):
    _need(args, "v", "t_c", "f_hz")
    omega0 = 2 * math.pi * args.f_hz
    p = _depinning_from(args, need_tau=args.f_hz > 0)
    regime = classify_point(args.v, celsius_to_kelvin(args.t_c), omega0, p)
    return {"v_V": args.v, "t_K": celsius_to_kelvin(args.t_c), "f_drive_Hz": args.f_hz, "regime": regime.value}


def cmd_self_heat(args):
    _need(args, "v", "r_ohm")
    h = _heat_from(args)
    P = heating_power(args.v, args.r_ohm)
    dT = mean_temperature_rise(P, h)
    out = {"v_amp_V": args.v, "R_ohm": args.r_ohm, "power_W": P, "delta_T_K": dT}
    if args.t_c is not None:
        out["t_ambient_K"] = celsius_to_kelvin(args.t_c)
        out["t_eff_K"] = effective_temperature(out["t_ambient_K"], args.v, args.r_ohm, h)
    return out


def cmd_deform_grid(args):
    _need(args, "input", "r_ohm")
    grid = fio.grid_from_dict(fio.read_json(args.input))
    return fio.heated_to_dict(apply_self_heating(grid, args.r_ohm, _heat_from(args)))


def cmd_simmons_fit(args):
    _need(args, "input")
    trace = fio.read_iv_csv(args.input)
    v_bd = detect_breakdown(trace, args.jump_factor)
    if v_bd is not None:
        trace = trace.truncate(v_bd)
    fit = fit_simmons(trace, args.area_nm2 / 1e18)
    return {
        "d_nm": fit.d * 1e9,
        "phi_eV": fit.phi,
        "area_nm2": args.area_nm2,
        "rss": fit.rss,
        "converged": fit.converged,
        "condition_number": fit.condition_number,
        "ill_conditioned": fit.ill_conditioned,
        "suspect": fit.suspect,
        "breakdown_V": v_bd,
        "n_points": int(trace.v.size),
    }


def cmd_ohmic_fit(args):
    _need(args, "input")
    trace = fio.read_iv_csv(args.input)
    return {"resistance_ohm": ohmic_fit(trace, args.window_mv * 1e-3), "window_V": args.window_mv * 1e-3}


def cmd_detect_breakdown(args):
    _need(args, "input")
    trace = fio.read_iv_csv(args.input)
    return {"breakdown_V": detect_breakdown(trace, args.jump_factor), "jump_factor": args.jump_factor}


def cmd_breakdown_map(args):
    _need(args, "thickness_nm", "strength_v_per_nm")
    t = fio.read_matrix_csv(args.thickness_nm) * 1e-9
    e = fio.read_matrix_csv(args.strength_v_per_nm) * 1e9
    return {"breakdown_V": breakdown_from_maps(BarrierMaps(t, e)), "shape": list(t.shape)}


def _transmon_from(args):
    _need(args, "ec_mhz", "ej_ghz")
    return TransmonParams(args.ec_mhz * 1e6, args.ej_ghz * 1e9, args.n_charge, args.n_levels)


def cmd_transmon_spectrum(args):
    p = _transmon_from(args)
    s = spectrum(p)
    return {
        "E_C_Hz": p.E_C,
        "E_J_Hz": p.E_J,
        "n_charge": s.n_charge,
        "transitions_Hz": s.transitions.tolist(),
        "anharmonicity_Hz": s.anharmonicity,
    }


def cmd_infer_ejec(args):
    _need(args, "f01_ghz", "f12_ghz")
    p = infer_EJ_EC(args.f01_ghz * 1e9, args.f12_ghz * 1e9, args.n_charge, args.n_levels)
    return {"E_C_Hz": p.E_C, "E_J_Hz": p.E_J, "EJ_over_EC": p.E_J / p.E_C}


def cmd_harmonics_report(args):
    if args.measured_csv:
        measured = fio.read_column_csv(args.measured_csv, "f_Hz")
    elif args.measured:
        measured = np.array(args.measured) * 1e9
    else:
        raise UsageError("harmonics-report: give --measured or --measured-csv")
    if args.ec_mhz is not None or args.ej_ghz is not None:
        p = _transmon_from(args)
        inferred = False
    else:
        if measured.size < 2:
            raise DomainError("need f01 and f12 to infer E_C and E_J")
        p = infer_EJ_EC(measured[0], measured[1], args.n_charge, args.n_levels)
        inferred = True
    rows = harmonic_deviation_report(measured, p)
    return {
        "E_C_Hz": p.E_C,
        "E_J_Hz": p.E_J,
        "inferred": inferred,
        "deviations": [{"transition": f"{k}-{k + 1}", "delta_f_Hz": d} for k, d in rows],
    }


def cmd_estimate_tau(args):
    _need(args, "f_low", "f_high", "intercept_low", "intercept_high")
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        tau = estimate_tau(args.f_low, args.f_high, args.intercept_low, args.intercept_high)
    out = {"tau_s": tau, "adiabatic": not caught}
    if not caught:
        out["lambda_low"] = lambda_factor(2 * math.pi * args.f_low, tau)
        out["lambda_high"] = lambda_factor(2 * math.pi * args.f_high, tau)
    return out


def cmd_synth(args):
    _need(args, "a", "c")
    seed = default_seed() if args.seed is None else args.seed
    cond = None
    if args.v is not None and args.t_c is not None and args.f_hz is not None:
        cond = TuningConditions(args.v, celsius_to_kelvin(args.t_c), args.f_hz)
    curve = synth_tuning_curve(
        args.a, args.c, args.duration_s, args.n_samples, args.noise, seed, cond, args.junction
    )
    return fio.format_tuning_csv(curve)


def campaign_from(args) -> CampaignSpec:
    _need(args, "v_values", "t_values_c", "f_hz")
    seed = default_seed() if args.seed is None else args.seed
    p = _depinning_from(args, need_tau=args.f_hz > 0)
    return CampaignSpec(
        v_values=tuple(args.v_values),
        t_values=tuple(celsius_to_kelvin(t) for t in args.t_values_c),
        f_drive=args.f_hz,
        depinning=p,
        speed_scale=args.speed_scale,
        junctions_per_cell=args.junctions_per_cell,
        noise=args.noise,
        seed=seed,
    )


def cmd_simulate_campaign(args):
    spec = campaign_from(args)
    runs = simulate_campaign(spec)
    if args.curves_dir:
        d = Path(args.curves_dir)
        d.mkdir(parents=True, exist_ok=True)
        for run in runs:
            fio.write_tuning_csv(d / f"{run.curve.junction_id}.csv", run.curve)
    records = records_from_runs(runs)
    return {
        "kind": "campaign",
        "seed": spec.seed,
        "f_drive_Hz": spec.f_drive,
        "records": [
            dict(fio.record_to_dict(rec), regime=run.regime.value, a_true=run.a_true)
            for rec, run in zip(records, runs)
        ],
    }


def cmd_simulate_target(args):
    _need(args, "start_r_ohm", "target_fraction", "a", "c")
    res = simulate_targeted_run(args.start_r_ohm, args.target_fraction, args.a, args.c, args.overshoot_rate)
    return {
        "target_fraction": args.target_fraction,
        "final_fraction": res.final_fraction,
        "final_resistance_ohm": res.final_resistance,
        "t_target_s": res.t_target,
        "overshoot_rate": args.overshoot_rate,
    }


# -- parser ----------------------------------------------------------------

def _add_depinning(p):
    p.add_argument("--tp-k", type=float, help="depinning temperature T_P [K]")
    p.add_argument("--vth-v", type=float, help="threshold voltage V_th [V]")
    p.add_argument("--mu", type=float, default=1.0)
    p.add_argument("--tau-s", type=float, help="hop timescale tau [s]")


def _add_heat(p):
    p.add_argument("--k", type=float, default=30.0, help="thermal conductivity [W/(m K)]")
    p.add_argument("--r-max-nm", type=float, default=100.0, help="averaging radius [nm]")
    p.add_argument("--factor", type=float, default=2.0, help="semi-infinite solid factor")


def _add_transmon(p):
    p.add_argument("--ec-mhz", type=float)
    p.add_argument("--ej-ghz", type=float)
    p.add_argument("--n-charge", type=int, default=30)
    p.add_argument("--n-levels", type=int, default=6)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="depinner", description="Depinning analysis of junction tuning data.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write output here instead of stdout")
    common.add_argument("--config", help="JSON file of flag values")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)

    def add(name, handler, help_):
        p = sub.add_parser(name, help=help_, parents=[common])
        p.set_defaults(handler=handler)
        return p

    p = add("fit-curve", cmd_fit_curve, "fit a tuning curve to r = a ln(ct)")
    p.add_argument("input", nargs="?")
    p = add("compare-fits", cmd_compare_fits, "log-law vs power-law fit of one curve")
    p.add_argument("input", nargs="?")

    p = add("phase-grid", cmd_phase_grid, "build a speed/failure grid from tuning data")
    p.add_argument("inputs", nargs="*", help="tuning CSVs, directories of them, or a records JSON")
    p.add_argument("--f-hz", type=float)
    p.add_argument("--cutoff-s", type=float, default=FAILURE_CUTOFF_S)
    p.add_argument("--collapse-fraction", type=float, default=0.1)

    p = add("contour", cmd_contour, "level crossings of the cell-median speed")
    p.add_argument("input", nargs="?")
    p.add_argument("--level", type=float, default=0.01)
    p = add("boundary-line", cmd_boundary_line, "straight-line fit T(V) to contour points")
    p.add_argument("input", nargs="?")

    p = add("fit-breakdown-boundary", cmd_fit_breakdown_boundary, "fit T_P, V_th to DC breakdown (t_C,v_bd_V CSV)")
    p.add_argument("input", nargs="?")
    p.add_argument("--mu", type=float, default=1.0)

    p = add("classify", cmd_classify, "regime of one (V, T, f) point")
    p.add_argument("--v", type=float, help="voltage amplitude [V]")
    p.add_argument("--t-c", type=float, help="temperature [C]")
    p.add_argument("--f-hz", type=float, help="drive frequency [Hz], 0 for DC")
    _add_depinning(p)

    p = add("self-heat", cmd_self_heat, "Joule heating of a biased junction")
    p.add_argument("--v", type=float, help="tuning voltage amplitude [V]")
    p.add_argument("--r-ohm", type=float, help="junction resistance [ohm]")
    p.add_argument("--t-c", type=float, help="ambient temperature [C]")
    _add_heat(p)

    p = add("deform-grid", cmd_deform_grid, "shift grid temperatures by self-heating")
    p.add_argument("input", nargs="?")
    p.add_argument("--r-ohm", type=float, help="nominal junction resistance [ohm]")
    _add_heat(p)

    p = add("simmons-fit", cmd_simmons_fit, "fit barrier thickness and height to an IV sweep")
    p.add_argument("input", nargs="?")
    p.add_argument("--area-nm2", type=float, default=DEFAULT_AREA_NM2)
    p.add_argument("--jump-factor", type=float, default=5.0)
    p = add("ohmic-fit", cmd_ohmic_fit, "junction resistance from the low-bias slope")
    p.add_argument("input", nargs="?")
    p.add_argument("--window-mv", type=float, default=50.0)
    p = add("detect-breakdown", cmd_detect_breakdown, "voltage of the first current jump")
    p.add_argument("input", nargs="?")
    p.add_argument("--jump-factor", type=float, default=5.0)
    p = add("breakdown-map", cmd_breakdown_map, "min of thickness x strength over barrier maps")
    p.add_argument("--thickness-nm", help="CSV matrix of local thickness [nm]")
    p.add_argument("--strength-v-per-nm", help="CSV matrix of local dielectric strength [V/nm]")

    p = add("transmon-spectrum", cmd_transmon_spectrum, "transition frequencies of a transmon")
    _add_transmon(p)
    p = add("infer-ejec", cmd_infer_ejec, "E_C, E_J from the first two transitions")
    p.add_argument("--f01-ghz", type=float)
    p.add_argument("--f12-ghz", type=float)
    p.add_argument("--n-charge", type=int, default=30)
    p.add_argument("--n-levels", type=int, default=6)
    p = add("harmonics-report", cmd_harmonics_report, "measured minus predicted transitions")
    p.add_argument("--measured", type=_floats, help="comma-separated transitions [GHz]")
    p.add_argument("--measured-csv", help="CSV with an f_Hz column")
    _add_transmon(p)

    p = add("estimate-tau", cmd_estimate_tau, "hop timescale from two creep-boundary intercepts")
    p.add_argument("--f-low", type=float)
    p.add_argument("--f-high", type=float)
    p.add_argument("--intercept-low", type=float, help="[K]")
    p.add_argument("--intercept-high", type=float, help="[K]")

    p = add("synth", cmd_synth, "synthetic log-law tuning curve as CSV")
    p.add_argument("--a", type=float)
    p.add_argument("--c", type=float)
    p.add_argument("--duration-s", type=float, default=150.0)
    p.add_argument("--n-samples", type=int, default=200)
    p.add_argument("--noise", type=float, default=0.0)
    p.add_argument("--seed", type=int)
    p.add_argument("--v", type=float)
    p.add_argument("--t-c", type=float)
    p.add_argument("--f-hz", type=float)
    p.add_argument("--junction", default="synthetic")

    p = add("simulate-campaign", cmd_simulate_campaign, "synthetic tuning campaign over a (V, T) grid")
    p.add_argument("--v-values", type=_floats, help="comma-separated voltages [V]")
    p.add_argument("--t-values-c", type=_floats, help="comma-separated temperatures [C]")
    p.add_argument("--f-hz", type=float)
    _add_depinning(p)
    p.add_argument("--speed-scale", type=float, default=1e-3, help="speed parameter per K into creep")
    p.add_argument("--junctions-per-cell", type=int, default=3)
    p.add_argument("--noise", type=float, default=0.005)
    p.add_argument("--seed", type=int)
    p.add_argument("--curves-dir", help="also write every curve as CSV here")

    p = add("simulate-target", cmd_simulate_target, "targeted tuning run with post-target drift")
    p.add_argument("--start-r-ohm", type=float)
    p.add_argument("--target-fraction", type=float)
    p.add_argument("--a", type=float)
    p.add_argument("--c", type=float)
    p.add_argument("--overshoot-rate", type=float, default=DEFAULT_OVERSHOOT_RATE)
    return parser


def _apply_config(parser, argv):
    args = parser.parse_args(argv)
    if args.command is None:
        parser.error("a subcommand is required")
    if not args.config:
        return args
    try:
        cfg = json.loads(Path(args.config).read_text(encoding="utf-8"))
    except (OSError, ValueError) as exc:
        raise UsageError(f"cannot read config {args.config}: {exc}") from None
    if not isinstance(cfg, dict):
        raise UsageError("config must be a JSON object")
    sub = parser._subparsers._group_actions[0].choices[args.command]
    known = {a.dest for a in sub._actions}
    defaults = {}
    for key, val in cfg.items():
        dest = key.replace("-", "_")
        if dest not in known:
            raise UsageError(f"unknown config key {key!r} for {args.command}")
        defaults[dest] = val
    sub.set_defaults(**defaults)
    return parser.parse_args(argv)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        try:
            args = _apply_config(parser, argv)
        except SystemExit as exc:
            return int(exc.code or 0)
        payload = args.handler(args)
        _emit(args, payload)
    except UsageError as exc:
        print(f"depinner: error: {exc}", file=sys.stderr)
        return 1
    except (DomainError, FitError, ValueError, OSError, KeyError) as exc:
        print(f"depinner: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    return 0
