"""File formats.

Tuning curves are CSV with ``#`` metadata lines then a ``t_s,r_frac``
table. IV sweeps are CSV with a ``v_V,i_A`` header. Grids, records and
reports are JSON with unit-suffixed keys. Temperatures in CSV metadata are
celsius; JSON documents carry kelvin (``_K`` keys).
"""

from __future__ import annotations

import csv
import io
import json
import math
import warnings
from pathlib import Path

import numpy as np

from ..constants import celsius_to_kelvin, kelvin_to_celsius
from ..fitting import LogFit, TuningConditions, TuningCurve
from ..junction_iv import IVTrace
from ..phase_diagram import Cell, HeatedDiagram, PhaseGrid, TuningRecord

TUNING_HEADER = ["t_s", "r_frac"]
IV_HEADER = ["v_V", "i_A"]


def _num(x) -> str:
    return repr(float(x))


def _clean(obj):
    """Replace non-finite floats by None so the output is strict JSON."""
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else None
    if isinstance(obj, (np.floating, np.integer)):
        return _clean(obj.item())
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    return obj


def dumps(obj) -> str:
    return json.dumps(_clean(obj), indent=2, allow_nan=False) + "\n"


# -- tuning curves ---------------------------------------------------------

def format_tuning_csv(curve: TuningCurve) -> str:
    buf = io.StringIO()
    buf.write(f"# junction={curve.junction_id}\n")
    if curve.conditions is not None:
        c = curve.conditions
        buf.write(f"# v_amp_V={_num(c.v_amp)}\n")
        buf.write(f"# t_set_C={_num(kelvin_to_celsius(c.t_set))}\n")
        buf.write(f"# f_hz={_num(c.f_drive)}\n")
    buf.write(",".join(TUNING_HEADER) + "\n")
    for t, r in zip(curve.t, curve.r):
        buf.write(f"{_num(t)},{_num(r)}\n")
    return buf.getvalue()


def write_tuning_csv(path, curve: TuningCurve) -> None:
    Path(path).write_text(format_tuning_csv(curve), encoding="utf-8")


def _split_meta(text):
    meta, body = {}, []
    for line in text.splitlines():
        s = line.strip()
        if not s:
            continue
        if s.startswith("#"):
            key, sep, val = s[1:].partition("=")
            if sep:
                meta[key.strip()] = val.strip()
        else:
            body.append(s)
    return meta, body


def _table(body, header, source):
    rows = list(csv.reader(body))
    if not rows or [h.strip() for h in rows[0]] != header:
        raise ValueError(f"{source}: expected header {','.join(header)}")
    try:
        data = np.array([[float(x) for x in row] for row in rows[1:]], dtype=float)
    except ValueError as exc:
        raise ValueError(f"{source}: {exc}") from exc
    if data.size == 0:
        raise ValueError(f"{source}: no data rows")
    if data.ndim != 2 or data.shape[1] != len(header):
        raise ValueError(f"{source}: rows must have {len(header)} columns")
    return data


def parse_tuning_csv(text: str, source: str = "<string>") -> TuningCurve:
    meta, body = _split_meta(text)
    data = _table(body, TUNING_HEADER, source)
    conditions = None
    keys = ("v_amp_V", "t_set_C", "f_hz")
    if all(k in meta for k in keys):
        conditions = TuningConditions(
            v_amp=float(meta["v_amp_V"]),
            t_set=celsius_to_kelvin(float(meta["t_set_C"])),
            f_drive=float(meta["f_hz"]),
        )
    curve = TuningCurve(data[:, 0], data[:, 1], conditions, meta.get("junction", ""))
    if not 0 < curve.r[0] <= 10:
        warnings.warn(f"{source}: first sample r={curve.r[0]} is outside (0, 10]", stacklevel=2)
    return curve


def read_tuning_csv(path) -> TuningCurve:
    return parse_tuning_csv(Path(path).read_text(encoding="utf-8"), str(path))


# -- IV sweeps -------------------------------------------------------------

def format_iv_csv(trace: IVTrace) -> str:
    lines = [",".join(IV_HEADER)]
    lines += [f"{_num(v)},{_num(i)}" for v, i in zip(trace.v, trace.i)]
    return "\n".join(lines) + "\n"


def write_iv_csv(path, trace: IVTrace) -> None:
    Path(path).write_text(format_iv_csv(trace), encoding="utf-8")


def read_iv_csv(path) -> IVTrace:
    _, body = _split_meta(Path(path).read_text(encoding="utf-8"))
    data = _table(body, IV_HEADER, str(path))
    return IVTrace(data[:, 0], data[:, 1])


def read_matrix_csv(path) -> np.ndarray:
    return np.loadtxt(path, delimiter=",", comments="#", ndmin=2)


def read_column_csv(path, column: str) -> np.ndarray:
    """One named column of a headed CSV."""
    _, body = _split_meta(Path(path).read_text(encoding="utf-8"))
    rows = list(csv.reader(body))
    header = [h.strip() for h in rows[0]]
    if column not in header:
        raise ValueError(f"{path}: no column {column!r} (have {header})")
    k = header.index(column)
    return np.array([float(row[k]) for row in rows[1:]])


# -- records and grids -----------------------------------------------------

def record_to_dict(rec: TuningRecord) -> dict:
    c = rec.conditions
    out = {
        "junction": rec.junction_id,
        "v_amp_V": c.v_amp,
        "t_set_K": c.t_set,
        "f_drive_Hz": c.f_drive,
        "failed": rec.failed,
        "t_fail_s": rec.t_fail,
    }
    if rec.fit is not None:
        out["fit"] = log_fit_to_dict(rec.fit)
    return out


def record_from_dict(d: dict) -> TuningRecord:
    cond = TuningConditions(float(d["v_amp_V"]), float(d["t_set_K"]), float(d["f_drive_Hz"]))
    if d.get("failed"):
        return TuningRecord(d["junction"], cond, t_fail=float(d["t_fail_s"]))
    f = d["fit"]
    fit = LogFit(
        a=float(f["a"]),
        c=math.inf if f["c_per_s"] is None else float(f["c_per_s"]),
        offset=float(f["offset"]),
        rss=float(f["rss"]),
        converged=bool(f["converged"]),
        degenerate=bool(f["degenerate"]),
    )
    return TuningRecord(d["junction"], cond, fit=fit)


def log_fit_to_dict(fit: LogFit) -> dict:
    return {
        "a": fit.a,
        "c_per_s": fit.c,
        "offset": fit.offset,
        "rss": fit.rss,
        "converged": fit.converged,
        "degenerate": fit.degenerate,
    }


def grid_to_dict(grid: PhaseGrid) -> dict:
    cells = []
    for i, v in enumerate(grid.v_axis):
        for j, t in enumerate(grid.t_axis):
            c = grid.cells[i][j]
            cells.append(
                {
                    "i": i,
                    "j": j,
                    "v_V": float(v),
                    "t_K": float(t),
                    "a_values": list(c.a_values),
                    "n_failed": c.n_failed,
                    "n_total": c.n_total,
                }
            )
    return {
        "kind": "phase_grid",
        "f_drive_Hz": grid.f_drive,
        "v_axis_V": grid.v_axis.tolist(),
        "t_axis_K": grid.t_axis.tolist(),
        "cells": cells,
        "underpopulated": [list(ij) for ij in grid.underpopulated],
    }


def grid_from_dict(d: dict) -> PhaseGrid:
    if d.get("kind") != "phase_grid":
        raise ValueError("not a phase_grid document")
    nv, nt = len(d["v_axis_V"]), len(d["t_axis_K"])
    cells = [[None] * nt for _ in range(nv)]
    for c in d["cells"]:
        cells[c["i"]][c["j"]] = Cell(tuple(float(a) for a in c["a_values"]), int(c["n_failed"]), int(c["n_total"]))
    if any(c is None for row in cells for c in row):
        raise ValueError("phase_grid document is missing cells")
    return PhaseGrid(
        np.array(d["v_axis_V"], dtype=float),
        np.array(d["t_axis_K"], dtype=float),
        float(d["f_drive_Hz"]),
        cells,
        [tuple(ij) for ij in d.get("underpopulated", [])],
    )


def heated_to_dict(h: HeatedDiagram) -> dict:
    return {
        "kind": "heated_diagram",
        "f_drive_Hz": h.f_drive,
        "R_nominal_ohm": h.R_nominal,
        "k_W_per_mK": h.heat.k,
        "r_max_m": h.heat.r_max,
        "semi_infinite_factor": h.heat.semi_infinite_factor,
        "cells": [
            {
                "v_V": c.v,
                "t_set_K": c.t_set,
                "t_eff_K": c.t_eff,
                "a_values": list(c.a_values),
                "n_failed": c.n_failed,
                "n_total": c.n_total,
            }
            for c in h.cells
        ],
    }


def read_json(path):
    return json.loads(Path(path).read_text(encoding="utf-8"))
