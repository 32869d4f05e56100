"""Tuning-speed phase diagrams on a (voltage, temperature) grid.

Each cell of a :class:`PhaseGrid` holds the fitted speed parameters of the
junctions tuned at that voltage amplitude and set temperature, plus a count
of junctions that failed. Cells are summarised by their median speed;
failures never enter the median.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from .depinning import BoundaryLine
from .errors import DomainError, UndefinedCellError
from .fitting import LogFit, TuningConditions, TuningCurve, detect_failure, fit_log_model
from .self_heating import HeatParams, mean_temperature_rise, heating_power

FAILURE_CUTOFF_S = 150.0
MIN_JUNCTIONS_PER_CELL = 3


@dataclass(frozen=True)
class TuningRecord:
    junction_id: str
    conditions: TuningConditions
    fit: Optional[LogFit] = None
    t_fail: Optional[float] = None

    def __post_init__(self):
        if (self.fit is None) == (self.t_fail is None):
            raise ValueError("a tuning record holds exactly one of a fit or a failure time")

    @property
    def failed(self):
        return self.t_fail is not None


@dataclass(frozen=True)
class Cell:
    a_values: tuple
    n_failed: int
    n_total: int

    def __post_init__(self):
        if not 0 <= self.n_failed <= self.n_total:
            raise ValueError("need 0 <= n_failed <= n_total")
        if len(self.a_values) != self.n_total - self.n_failed:
            raise ValueError("a_values must hold one entry per successful junction")


@dataclass
class PhaseGrid:
    v_axis: np.ndarray  # V, ascending
    t_axis: np.ndarray  # K, ascending
    f_drive: float  # Hz
    cells: list  # cells[i][j] at (v_axis[i], t_axis[j])
    underpopulated: list = field(default_factory=list)

    def __post_init__(self):
        self.v_axis = np.asarray(self.v_axis, dtype=float)
        self.t_axis = np.asarray(self.t_axis, dtype=float)
        for name, ax in (("v_axis", self.v_axis), ("t_axis", self.t_axis)):
            if ax.ndim != 1 or ax.size < 2 or np.any(np.diff(ax) <= 0):
                raise ValueError(f"{name} must be strictly ascending with at least 2 points")
        if len(self.cells) != self.v_axis.size or any(len(row) != self.t_axis.size for row in self.cells):
            raise ValueError("cells shape does not match the axes")

    @property
    def shape(self):
        return (self.v_axis.size, self.t_axis.size)


@dataclass(frozen=True)
class HeatedCell:
    v: float  # V
    t_set: float  # K
    t_eff: float  # K
    a_values: tuple
    n_failed: int
    n_total: int


@dataclass
class HeatedDiagram:
    """Self-heating-corrected diagram: scattered points, no common T axis."""

    f_drive: float
    R_nominal: float
    heat: HeatParams
    cells: list


def record_from_curve(
    curve: TuningCurve,
    cutoff: float = FAILURE_CUTOFF_S,
    collapse_fraction: float = 0.1,
) -> TuningRecord:
    """Fit a raw tuning curve, or record it as failed if it shorted before ``cutoff``."""
    if curve.conditions is None:
        raise ValueError("curve has no run conditions")
    t_fail = detect_failure(curve, collapse_fraction)
    if t_fail is not None and t_fail < cutoff:
        return TuningRecord(curve.junction_id, curve.conditions, t_fail=t_fail)
    if t_fail is not None:
        keep = curve.t < t_fail
        curve = TuningCurve(curve.t[keep], curve.r[keep], curve.conditions, curve.junction_id)
    return TuningRecord(curve.junction_id, curve.conditions, fit=fit_log_model(curve))


def build_grid(records: Sequence[TuningRecord], f_drive: float) -> PhaseGrid:
    records = list(records)
    if not records:
        raise DomainError("no tuning records")
    for rec in records:
        if not math.isclose(rec.conditions.f_drive, f_drive, rel_tol=1e-12):
            raise DomainError(
                f"record {rec.junction_id!r} is at {rec.conditions.f_drive} Hz, expected {f_drive} Hz"
            )
    v_axis = sorted({rec.conditions.v_amp for rec in records})
    t_axis = sorted({rec.conditions.t_set for rec in records})
    vi = {v: i for i, v in enumerate(v_axis)}
    tj = {t: j for j, t in enumerate(t_axis)}
    buckets = [[[] for _ in t_axis] for _ in v_axis]
    for rec in records:
        buckets[vi[rec.conditions.v_amp]][tj[rec.conditions.t_set]].append(rec)

    cells = []
    sparse = []
    for i, row in enumerate(buckets):
        out_row = []
        for j, bucket in enumerate(row):
            if not bucket:
                raise DomainError(f"no records at V={v_axis[i]} V, T={t_axis[j]} K")
            if len(bucket) < MIN_JUNCTIONS_PER_CELL:
                sparse.append((i, j))
            a_vals = tuple(rec.fit.a for rec in bucket if not rec.failed)
            n_failed = sum(rec.failed for rec in bucket)
            out_row.append(Cell(a_vals, n_failed, len(bucket)))
        cells.append(out_row)
    return PhaseGrid(np.array(v_axis), np.array(t_axis), f_drive, cells, sparse)


def cell_speed(grid: PhaseGrid, i: int, j: int) -> float:
    cell = grid.cells[i][j]
    if not cell.a_values:
        raise UndefinedCellError(
            f"every junction failed at V={grid.v_axis[i]} V, T={grid.t_axis[j]} K"
        )
    return float(np.median(cell.a_values))


def speed_matrix(grid: PhaseGrid) -> np.ndarray:
    """Cell medians, NaN where every junction failed."""
    out = np.full(grid.shape, np.nan)
    for i in range(grid.shape[0]):
        for j in range(grid.shape[1]):
            if grid.cells[i][j].a_values:
                out[i, j] = cell_speed(grid, i, j)
    return out


def _locate(axis, x):
    k = int(np.searchsorted(axis, x, side="right")) - 1
    k = min(max(k, 0), axis.size - 2)
    return k, (x - axis[k]) / (axis[k + 1] - axis[k])


def interpolate_speed(grid: PhaseGrid, V: float, T: float) -> float:
    """Bilinear interpolation of cell medians."""
    va, ta = grid.v_axis, grid.t_axis
    if not (va[0] <= V <= va[-1] and ta[0] <= T <= ta[-1]):
        raise DomainError(f"({V} V, {T} K) lies outside the grid")
    i, wx = _locate(va, V)
    j, wy = _locate(ta, T)
    f00 = cell_speed(grid, i, j)
    f10 = cell_speed(grid, i + 1, j)
    f01 = cell_speed(grid, i, j + 1)
    f11 = cell_speed(grid, i + 1, j + 1)
    return (
        (1 - wx) * (1 - wy) * f00
        + wx * (1 - wy) * f10
        + (1 - wx) * wy * f01
        + wx * wy * f11
    )


def extract_contour(grid: PhaseGrid, level: float = 0.01) -> list[tuple[float, float]]:
    """Level crossings of the cell medians along grid edges, sorted by temperature.

    Each edge whose two (defined) endpoints sit on opposite sides of ``level``
    contributes its linear crossing point. Edges touching an all-failed cell
    are skipped.
    """
    med = speed_matrix(grid)
    nv, nt = grid.shape
    pts = set()

    def edge(f0, f1, x0, x1):
        if np.isnan(f0) or np.isnan(f1) or (f0 >= level) == (f1 >= level):
            return None
        return x0 + (level - f0) / (f1 - f0) * (x1 - x0)

    for j in range(nt):
        for i in range(nv - 1):
            v = edge(med[i, j], med[i + 1, j], grid.v_axis[i], grid.v_axis[i + 1])
            if v is not None:
                pts.add((float(v), float(grid.t_axis[j])))
    for i in range(nv):
        for j in range(nt - 1):
            t = edge(med[i, j], med[i, j + 1], grid.t_axis[j], grid.t_axis[j + 1])
            if t is not None:
                pts.add((float(grid.v_axis[i]), float(t)))
    return sorted(pts, key=lambda p: (p[1], p[0]))


def fit_boundary_line(points: Iterable[tuple[float, float]], frequency: float = 0.0) -> BoundaryLine:
    """Ordinary least squares of T on V."""
    pts = np.asarray(list(points), dtype=float)
    if pts.ndim != 2 or pts.shape[0] < 2:
        raise DomainError("need at least 2 (V, T) points")
    v, t = pts[:, 0], pts[:, 1]
    dv = v - v.mean()
    sxx = float(dv @ dv)
    if sxx == 0.0:
        raise DomainError("all points share one voltage: the line is vertical")
    slope = float(dv @ (t - t.mean())) / sxx
    return BoundaryLine(slope=slope, intercept_T=float(t.mean() - slope * v.mean()), frequency=frequency)


def failure_fraction_map(grid: PhaseGrid) -> np.ndarray:
    out = np.zeros(grid.shape)
    for i, row in enumerate(grid.cells):
        for j, cell in enumerate(row):
            out[i, j] = cell.n_failed / cell.n_total
    return out


def apply_self_heating(grid: PhaseGrid, R_nominal: float, heat: HeatParams = HeatParams()) -> HeatedDiagram:
    """Shift every cell to its Joule-heated device temperature.

    ``R_nominal`` is the start-of-run junction resistance; its drift during
    tuning is ignored.
    """
    cells = []
    for i, v in enumerate(grid.v_axis):
        dT = mean_temperature_rise(heating_power(float(v), R_nominal), heat)
        for j, t in enumerate(grid.t_axis):
            c = grid.cells[i][j]
            cells.append(HeatedCell(float(v), float(t), float(t) + dT, c.a_values, c.n_failed, c.n_total))
    return HeatedDiagram(grid.f_drive, R_nominal, heat, cells)
