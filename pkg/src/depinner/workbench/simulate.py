"""Synthetic tuning data: single curves, whole campaigns and targeted runs.

All randomness comes from ``numpy.random.default_rng(seed)`` (PCG64), so a
seed reproduces the same data on every platform and numpy release that keeps
the PCG64 stream stable.

The campaign speed law, ``a = speed_scale * (T - T_creep(V))`` inside the
creep band, is a stand-in used to exercise the analysis chain. It is not a
physical prediction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from ..depinning import DepinningParams, Regime, classify_point, creep_temperature
from ..errors import DomainError
from ..fitting import MIN_FIT_SAMPLES, TuningConditions, TuningCurve, fit_log_model
from ..phase_diagram import FAILURE_CUTOFF_S, TuningRecord

SHORTED_R = 1e-3
SETTLE_WINDOW_S = 100.0
TARGET_TIME_CAP_S = 1e5
# Drift per ln(1 + s/1 s) after the target is hit, set so a 30 % target
# settles at 34.6 % after the 100 s window, the reported mean overshoot.
# A preset matched to that number, not a prediction.
DEFAULT_OVERSHOOT_RATE = 0.046 / math.log1p(SETTLE_WINDOW_S)


def _times(duration, n_samples):
    if not duration > 0:
        raise DomainError(f"duration must be positive, got {duration}")
    if n_samples < MIN_FIT_SAMPLES:
        raise DomainError(f"need at least {MIN_FIT_SAMPLES} samples, got {n_samples}")
    return np.geomspace(duration / n_samples, duration, n_samples)


def _noise(rng, noise, n):
    if noise < 0:
        raise DomainError("noise must be >= 0")
    return rng.normal(0.0, noise, n) if noise > 0 else np.zeros(n)


def synth_tuning_curve(
    a: float,
    c: float,
    duration: float = 150.0,
    n_samples: int = 200,
    noise: float = 0.0,
    seed: int = 0,
    conditions: Optional[TuningConditions] = None,
    junction_id: str = "",
) -> TuningCurve:
    """``r = a*ln(c*t)*(1 + eps)`` on log-spaced times in ``[duration/n_samples, duration]``."""
    if not c > 0:
        raise DomainError(f"c must be positive, got {c}")
    t = _times(duration, n_samples)
    rng = np.random.default_rng(seed)
    r = a * np.log(c * t) * (1.0 + _noise(rng, noise, t.size))
    return TuningCurve(t, r, conditions, junction_id)


def synth_power_curve(
    a: float,
    n: float,
    duration: float = 150.0,
    n_samples: int = 200,
    noise: float = 0.0,
    seed: int = 0,
) -> TuningCurve:
    """``r = (a*t**n + 1)*(1 + eps)``, the power-law counterpart."""
    t = _times(duration, n_samples)
    rng = np.random.default_rng(seed)
    return TuningCurve(t, (a * t**n + 1.0) * (1.0 + _noise(rng, noise, t.size)))


def normalised_log_curve(a, t, noise, rng):
    """Log-law curve pinned to ``r = 1`` at the first sample.

    This is ``a*ln(c*t)`` with ``c = exp(1/a)/t[0]``; ``a = 0`` gives the flat
    ``r = 1`` limit.
    """
    return (1.0 + a * np.log(t / t[0])) * (1.0 + _noise(rng, noise, t.size))


@dataclass(frozen=True)
class CampaignSpec:
    v_values: tuple  # V
    t_values: tuple  # K
    f_drive: float  # Hz; 0 for DC
    depinning: DepinningParams
    speed_scale: float = 1e-3  # speed parameter per kelvin into the creep band
    junctions_per_cell: int = 3
    noise: float = 0.005
    seed: int = 0
    duration: float = FAILURE_CUTOFF_S
    n_samples: int = 200

    def __post_init__(self):
        if not self.v_values or not self.t_values:
            raise DomainError("campaign axes must be non-empty")
        if self.junctions_per_cell < 1:
            raise DomainError("junctions_per_cell must be >= 1")
        if self.noise < 0:
            raise DomainError("noise must be >= 0")
        if self.f_drive > 0 and self.depinning.tau is None:
            raise DomainError("an AC campaign needs tau in the depinning parameters")


@dataclass(frozen=True)
class RunResult:
    curve: TuningCurve
    failed: bool
    t_fail: Optional[float]
    regime: Regime
    a_true: float

    def __post_init__(self):
        if self.failed != (self.t_fail is not None):
            raise ValueError("failed must agree with t_fail")


def simulate_campaign(spec: CampaignSpec) -> list[RunResult]:
    """One run per junction per (V, T) cell, in axis order.

    Pinned runs are flat, creep runs follow the log law with the synthetic
    speed law, and running runs short at a uniform random time in (0, 150) s.
    """
    rng = np.random.default_rng(spec.seed)
    t = _times(spec.duration, spec.n_samples)
    omega0 = 2.0 * math.pi * spec.f_drive
    p = spec.depinning
    runs = []
    for v in spec.v_values:
        for temp in spec.t_values:
            cond = TuningConditions(float(v), float(temp), float(spec.f_drive))
            regime = classify_point(v, temp, omega0, p)
            for k in range(spec.junctions_per_cell):
                jid = f"V{v:g}_T{temp:g}_J{k}"
                if regime is Regime.RUNNING:
                    t_fail = float(rng.uniform(np.nextafter(0.0, 1.0), FAILURE_CUTOFF_S))
                    r = np.where(t < t_fail, 1.0, SHORTED_R)
                    runs.append(RunResult(TuningCurve(t, r, cond, jid), True, t_fail, regime, 0.0))
                    continue
                a = 0.0
                if regime is Regime.CREEP:
                    a = max(0.0, spec.speed_scale * (temp - creep_temperature(v, p, omega0)))
                r = normalised_log_curve(a, t, spec.noise, rng)
                runs.append(RunResult(TuningCurve(t, r, cond, jid), False, None, regime, a))
    return runs


def records_from_runs(runs: Sequence[RunResult], cutoff: float = FAILURE_CUTOFF_S) -> list[TuningRecord]:
    """Fit each surviving run; runs that shorted before ``cutoff`` become failures."""
    out = []
    for run in runs:
        c = run.curve
        if run.failed and run.t_fail < cutoff:
            out.append(TuningRecord(c.junction_id, c.conditions, t_fail=run.t_fail))
        else:
            out.append(TuningRecord(c.junction_id, c.conditions, fit=fit_log_model(c)))
    return out


@dataclass(frozen=True)
class TargetedRun:
    final_fraction: float
    final_resistance: float  # ohm
    t_target: float  # s, when the target was first reached
    curve: TuningCurve


def simulate_targeted_run(
    start_R: float,
    target_fraction: float,
    a: float,
    c: float,
    overshoot_rate: float = DEFAULT_OVERSHOOT_RATE,
    n_samples: int = 200,
) -> TargetedRun:
    """Tune along ``r = a*ln(c*t)`` until ``r = 1 + target_fraction``, then settle.

    After the target is hit the drive stops but the resistance keeps
    drifting by ``overshoot_rate * ln(1 + s/1 s)`` for a 100 s window.
    """
    if not target_fraction > 0:
        raise DomainError("target_fraction must be positive")
    if not (start_R > 0 and c > 0):
        raise DomainError("start_R and c must be positive")
    if overshoot_rate < 0:
        raise DomainError("overshoot_rate must be >= 0")
    r_target = 1.0 + target_fraction
    if not a > 0:
        raise DomainError("target unreachable: speed parameter a must be positive")
    log_t_target = r_target / a - math.log(c)
    if log_t_target > math.log(TARGET_TIME_CAP_S):
        raise DomainError(f"target unreachable within {TARGET_TIME_CAP_S:g} s")
    t_target = math.exp(log_t_target)
    t_start = math.exp(1.0 / a - math.log(c))  # r = 1
    n_tune = n_samples // 2
    t1 = np.geomspace(t_start, t_target, n_tune)
    r1 = a * np.log(c * t1)
    r1[-1] = r_target
    s = np.geomspace(SETTLE_WINDOW_S / (n_samples - n_tune), SETTLE_WINDOW_S, n_samples - n_tune)
    r2 = r_target + overshoot_rate * np.log1p(s)
    curve = TuningCurve(np.concatenate([t1, t_target + s]), np.concatenate([r1, r2]))
    final = target_fraction + overshoot_rate * math.log1p(SETTLE_WINDOW_S)
    return TargetedRun(final, start_R * (1.0 + final), t_target, curve)
