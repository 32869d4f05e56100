"""Room-temperature electrical characterisation of tunnel junctions.

Covers the potential-divider readout used during tuning, the RC cutoff of
the cabling, ohmic and Simmons fits of DC IV sweeps, breakdown detection and
the local-thickness breakdown model ``V_BD = min(t(x, y) * E_BD(x, y))``.

Simmons model: the symmetric rectangular barrier in the intermediate-voltage
form with beta = 1,

    J = e/(2 pi h d^2) * [pb*exp(-A*sqrt(pb)) - (pb + eV)*exp(-A*sqrt(pb + eV))]

with ``pb = phi - eV/2`` and ``A = 4 pi d sqrt(2 m_e)/h``. It is evaluated
for ``|V| < 2 phi`` (where ``pb > 0``) but is only physical up to about
``|eV| = phi``; beyond that the current eventually turns over.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .constants import E_CHARGE, M_ELECTRON, PLANCK
from .errors import DomainError
from .fitting import least_squares_fit

SIMMONS_D0_NM = 1.5
SIMMONS_PHI0_EV = 2.0
PLAUSIBLE_D_NM = (0.5, 5.0)
PLAUSIBLE_PHI_EV = (0.5, 5.0)
ILL_CONDITIONED = 1e3  # condition number of the log-parameter Jacobian


@dataclass
class IVTrace:
    """Voltage sweep from 0 V upward: ``v`` in volt, ``i`` in ampere."""

    v: np.ndarray
    i: np.ndarray

    def __post_init__(self):
        self.v = np.asarray(self.v, dtype=float)
        self.i = np.asarray(self.i, dtype=float)
        if self.v.ndim != 1 or self.v.shape != self.i.shape or self.v.size < 2:
            raise ValueError("v and i must be 1-d arrays of equal length >= 2")
        if not (np.all(np.isfinite(self.v)) and np.all(np.isfinite(self.i))):
            raise ValueError("IV trace contains non-finite values")
        if abs(self.v[0]) > 1e-3:
            raise ValueError(f"sweep must start at 0 V (+-1 mV), starts at {self.v[0]} V")
        if np.any(np.diff(self.v) <= 0):
            raise ValueError("sweep voltages must be strictly increasing")

    def truncate(self, v_max: float) -> "IVTrace":
        """Points strictly below ``v_max``."""
        keep = self.v < v_max
        return IVTrace(self.v[keep], self.i[keep])


@dataclass(frozen=True)
class SimmonsFit:
    d: float  # m
    phi: float  # eV
    area: float  # m^2
    rss: float
    converged: bool
    condition_number: float
    ill_conditioned: bool
    suspect: bool


@dataclass
class BarrierMaps:
    thickness: np.ndarray  # m
    strength: np.ndarray  # V/m

    def __post_init__(self):
        self.thickness = np.asarray(self.thickness, dtype=float)
        self.strength = np.asarray(self.strength, dtype=float)
        if self.thickness.shape != self.strength.shape:
            raise ValueError("thickness and strength maps differ in shape")
        if self.thickness.size == 0:
            raise ValueError("empty barrier maps")
        if np.any(self.thickness <= 0) or np.any(self.strength <= 0):
            raise ValueError("barrier maps must be strictly positive")


def divider_resistance(v_source: float, v_junction: float, r_load: float) -> float:
    """Junction resistance from the voltage across it in a load-resistor divider."""
    if not r_load > 0:
        raise DomainError("load resistance must be positive")
    if not 0 < v_junction < v_source:
        raise DomainError(f"need 0 < v_junction < v_source, got {v_junction}, {v_source}")
    return r_load * v_junction / (v_source - v_junction)


def divider_resistance_from_load(v_source: float, v_load: float, r_load: float) -> float:
    """Same as :func:`divider_resistance`, reading the load-side voltage."""
    if not r_load > 0:
        raise DomainError("load resistance must be positive")
    if not 0 < v_load < v_source:
        raise DomainError(f"need 0 < v_load < v_source, got {v_load}, {v_source}")
    return r_load * (v_source - v_load) / v_load


def rc_cutoff(r_series: float, c: float) -> float:
    if not (r_series > 0 and c > 0):
        raise DomainError("resistance and capacitance must be positive")
    return 1.0 / (2.0 * math.pi * r_series * c)


def ohmic_fit(trace: IVTrace, v_window: float = 0.05) -> float:
    """Resistance from a zero-intercept line through points with ``v <= v_window``.

    A window wider than the sweep uses every point.
    """
    keep = trace.v <= v_window
    if keep.sum() < 4:
        raise DomainError(f"only {int(keep.sum())} points within {v_window} V; need 4")
    v, i = trace.v[keep], trace.i[keep]
    slope = float(v @ i) / float(v @ v)
    if slope <= 0:
        raise DomainError("non-positive conductance in the ohmic window")
    return 1.0 / slope


def _simmons_density(v_abs, d, phi_j):
    """Current density (A/m^2) for ``|V|`` in volt, ``d`` in m, ``phi`` in J."""
    A = 4.0 * math.pi * d * math.sqrt(2.0 * M_ELECTRON) / PLANCK
    ev = E_CHARGE * v_abs
    pb = phi_j - 0.5 * ev
    pa = pb + ev
    pref = E_CHARGE / (2.0 * math.pi * PLANCK * d * d)
    return pref * (pb * np.exp(-A * np.sqrt(pb)) - pa * np.exp(-A * np.sqrt(pa)))


def simmons_current(v, d: float, phi: float, area: float):
    """Tunnel current (A) through a barrier of thickness ``d`` (m), height ``phi`` (eV)."""
    if not (d > 0 and phi > 0 and area > 0):
        raise DomainError("d, phi and area must be positive")
    v = np.asarray(v, dtype=float)
    if np.any(np.abs(v) >= 2.0 * phi):
        raise DomainError(f"|V| must stay below 2*phi = {2 * phi} V for the Simmons model")
    out = np.sign(v) * area * _simmons_density(np.abs(v), d, phi * E_CHARGE)
    return float(out) if out.ndim == 0 else out


def simmons_zero_bias_conductance(d: float, phi: float, area: float) -> float:
    """``dI/dV`` at ``V = 0`` of :func:`simmons_current`, in siemens."""
    A = 4.0 * math.pi * d * math.sqrt(2.0 * M_ELECTRON) / PLANCK
    phi_j = phi * E_CHARGE
    x = A * math.sqrt(phi_j)
    pref = E_CHARGE / (2.0 * math.pi * PLANCK * d * d)
    return area * pref * E_CHARGE * math.exp(-x) * (0.5 * x - 1.0)


def fit_simmons(trace: IVTrace, area: float) -> SimmonsFit:
    """Fit barrier thickness and height with the junction area held fixed.

    Residuals compare ``log|I|`` so low- and high-bias points weigh alike;
    zero-bias and zero-current samples are skipped. The caller truncates
    the trace below breakdown. The height is parametrised as
    ``phi = max|V|/2 + exp(q)`` so every trial stays inside the model's
    validity range.

    ``ill_conditioned`` is set when the Jacobian with respect to
    ``(ln d, ln phi)`` has condition number above 1e3 (for instance when only
    the ohmic region was measured), and ``suspect`` when the result falls
    outside 0.5-5 nm or 0.5-5 eV.
    """
    if not area > 0:
        raise DomainError("area must be positive")
    keep = (trace.v != 0) & (trace.i != 0)
    v, i = trace.v[keep], trace.i[keep]
    if v.size < 3:
        raise DomainError("need at least 3 non-zero IV points for a Simmons fit")
    va = np.abs(v)
    log_i = np.log(np.abs(i))
    phi_min = 0.5 * float(va.max())

    def unpack(p):
        return math.exp(p[0]) * 1e-9, phi_min + math.exp(p[1])

    def resid(p):
        d, phi = unpack(p)
        return np.log(np.abs(area * _simmons_density(va, d, phi * E_CHARGE))) - log_i

    init = [math.log(SIMMONS_D0_NM), math.log(max(SIMMONS_PHI0_EV - phi_min, 0.1))]
    res = least_squares_fit(resid, init)
    d, phi = unpack(res.params)
    # rescale the q-column to d/d(ln phi)
    J = res.jacobian * np.array([1.0, phi / (phi - phi_min)])
    sv = np.linalg.svd(J, compute_uv=False)
    cond = float(sv[0] / sv[-1]) if sv[-1] > 0 else math.inf
    d_nm = d * 1e9
    suspect = not (
        PLAUSIBLE_D_NM[0] <= d_nm <= PLAUSIBLE_D_NM[1]
        and PLAUSIBLE_PHI_EV[0] <= phi <= PLAUSIBLE_PHI_EV[1]
    )
    return SimmonsFit(d, phi, area, res.rss, res.converged, cond, cond > ILL_CONDITIONED, suspect)


def detect_breakdown(
    trace: IVTrace,
    jump_factor: float = 5.0,
    i_floor: float = 1e-12,
    v_guard: float = 0.2,
) -> Optional[float]:
    """Voltage at which the current first jumps by more than ``jump_factor``.

    Ratios are only considered once the previous sample is above
    ``v_guard`` volts, where small-signal noise no longer dominates.
    """
    if not jump_factor > 1:
        raise DomainError(f"jump_factor must exceed 1, got {jump_factor}")
    v, i = trace.v, trace.i
    for k in range(v.size - 1):
        if v[k] > v_guard and i[k + 1] / max(i[k], i_floor) > jump_factor:
            return float(v[k + 1])
    return None


def breakdown_from_maps(maps: BarrierMaps) -> float:
    return float(np.min(maps.thickness * maps.strength))


def cohort_summary(values) -> dict:
    """Mean, median and sample standard deviation of a set of fitted values."""
    x = np.asarray(values, dtype=float)
    if x.size == 0:
        raise DomainError("empty cohort")
    return {
        "n": int(x.size),
        "mean": float(x.mean()),
        "median": float(np.median(x)),
        "std": float(x.std(ddof=1)) if x.size > 1 else 0.0,
    }
