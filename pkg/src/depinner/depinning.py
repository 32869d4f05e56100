"""Depinning phase boundaries for junction tuning.

The running/pinned boundary is

    T = T_P * (V_th/V) * (1 - V/V_th)**(1/mu)

and the creep boundary under an oscillating drive at angular frequency
``omega0`` is the same curve with ``T_P`` replaced by ``T_P/Lambda``, where
``Lambda = ln(1/(omega0*tau))``.  Temperatures are in kelvin, voltages in volt.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, replace
from typing import Iterable, Optional

import numpy as np

from .errors import ConvergenceError, DomainError, FitError
from .fitting import least_squares_fit

BISECTION_MAX_ITER = 200
BISECTION_RTOL = 1e-12


@dataclass(frozen=True)
class DepinningParams:
    T_P: float
    V_th: float
    mu: float = 1.0
    tau: Optional[float] = None

    def __post_init__(self):
        for name in ("T_P", "V_th", "mu"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise DomainError(f"{name} must be positive and finite, got {v}")
        if self.tau is not None and not (math.isfinite(self.tau) and self.tau > 0):
            raise DomainError(f"tau must be positive and finite, got {self.tau}")

    def with_tau(self, tau: float) -> "DepinningParams":
        return replace(self, tau=tau)


class Regime(enum.Enum):
    PINNED = "Pinned"
    CREEP = "Creep"
    RUNNING = "Running"


@dataclass(frozen=True)
class BoundaryLine:
    slope: float  # K/V
    intercept_T: float  # K
    frequency: float = 0.0  # Hz

    def __post_init__(self):
        if not (math.isfinite(self.slope) and math.isfinite(self.intercept_T)):
            raise DomainError("boundary line must have finite slope and intercept")

    def temperature(self, v):
        return self.slope * v + self.intercept_T


def _boundary_T(V, T_P, V_th, mu):
    return T_P * (V_th / V) * (1.0 - V / V_th) ** (1.0 / mu)


def depinning_temperature(V: float, p: DepinningParams) -> float:
    if not 0.0 < V <= p.V_th:
        raise DomainError(f"V must lie in (0, V_th={p.V_th}], got {V}")
    if V == p.V_th:
        return 0.0
    return _boundary_T(V, p.T_P, p.V_th, p.mu)


def depinning_voltage(T: float, p: DepinningParams) -> float:
    """Invert the boundary: the voltage at which it passes through ``T``."""
    if not T >= 0.0:
        raise DomainError(f"T must be >= 0, got {T}")
    if T == 0.0:
        return p.V_th
    if p.mu == 1.0:
        return p.V_th / (1.0 + T / p.T_P)
    # T(V) falls monotonically from +inf at V -> 0 to 0 at V_th
    lo, hi = 1e-12 * p.V_th, p.V_th
    if _boundary_T(lo, p.T_P, p.V_th, p.mu) < T:
        return lo
    for _ in range(BISECTION_MAX_ITER):
        mid = 0.5 * (lo + hi)
        if _boundary_T(mid, p.T_P, p.V_th, p.mu) > T:
            lo = mid
        else:
            hi = mid
        if hi - lo <= BISECTION_RTOL * hi:
            return 0.5 * (lo + hi)
    raise ConvergenceError(f"bisection for V_P(T={T}) did not converge")


def lambda_factor(omega0: float, tau: float) -> float:
    if not (omega0 > 0 and tau > 0):
        raise DomainError("omega0 and tau must both be positive")
    x = omega0 * tau
    if x >= 1.0:
        raise DomainError(f"omega0*tau = {x:g} >= 1: outside the adiabatic regime")
    return -math.log(x)


def _require_tau(p):
    if p.tau is None:
        raise DomainError("tau is required for the creep boundary")
    return p.tau


def creep_temperature(V: float, p: DepinningParams, omega0: float) -> float:
    lam = lambda_factor(omega0, _require_tau(p))
    return depinning_temperature(V, p) / lam


def creep_voltage(T: float, p: DepinningParams, omega0: float) -> float:
    lam = lambda_factor(omega0, _require_tau(p))
    return depinning_voltage(T, replace(p, T_P=p.T_P / lam))


def classify_point(V: float, T: float, omega0: float, p: DepinningParams) -> Regime:
    """Regime at voltage amplitude ``V`` and temperature ``T``.

    ``omega0 <= 0`` means a DC drive, which has no creep band. Points lying
    exactly on a boundary go to the more mobile regime.
    """
    if not V > 0:
        raise DomainError(f"V must be positive, got {V}")
    if not T >= 0:
        raise DomainError(f"T must be >= 0, got {T}")
    if V > p.V_th or T >= depinning_temperature(V, p):
        return Regime.RUNNING
    if omega0 > 0 and T >= creep_temperature(V, p, omega0):
        return Regime.CREEP
    return Regime.PINNED


def _signed_root(x, mu):
    # continuation past V_th keeps trial residuals finite during the fit
    return math.copysign(abs(x) ** (1.0 / mu), x)


def fit_depinning_boundary(
    points: Iterable[tuple[float, float]], mu: float = 1.0
) -> DepinningParams:
    """Fit ``(T_P, V_th)`` to DC breakdown points ``(T [K], V_BD [V])``.

    Residuals are temperatures. ``mu`` is held fixed. A fitted ``V_th`` that
    does not exceed every measured breakdown voltage is warned about as
    degenerate.
    """
    pts = np.asarray(list(points), dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] < 3:
        raise DomainError("need at least 3 (T, V_BD) points")
    T, V = pts[:, 0], pts[:, 1]
    if np.any(V <= 0) or np.any(T < 0):
        raise DomainError("breakdown voltages must be > 0 and temperatures >= 0")
    if not mu > 0:
        raise DomainError("mu must be positive")

    def resid(q):
        T_P, V_th = q
        model = np.array([T_P * (V_th / v) * _signed_root(1.0 - v / V_th, mu) for v in V])
        return model - T

    init = [float(T.max()) if T.max() > 0 else 1.0, 1.05 * float(V.max())]
    res = least_squares_fit(resid, init)
    if not res.converged:
        raise FitError(f"boundary fit did not converge (rss={res.rss:g})")
    T_P, V_th = (float(x) for x in res.params)
    if V_th <= V.max():
        warnings.warn(
            f"degenerate boundary fit: V_th={V_th:g} V does not exceed max V_BD={V.max():g} V",
            stacklevel=2,
        )
    return DepinningParams(T_P=T_P, V_th=V_th, mu=mu)


def estimate_tau(
    f_low: float, f_high: float, intercept_low: float, intercept_high: float
) -> float:
    """Hop timescale from the creep-boundary intercepts at two drive frequencies.

    Solves ``ln(2*pi*f_high*tau) / ln(2*pi*f_low*tau) = intercept_low/intercept_high``
    in closed form. Warns if the result is not adiabatic at ``f_high``.
    """
    if not 0 < f_low < f_high:
        raise DomainError("need 0 < f_low < f_high")
    if not (intercept_low > 0 and intercept_high > 0):
        raise DomainError("intercepts must be positive temperatures")
    ratio = intercept_low / intercept_high
    if ratio == 1.0:
        raise DomainError("equal intercepts: tau is unbounded")
    log_tau = (ratio * math.log(2 * math.pi * f_low) - math.log(2 * math.pi * f_high)) / (1.0 - ratio)
    if log_tau > 700.0:
        raise DomainError(f"intercept ratio {ratio} gives ln(tau) = {log_tau:g}; no finite tau")
    tau = math.exp(log_tau)
    if 2 * math.pi * f_high * tau >= 1.0:
        warnings.warn(
            f"tau={tau:g} s gives omega*tau >= 1 at {f_high} Hz (outside adiabatic validity)",
            stacklevel=2,
        )
    return tau


def intercept_ratio(f_low: float, f_high: float, tau: float) -> float:
    """Forward model inverted by :func:`estimate_tau`: ``Lambda_high/Lambda_low``."""
    return lambda_factor(2 * math.pi * f_high, tau) / lambda_factor(2 * math.pi * f_low, tau)
