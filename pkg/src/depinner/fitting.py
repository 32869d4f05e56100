"""Tuning-curve fits and the damped least-squares engine they share.

Tuning curves are fitted to the logarithmic law ``r = a*ln(c*t)`` (natural
log) and to the power law ``r = a*t**n + 1``, where ``r`` is the junction
resistance normalised to its value at the start of the run.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import DomainError, FitError

MIN_FIT_SAMPLES = 8

# engine settings
MAX_ITER = 500
INITIAL_DAMPING = 1e-3
RSS_RTOL = 1e-10
STEP_ATOL = 1e-12


@dataclass(frozen=True)
class TuningConditions:
    v_amp: float  # V
    t_set: float  # K
    f_drive: float  # Hz


@dataclass
class TuningCurve:
    """Normalised resistance ``r = R(t)/R0`` sampled at times ``t`` (seconds)."""

    t: np.ndarray
    r: np.ndarray
    conditions: Optional[TuningConditions] = None
    junction_id: str = ""

    def __post_init__(self):
        self.t = np.asarray(self.t, dtype=float)
        self.r = np.asarray(self.r, dtype=float)
        if self.t.ndim != 1 or self.t.shape != self.r.shape:
            raise ValueError("t and r must be 1-d arrays of equal length")
        if self.t.size == 0:
            raise ValueError("empty tuning curve")
        if not (np.all(np.isfinite(self.t)) and np.all(np.isfinite(self.r))):
            raise ValueError("tuning curve contains non-finite samples")
        if np.any(np.diff(self.t) <= 0):
            raise ValueError("timestamps must be strictly increasing")

    def __len__(self):
        return self.t.size


@dataclass
class LeastSquaresResult:
    params: np.ndarray
    rss: float
    converged: bool
    iterations: int
    rss_history: list = field(default_factory=list)
    jacobian: Optional[np.ndarray] = None


@dataclass(frozen=True)
class LogFit:
    """Result of fitting ``r = a*ln(c*t)``.

    ``offset`` is ``a*ln(c)``, the well-conditioned form of ``c``. When the
    curve is flat (``a`` indistinguishable from zero) ``c`` is unbounded and
    reported as ``inf`` with ``degenerate`` set.
    """

    a: float
    c: float
    offset: float
    rss: float
    converged: bool
    degenerate: bool = False

    def predict(self, t):
        return self.a * np.log(np.asarray(t, dtype=float)) + self.offset


@dataclass(frozen=True)
class PowerFit:
    a: float
    n: float
    rss: float
    converged: bool

    def predict(self, t):
        return self.a * np.asarray(t, dtype=float) ** self.n + 1.0


@dataclass(frozen=True)
class ModelComparison:
    log_fit: LogFit
    power_fit: PowerFit
    preferred: str  # "log" or "power"

    @property
    def rss(self):
        return {"log": self.log_fit.rss, "power": self.power_fit.rss}


def _jacobian(fun, p, r0):
    J = np.empty((r0.size, p.size))
    for j in range(p.size):
        h = max(1e-8, 1e-8 * abs(p[j]))
        q = p.copy()
        q[j] += h
        J[:, j] = (fun(q) - r0) / h
    return J


def least_squares_fit(
    residual_fn: Callable[..., np.ndarray],
    init: Sequence[float],
    args: tuple = (),
    max_iter: int = MAX_ITER,
) -> LeastSquaresResult:
    """Minimise ``sum(residual_fn(p, *args)**2)`` by damped Gauss-Newton.

    The Jacobian is taken by forward differences. Each trial step solves the
    Levenberg system ``(J^T J + lam*I) dp = -J^T r``; the damping ``lam``
    starts at 1e-3 and is divided by 10 when a step lowers the residual sum of
    squares and multiplied by 10 otherwise. Rejected steps never move the
    parameters, so the accepted rss sequence is non-increasing.

    Converges when an accepted step changes rss by less than 1e-10
    (relative), when a step is shorter than 1e-12, or when rss hits zero.
    Hitting ``max_iter`` trial steps returns the best point with
    ``converged=False``.

    Raises ``DomainError`` if the residual is non-finite at ``init`` and
    ``FitError`` if it turns non-finite during the descent.
    """
    p = np.array(init, dtype=float)
    if p.ndim != 1 or not np.all(np.isfinite(p)):
        raise DomainError(f"initial parameters must be a finite vector, got {init!r}")

    def fun(q):
        return np.asarray(residual_fn(q, *args), dtype=float).ravel()

    r = fun(p)
    if not np.all(np.isfinite(r)):
        raise DomainError(f"residual is not finite at the initial point {p.tolist()}")
    rss = float(r @ r)
    history = [rss]
    lam = INITIAL_DAMPING
    converged = rss == 0.0
    J = None
    it = 0
    while not converged and it < max_iter:
        it += 1
        if J is None:
            J = _jacobian(fun, p, r)
            if not np.all(np.isfinite(J)):
                raise FitError(f"non-finite Jacobian at p={p.tolist()}")
        n = p.size
        A = np.vstack([J, math.sqrt(lam) * np.eye(n)])
        b = np.concatenate([-r, np.zeros(n)])
        step = np.linalg.lstsq(A, b, rcond=None)[0]
        step_norm = float(np.linalg.norm(step))
        p_new = p + step
        r_new = fun(p_new)
        if not np.all(np.isfinite(r_new)):
            raise FitError(
                f"residual became non-finite at trial p={p_new.tolist()} "
                f"(from p={p.tolist()}, damping={lam:g}, iteration {it})"
            )
        with np.errstate(over="ignore"):
            rss_new = float(r_new @ r_new)  # inf just rejects the step
        if rss_new < rss:
            rel = (rss - rss_new) / rss
            p, r, rss = p_new, r_new, rss_new
            history.append(rss)
            J = None
            lam = max(lam / 10.0, 1e-300)
            converged = rel < RSS_RTOL or step_norm < STEP_ATOL or rss == 0.0
        else:
            lam *= 10.0
            converged = step_norm < STEP_ATOL
    if J is None:
        J = _jacobian(fun, p, r)
    return LeastSquaresResult(p, rss, converged, it, history, J)


def fit_samples(curve: TuningCurve) -> tuple[np.ndarray, np.ndarray]:
    """Time/resistance arrays usable for fitting (``t > 0``, enough samples)."""
    keep = curve.t > 0
    if not np.all(keep):
        warnings.warn(
            f"dropping {int((~keep).sum())} samples at t <= 0 before fitting",
            stacklevel=3,
        )
    t, r = curve.t[keep], curve.r[keep]
    if t.size < MIN_FIT_SAMPLES:
        raise DomainError(f"need at least {MIN_FIT_SAMPLES} samples with t > 0, got {t.size}")
    if np.ptp(t) == 0:
        raise DomainError("all timestamps are identical")
    return t, r


def fit_log_model(curve: TuningCurve) -> LogFit:
    """Fit ``r = a*ln(c*t)``.

    The model is linear in ``(a, a*ln c)``, which is the parametrisation
    handed to the engine; the regression of ``r`` on ``ln t`` seeds it.
    Negative ``a`` is reported as is.
    """
    t, r = fit_samples(curve)
    lt = np.log(t)
    a0, k0 = np.polyfit(lt, r, 1)

    def resid(p):
        return p[0] * lt + p[1] - r

    res = least_squares_fit(resid, [a0, k0])
    a, k = (float(x) for x in res.params)
    degenerate = a == 0.0 or abs(k / a) > 700.0
    c = math.inf if degenerate else math.exp(k / a)
    return LogFit(a=a, c=c, offset=k, rss=res.rss, converged=res.converged, degenerate=degenerate)


def fit_power_model(curve: TuningCurve) -> PowerFit:
    """Fit ``r = a*t**n + 1``, starting from ``n = 0.3``."""
    t, r = fit_samples(curve)
    n0 = 0.3
    a0 = (r[-1] - r[0]) / (t[-1] ** n0 - t[0] ** n0)

    def resid(p):
        return p[0] * t ** p[1] + 1.0 - r

    res = least_squares_fit(resid, [a0, n0])
    a, n = (float(x) for x in res.params)
    return PowerFit(a=a, n=n, rss=res.rss, converged=res.converged)


def compare_models(curve: TuningCurve) -> ModelComparison:
    """Fit both laws; the lower rss wins and ties go to the logarithmic law."""
    lf = fit_log_model(curve)
    pf = fit_power_model(curve)
    _, r = fit_samples(curve)
    tie_tol = 1e-15 * float(r @ r)
    power_better = pf.rss < lf.rss and not math.isclose(pf.rss, lf.rss, rel_tol=1e-9, abs_tol=tie_tol)
    return ModelComparison(lf, pf, "power" if power_better else "log")


def detect_failure(curve: TuningCurve, collapse_fraction: float = 0.1) -> Optional[float]:
    """First time the normalised resistance drops below ``collapse_fraction``.

    A shorted junction reads far below its starting resistance; transient
    dips that stay above the threshold are not failures.
    """
    if not 0.0 < collapse_fraction < 1.0:
        raise DomainError(f"collapse_fraction must lie in (0, 1), got {collapse_fraction}")
    below = np.flatnonzero(curve.r < collapse_fraction)
    if below.size == 0:
        return None
    return float(curve.t[below[0]])
