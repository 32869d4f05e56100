"""Transmon spectrum from ``H = 4 E_C n^2 - E_J cos(phi)`` in the charge basis.

Energies are frequencies (E/h, in Hz). In the charge basis ``cos(phi)``
couples neighbouring charge states with amplitude 1/2, so the Hamiltonian is
real symmetric tridiagonal. Offset charge is taken as zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .errors import ConvergenceError, DomainError

N_CHARGE_CAP = 200
CONVERGENCE_RTOL = 1e-9
INFER_TOL_HZ = 1.0
INFER_MAX_ITER = 60


@dataclass(frozen=True)
class TransmonParams:
    E_C: float  # Hz
    E_J: float  # Hz
    n_charge: int = 30
    n_levels: int = 6

    def __post_init__(self):
        if not (self.E_C > 0 and self.E_J > 0):
            raise DomainError("E_C and E_J must be positive")
        if self.n_charge < 10:
            raise DomainError("n_charge must be at least 10")
        if not 2 <= self.n_levels <= self.n_charge:
            raise DomainError("need 2 <= n_levels <= n_charge")


@dataclass(frozen=True)
class QuditSpectrum:
    transitions: np.ndarray  # f(k -> k+1), Hz
    n_charge: int

    @property
    def f01(self):
        return float(self.transitions[0])

    @property
    def anharmonicity(self):
        return float(self.transitions[1] - self.transitions[0])


def _levels(E_C, E_J, n_charge, n_levels):
    n = np.arange(-n_charge, n_charge + 1, dtype=float)
    diag = 4.0 * E_C * n * n
    off = np.full(2 * n_charge, -0.5 * E_J)
    return eigh_tridiagonal(diag, off, eigvals_only=True, select="i", select_range=(0, n_levels - 1))


def spectrum(p: TransmonParams) -> QuditSpectrum:
    """Transitions between consecutive levels, checked against a doubled basis.

    Raises ``ConvergenceError`` if doubling the charge cutoff still moves a
    transition by more than 1e-9 relative once the cutoff reaches 200.
    """
    n = p.n_charge
    f = np.diff(_levels(p.E_C, p.E_J, n, p.n_levels))
    while True:
        n2 = min(2 * n, N_CHARGE_CAP)
        if n2 <= n:
            raise ConvergenceError(f"spectrum not converged at n_charge={n}")
        f2 = np.diff(_levels(p.E_C, p.E_J, n2, p.n_levels))
        if np.all(np.abs(f2 - f) <= CONVERGENCE_RTOL * np.abs(f2)):
            return QuditSpectrum(f if n == p.n_charge else f2, n if n == p.n_charge else n2)
        n, f = n2, f2


def asymptotic_f01(E_C: float, E_J: float) -> float:
    """Large-E_J/E_C estimate ``sqrt(8 E_J E_C) - E_C``."""
    return math.sqrt(8.0 * E_J * E_C) - E_C


def infer_EJ_EC(f01: float, f12: float, n_charge: int = 30, n_levels: int = 6) -> TransmonParams:
    """``(E_C, E_J)`` reproducing the two lowest transitions to within 1 Hz.

    Damped Newton iteration seeded from the transmon asymptotics
    ``E_C ~ f01 - f12`` and ``E_J ~ (f01 + E_C)**2 / (8 E_C)``.
    """
    if not f01 > f12 > 0:
        raise DomainError("need f01 > f12 > 0 (negative anharmonicity)")
    target = np.array([f01, f12])

    def F(x):
        return np.diff(_levels(x[0], x[1], n_charge, 3)) - target

    ec0 = f01 - f12
    x = np.array([ec0, (f01 + ec0) ** 2 / (8.0 * ec0)])
    r = F(x)
    for _ in range(INFER_MAX_ITER):
        if np.max(np.abs(r)) < INFER_TOL_HZ:
            return TransmonParams(float(x[0]), float(x[1]), n_charge, n_levels)
        J = np.empty((2, 2))
        for k in range(2):
            h = 1e-7 * x[k]
            xh = x.copy()
            xh[k] += h
            J[:, k] = (F(xh) - r) / h
        step = np.linalg.solve(J, -r)
        norm0 = np.linalg.norm(r)
        t = 1.0
        for _ in range(40):
            xn = x + t * step
            if np.all(xn > 0):
                rn = F(xn)
                if np.linalg.norm(rn) < norm0:
                    break
            t *= 0.5
        else:
            raise ConvergenceError("line search failed while inferring E_C, E_J")
        x, r = xn, rn
    raise ConvergenceError(f"E_C, E_J inference did not converge (residual {r.tolist()} Hz)")


def harmonic_deviation_report(measured, p: TransmonParams) -> list[tuple[int, float]]:
    """``(k, measured f(k->k+1) - predicted f(k->k+1))`` for each measured transition."""
    measured = np.asarray(measured, dtype=float)
    if measured.ndim != 1 or measured.size == 0:
        raise DomainError("need a non-empty list of measured transitions")
    if measured.size > p.n_levels - 1:
        raise DomainError(
            f"{measured.size} transitions measured but only {p.n_levels - 1} predicted"
        )
    pred = spectrum(p).transitions
    return [(k, float(measured[k] - pred[k])) for k in range(measured.size)]
