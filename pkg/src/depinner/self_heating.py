"""Joule self-heating of a junction under an AC tuning bias.

The dissipated power is treated as a point source in a solid, and the
temperature rise ``P/(4*pi*k*r)`` is averaged over a ball of radius
``r_max``. A semi-infinite substrate (heat escapes through one half-space
only) doubles the rise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError

SAPPHIRE_K = 30.0  # W/(m K), room temperature


@dataclass(frozen=True)
class HeatParams:
    k: float = SAPPHIRE_K  # W/(m K)
    r_max: float = 100e-9  # m
    semi_infinite_factor: float = 2.0

    def __post_init__(self):
        if not self.k > 0:
            raise DomainError(f"thermal conductivity must be positive, got {self.k}")
        if not self.r_max > 0:
            raise DomainError(f"averaging radius must be positive, got {self.r_max}")
        if not self.semi_infinite_factor >= 1:
            raise DomainError("semi_infinite_factor must be >= 1")


def heating_power(V_amp: float, R: float) -> float:
    """Time-averaged power ``V_amp**2/(2R)`` of a sinusoidal bias on a resistor."""
    if not R > 0:
        raise DomainError(f"resistance must be positive, got {R}")
    if V_amp < 0:
        raise DomainError(f"V_amp must be >= 0, got {V_amp}")
    return V_amp * V_amp / (2.0 * R)


def mean_temperature_rise(P: float, h: HeatParams = HeatParams()) -> float:
    if P < 0:
        raise DomainError(f"power must be >= 0, got {P}")
    # volume average of P/(4 pi k r) over r < r_max
    return h.semi_infinite_factor * 3.0 * P / (8.0 * math.pi * h.k * h.r_max)


def effective_temperature(
    T_ambient: float, V_amp: float, R: float, h: HeatParams = HeatParams()
) -> float:
    if not T_ambient > 0:
        raise DomainError(f"ambient temperature must be positive kelvin, got {T_ambient}")
    return T_ambient + mean_temperature_rise(heating_power(V_amp, R), h)
