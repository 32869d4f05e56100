"""Physical constants (CODATA, via scipy) and unit conversions."""

from __future__ import annotations

from scipy import constants as _c

E_CHARGE = _c.e  # C
PLANCK = _c.h  # J s
M_ELECTRON = _c.m_e  # kg

ZERO_CELSIUS = 273.15


def ev_to_joule(x):
    return x * E_CHARGE


def joule_to_ev(x):
    return x / E_CHARGE


def celsius_to_kelvin(t_c):
    return t_c + ZERO_CELSIUS


def kelvin_to_celsius(t_k):
    return t_k - ZERO_CELSIUS
