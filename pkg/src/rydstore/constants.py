"""Physical constants and the internal units contract.

Internal units everywhere in this package: time in ns, angular frequency in
rad/ns, length in um, wave vector in rad/um, temperature in K. Configuration
files quote frequencies as nu = omega/2pi in MHz; the converters below are the
single point where that translation happens.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class PhysicalConstants:
    """CODATA-quality constants; never scenario-dependent."""

    boltzmann_constant: float = 1.380649e-23  # J/K (exact SI)
    rb87_mass: float = 1.4431606e-25          # kg (86.909180531 u)
    speed_of_light: float = 299792458.0       # m/s


CONSTANTS = PhysicalConstants()

# speed of light in internal units (um/ns)
C_UM_PER_NS = CONSTANTS.speed_of_light * 1e-3


def mhz_to_rad_ns(nu_mhz: float) -> float:
    """nu/2pi in MHz -> angular frequency in rad/ns (exact: x * 2pi * 1e-3)."""
    return nu_mhz * TWO_PI * 1e-3


def rad_ns_to_mhz(omega: float) -> float:
    return omega / (TWO_PI * 1e-3)


def rad_m_to_rad_um(k: float) -> float:
    """Wave number rad/m -> rad/um (exact: x * 1e-6)."""
    return k * 1e-6


def rad_um_to_rad_m(k: float) -> float:
    return k * 1e6


def m_s_to_um_ns(v: float) -> float:
    """Velocity m/s -> um/ns (exact: x * 1e-3)."""
    return v * 1e-3


def thermal_velocity(temperature_k: float, mass_kg: float = CONSTANTS.rb87_mass) -> float:
    """RMS thermal velocity sqrt(kB*T/m) in m/s along one axis.

    temperature_k = 0 returns 0; negative temperature is an error.
    """
    if temperature_k < 0:
        raise ValueError(f"temperature must be >= 0, got {temperature_k}")
    return math.sqrt(CONSTANTS.boltzmann_constant * temperature_k / mass_kg)


def effective_wavevectors(
    lambda_p_nm: float,
    lambda_c_nm: float,
    lambda_p_cd_nm: float,
    lambda_c_cd_nm: float,
) -> tuple[float, float, float]:
    """Effective spin-wave wave numbers (rad/m) for the resonant and CD paths.

    For the counter-propagating colinear geometry used here the effective wave
    number is the magnitude of the *difference* of the control and probe wave
    numbers; the mismatch between the two excitation paths is
    delta_k = |k_eff - k_eff_cd|.

    Returns (k_eff, k_eff_cd, delta_k), all in rad/m.
    """
    for name, lam in (("lambda_p", lambda_p_nm), ("lambda_c", lambda_c_nm),
                      ("lambda_p_cd", lambda_p_cd_nm), ("lambda_c_cd", lambda_c_cd_nm)):
        if lam <= 0:
            raise ValueError(f"{name} must be > 0, got {lam}")
    k_p = TWO_PI / (lambda_p_nm * 1e-9)
    k_c = TWO_PI / (lambda_c_nm * 1e-9)
    k_p2 = TWO_PI / (lambda_p_cd_nm * 1e-9)
    k_c2 = TWO_PI / (lambda_c_cd_nm * 1e-9)
    k_eff = abs(k_c - k_p)
    k_eff_cd = abs(k_c2 - k_p2)
    return k_eff, k_eff_cd, abs(k_eff - k_eff_cd)


def copropagating_wavevector(lambda_p_nm: float, lambda_c_nm: float) -> float:
    """Sum |k_p + k_c| in rad/m (co-propagating spin-wave momentum)."""
    if lambda_p_nm <= 0 or lambda_c_nm <= 0:
        raise ValueError("wavelengths must be > 0")
    return TWO_PI / (lambda_p_nm * 1e-9) + TWO_PI / (lambda_c_nm * 1e-9)
