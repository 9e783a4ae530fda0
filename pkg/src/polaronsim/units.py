"""Unit conventions and conversion constants.

All energies are stored as ordinary frequencies in GHz (hbar = h = 1), all
times in ns, so a phase accumulates as 2*pi*E[GHz]*t[ns] and propagators are
exp(-2j*pi*H*t).
"""

CM1_TO_GHZ = 29.9792458
"""GHz per wavenumber (cm^-1); numerically the speed of light in cm/ns."""

KB_GHZ_PER_K = 20.836619
"""Boltzmann constant over Planck, GHz per kelvin.  The single temperature
constant used everywhere Boltzmann factors or thermal occupations appear."""


def kelvin_to_ghz(temperature_k: float) -> float:
    """Thermal energy k_B*T expressed as a frequency in GHz."""
    return KB_GHZ_PER_K * temperature_k


def cm1_to_ghz(wavenumber: float) -> float:
    return wavenumber * CM1_TO_GHZ


def ghz_to_cm1(freq_ghz: float) -> float:
    return freq_ghz / CM1_TO_GHZ
