"""Atomic-unit conversion factors shared across the package.

All internal physics is done in Hartree atomic units; conversions to the
laboratory units used in configs and reports (eV, fs, W/cm^2) go through the
single frozen table below so every module agrees to the last digit.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class PhysicalConstants:
    """Conversion factors between atomic units and laboratory units."""

    hartree_to_ev: float = 27.211386
    au_time_to_fs: float = 0.02418884
    au_intensity_Wcm2: float = 3.50945e16


CONST = PhysicalConstants()


def ev_to_au(energy_ev: float) -> float:
    """Convert an energy in eV to Hartree."""
    return energy_ev / CONST.hartree_to_ev


def au_to_ev(energy_au: float) -> float:
    """Convert an energy in Hartree to eV."""
    return energy_au * CONST.hartree_to_ev


def fs_to_au(time_fs: float) -> float:
    """Convert a time in femtoseconds to atomic units."""
    return time_fs / CONST.au_time_to_fs


def au_to_fs(time_au: float) -> float:
    """Convert a time in atomic units to femtoseconds."""
    return time_au * CONST.au_time_to_fs


def intensity_to_au(intensity_Wcm2: float) -> float:
    """Convert a cycle-averaged intensity in W/cm^2 to atomic units."""
    return intensity_Wcm2 / CONST.au_intensity_Wcm2
