"""Gaussian-enveloped laser pulses and the RABBIT pump-probe geometry.

The total vector potential is a sum of components

    A(t) = sum_i sqrt(I_i)/omega_i * exp[-4 ln2 ((t - tau_i)/T_i)^2]
           * cos(omega_i (t - tau_i)),

with peak intensity I_i, carrier omega_i, and envelope width T_i.  The
instantaneous intensity entering dressed-state models is the squared
envelope, I_i(t) = I_i exp[-8 ln2 ((t - tau_i)/T_i)^2], so that the
rotating-wave amplitude is sqrt(I_i(t))/(2 omega_i) exactly.

Delay convention: a scan delay tau shifts only the IR component, to
tau_IR = -tau, while the harmonics stay centered at zero.  Negative tau
therefore means the IR probe arrives after the XUV.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np
from scipy import special

from .constants import fs_to_au, intensity_to_au

OMEGA_IR_DEFAULT = 0.05703
"""Fundamental IR carrier frequency in hartree (800 nm drive)."""

FOUR_LN2 = 4.0 * math.log(2.0)


class PulseConfigError(ValueError):
    """Raised for non-physical pulse parameters."""


@dataclass(frozen=True)
class PulseComponent:
    """One Gaussian-enveloped cosine component of the vector potential.

    All fields are in atomic units; use :meth:`from_lab` to build from
    W/cm^2, femtoseconds, and harmonic order.
    """

    label: str
    omega: float
    intensity: float
    fwhm: float
    center: float = 0.0
    phase: float = 0.0

    def __post_init__(self) -> None:
        if not self.label:
            raise PulseConfigError("component label must be non-empty")
        if self.omega <= 0:
            raise PulseConfigError(f"{self.label}: carrier must be positive")
        if self.intensity < 0:
            raise PulseConfigError(f"{self.label}: intensity must be >= 0")
        if self.fwhm <= 0:
            raise PulseConfigError(f"{self.label}: envelope width must be positive")

    @classmethod
    def from_lab(
        cls,
        label: str,
        harmonic: float,
        intensity_Wcm2: float,
        fwhm_fs: float,
        center_fs: float = 0.0,
        omega_base: float = OMEGA_IR_DEFAULT,
    ) -> "PulseComponent":
        """Build a component from laboratory units and harmonic order."""
        return cls(
            label=label,
            omega=harmonic * omega_base,
            intensity=intensity_to_au(intensity_Wcm2),
            fwhm=fs_to_au(fwhm_fs),
            center=fs_to_au(center_fs),
        )

    @property
    def peak_amplitude(self) -> float:
        """Vector-potential amplitude sqrt(I)/omega at the envelope peak."""
        return math.sqrt(self.intensity) / self.omega

    def envelope(self, t: np.ndarray | float) -> np.ndarray | float:
        """Amplitude envelope exp[-4 ln2 ((t - center)/T)^2]."""
        x = (np.asarray(t, dtype=float) - self.center) / self.fwhm
        return np.exp(-FOUR_LN2 * x * x)

    def vector_potential(self, t: np.ndarray | float) -> np.ndarray | float:
        """A_i(t) of this component."""
        t = np.asarray(t, dtype=float)
        return (
            self.peak_amplitude
            * self.envelope(t)
            * np.cos(self.omega * (t - self.center) + self.phase)
        )

    def instantaneous_intensity(self, t: np.ndarray | float) -> np.ndarray | float:
        """Cycle-averaged intensity profile I_i(t) = I_i * envelope(t)^2."""
        env = self.envelope(t)
        return self.intensity * env * env

    def cumulative_intensity(
        self, t: np.ndarray | float, reference: float
    ) -> np.ndarray | float:
        """Exact integral of the intensity profile from ``reference`` to t.

        The profile is Gaussian, so the antiderivative is an error function
        with 1/e half-width sigma = T / sqrt(8 ln2).
        """
        sigma = self.fwhm / math.sqrt(2.0 * FOUR_LN2)
        norm = self.intensity * sigma * math.sqrt(math.pi) / 2.0
        x = (np.asarray(t, dtype=float) - self.center) / sigma
        x0 = (reference - self.center) / sigma
        return norm * (special.erf(x) - special.erf(x0))

    def support(self, n_widths: float = 3.2) -> tuple[float, float]:
        """Interval outside which the amplitude is below ~1e-12 of peak."""
        return (self.center - n_widths * self.fwhm, self.center + n_widths * self.fwhm)


@dataclass(frozen=True)
class PulseTrain:
    """Immutable collection of pulse components forming one shot."""

    components: tuple[PulseComponent, ...]

    def __post_init__(self) -> None:
        labels = [c.label for c in self.components]
        if len(set(labels)) != len(labels):
            raise PulseConfigError(f"duplicate component labels: {labels}")

    def __iter__(self):
        return iter(self.components)

    def component(self, label: str) -> PulseComponent:
        for c in self.components:
            if c.label == label:
                return c
        raise KeyError(f"no pulse component labelled {label!r}")

    def vector_potential(self, t: np.ndarray | float) -> np.ndarray | float:
        """Total A(t) summed over components."""
        t = np.asarray(t, dtype=float)
        total = np.zeros_like(t)
        for c in self.components:
            total = total + c.vector_potential(t)
        return total if total.ndim else float(total)

    def window(self, n_widths: float = 3.2, margin: float = 0.0) -> tuple[float, float]:
        """Propagation window covering every component's support."""
        if not self.components:
            raise PulseConfigError("empty pulse train has no window")
        lo = min(c.support(n_widths)[0] for c in self.components)
        hi = max(c.support(n_widths)[1] for c in self.components)
        return (lo - margin, hi + margin)


def ponderomotive_shift(intensity: float, omega: float) -> float:
    """Up = I / (4 omega^2), the cycle-averaged quiver energy (all a.u.)."""
    return intensity / (4.0 * omega * omega)


def product_peak_fs(tau_fs: float, t_ir_fs: float, t_xuv_fs: float) -> float:
    """Peak time of the IR x XUV intensity-envelope product.

    With the IR centered at -tau and the XUV at zero, the product of the two
    Gaussian envelopes peaks at t* = -tau / (1 + T_IR^2 / T_XUV^2),
    independent of the Gaussian width convention.
    """
    return -tau_fs / (1.0 + (t_ir_fs / t_xuv_fs) ** 2)


def rabbit_train(
    tau_fs: float,
    ir_intensity_Wcm2: float = 3.0e12,
    h15_intensity_Wcm2: float = 1.0e12,
    h17_intensity_Wcm2: float = 1.0e12,
    t_ir_fs: float = 31.0,
    t_xuv_fs: float = 12.0,
    omega_ir: float = OMEGA_IR_DEFAULT,
    include: Iterable[str] = ("IR", "H15", "H17"),
) -> PulseTrain:
    """Standard two-harmonic RABBIT shot at scan delay tau.

    The IR is centered at -tau; harmonics 15 and 17 stay at zero.  Drop
    components via ``include`` for single-color runs (e.g. only "H17").
    """
    include = tuple(include)
    known = {"IR", "H15", "H17"}
    unknown = set(include) - known
    if unknown:
        raise PulseConfigError(f"unknown components requested: {sorted(unknown)}")
    parts = []
    if "IR" in include:
        parts.append(
            PulseComponent.from_lab(
                "IR", 1.0, ir_intensity_Wcm2, t_ir_fs, center_fs=-tau_fs,
                omega_base=omega_ir,
            )
        )
    if "H15" in include:
        parts.append(
            PulseComponent.from_lab(
                "H15", 15.0, h15_intensity_Wcm2, t_xuv_fs, omega_base=omega_ir
            )
        )
    if "H17" in include:
        parts.append(
            PulseComponent.from_lab(
                "H17", 17.0, h17_intensity_Wcm2, t_xuv_fs, omega_base=omega_ir
            )
        )
    return PulseTrain(components=tuple(parts))
