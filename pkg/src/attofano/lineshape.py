"""Analytic complex-plane model of the laser-assisted Fano lineshape.

Near an isolated resonance the resonant channel traces the Breit-Wigner
circle

    M_res(eps) = 1 / (eps + i),

a circle of radius 1/2 centered at -i/2 swept as the reduced energy
eps = (E - E_r)/(Gamma/2) runs along the real axis.  The competing
continuum channel is a Gaussian arm rotated by the pump-probe beat
phase,

    M_con(eps) = q e^{i phase} e^{-eps^2/4},

with channel ratio q and phase = 2 omega tau.  Their coherent sum
|M_res + M_con|^2 generates the full family of Fano profiles: rotating
the phase by a quarter cycle morphs a left-biased peak into a symmetric
double peak, a right-biased peak, and a symmetric single peak, while q
sets how strongly the peak position and contrast respond.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


def default_epsilon_axis() -> np.ndarray:
    """Symmetric reduced-energy grid wide enough for both channels."""
    return np.linspace(-8.0, 8.0, 1601)


@dataclass(frozen=True)
class FanoConfig:
    """Channel ratio, beat phase 2*omega*tau, and reduced-energy grid."""

    q: float
    phase: float
    epsilon: np.ndarray = field(default_factory=default_epsilon_axis)

    def __post_init__(self) -> None:
        if self.q < 0:
            raise ValueError("channel ratio q must be >= 0")
        eps = np.asarray(self.epsilon, dtype=float)
        if eps.ndim != 1 or eps.size < 2:
            raise ValueError("epsilon axis must be a 1-d grid")
        object.__setattr__(self, "epsilon", eps)


@dataclass(frozen=True)
class LineshapeTraces:
    """Complex channel traces and the resulting intensity profile."""

    epsilon: np.ndarray
    m_res: np.ndarray
    m_con: np.ndarray

    @property
    def m_total(self) -> np.ndarray:
        return self.m_res + self.m_con

    @property
    def power(self) -> np.ndarray:
        return np.abs(self.m_total) ** 2


def m_res(epsilon: np.ndarray | float) -> np.ndarray | complex:
    """Breit-Wigner channel 1/(eps + i)."""
    return 1.0 / (np.asarray(epsilon, dtype=float) + 1j)


def m_con(
    epsilon: np.ndarray | float, q: float, phase: float
) -> np.ndarray | complex:
    """Continuum channel q e^{i phase} e^{-eps^2/4}."""
    eps = np.asarray(epsilon, dtype=float)
    return q * np.exp(1j * phase) * np.exp(-0.25 * eps * eps)


def lineshape(config: FanoConfig) -> LineshapeTraces:
    """Evaluate both channels and their interference on the grid."""
    return LineshapeTraces(
        epsilon=config.epsilon,
        m_res=m_res(config.epsilon),
        m_con=m_con(config.epsilon, config.q, config.phase),
    )


def peak_shift(q: float, epsilon: np.ndarray | None = None) -> float:
    """Distance between the profile peaks at beat phases 0 and pi.

    The two phases put the continuum arm along +1 and -1, biasing the
    resonance peak to opposite sides; the separation grows with q and
    collapses as the continuum channel vanishes.
    """
    eps = default_epsilon_axis() if epsilon is None else np.asarray(epsilon)
    right = lineshape(FanoConfig(q=q, phase=0.0, epsilon=eps)).power
    left = lineshape(FanoConfig(q=q, phase=np.pi, epsilon=eps)).power
    return float(abs(eps[np.argmax(right)] - eps[np.argmax(left)]))
