"""Single-active-electron helium model: potential, states, dipole couplings.

The active electron moves in a parametrized screened Coulomb potential

    V(r) = -(z + a1 e^{-a2 r} + a3 r e^{-a4 r} + a5 e^{-a6 r}) / r

whose numerator interpolates between the bare He nucleus seen at r -> 0
(z + a1 + a5 = 2 for the default z = 1) and the singly charged core seen by
the outgoing electron at large r.  Bound and box-continuum states per angular
momentum come from the FE-DVR channel Hamiltonians; continuum states are
energy-normalized through the local level spacing so projections yield
spectral densities directly.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .fedvr import (
    ChannelOperator,
    RadialGrid,
    assemble_hamiltonian,
    build_grid,
    core_refined_breakpoints,
    eigensolve,
)


class StateRequestError(ValueError):
    """Raised when a state query cannot be satisfied by the box spectrum."""


@dataclass(frozen=True)
class PotentialParams:
    """Screened-Coulomb parameters of the He SAE potential.

    ``z_asymptotic`` is the charge seen at large r; the short-range terms
    raise the effective charge to z + a1 + a5 = 2 at the origin.
    """

    a1: float = 1.231
    a2: float = 0.662
    a3: float = -2.966
    a4: float = 2.883
    a5: float = -0.231
    a6: float = 0.121
    z_asymptotic: float = 1.0


def default_grid(
    r_max: float = 100.0, n_elements: int = 48, order: int = 8
) -> RadialGrid:
    """Standard helium box: core-refined elements on [0, 3], uniform beyond.

    The refined core converges the 1s^2 level to ~4e-8 hartree at the default
    (100, 48, 8) size; a uniform layout of the same size is 3e-4 off.
    """
    return build_grid(
        r_max, n_elements, order,
        breakpoints=core_refined_breakpoints(r_max, n_elements),
    )


def model_potential(r: np.ndarray, params: PotentialParams | None = None) -> np.ndarray:
    """Evaluate the SAE model potential at radii r > 0."""
    p = params or PotentialParams()
    r = np.asarray(r, dtype=float)
    numerator = (
        p.z_asymptotic
        + p.a1 * np.exp(-p.a2 * r)
        + p.a3 * r * np.exp(-p.a4 * r)
        + p.a5 * np.exp(-p.a6 * r)
    )
    return -numerator / r


@dataclass
class RadialState:
    """One radial eigenstate: channel, energy, and basis coefficients."""

    l: int
    energy: float
    coeffs: np.ndarray
    norm: str = "unit"


@dataclass
class StateTable:
    """Eigenstates of one channel Hamiltonian, ascending in energy.

    ``norm`` records whether the coefficient columns are unit-normalized
    bound states or energy-normalized continuum states (scaled by
    1/sqrt(dE_n) with dE_n the centered level spacing).
    """

    l: int
    energies: np.ndarray
    states: np.ndarray
    grid: RadialGrid
    norm: str = "unit"
    spacings: np.ndarray | None = None

    def __len__(self) -> int:
        return len(self.energies)

    def state(self, i: int) -> RadialState:
        return RadialState(
            l=self.l, energy=float(self.energies[i]), coeffs=self.states[:, i],
            norm=self.norm,
        )


def channel_hamiltonian(
    grid: RadialGrid, params: PotentialParams, l: int
) -> ChannelOperator:
    """Assemble the channel Hamiltonian for the SAE potential."""
    return assemble_hamiltonian(grid, model_potential(grid.nodes, params), l)


def bound_states(
    grid: RadialGrid, params: PotentialParams, l: int, n: int
) -> StateTable:
    """Lowest n bound (E < 0) states of channel l.

    Raises
    ------
    StateRequestError
        If the box spectrum holds fewer than n bound states for this channel.
    """
    op = channel_hamiltonian(grid, params, l)
    energies, states = eigensolve(op)
    n_bound = int(np.count_nonzero(energies < 0.0))
    if n > n_bound:
        raise StateRequestError(
            f"channel l={l} has {n_bound} bound states in this box, requested {n}"
        )
    return StateTable(
        l=l, energies=energies[:n].copy(), states=states[:, :n].copy(), grid=grid
    )


def bound_table(
    grid: RadialGrid, l: int, energies: np.ndarray, states: np.ndarray
) -> StateTable:
    """All bound (E < 0) columns of a precomputed channel spectrum."""
    n_bound = int(np.count_nonzero(energies < 0.0))
    return StateTable(
        l=l,
        energies=energies[:n_bound].copy(),
        states=states[:, :n_bound].copy(),
        grid=grid,
    )


def continuum_table(
    grid: RadialGrid,
    l: int,
    energies: np.ndarray,
    states: np.ndarray,
    e_min: float,
    e_max: float,
) -> StateTable:
    """Energy-normalized window of a precomputed channel spectrum.

    See :func:`continuum_states` for the normalization convention; this
    variant reuses an existing eigendecomposition instead of solving again.

    Raises
    ------
    StateRequestError
        If the window is empty, non-positive, or above the spectrum ceiling.
    """
    if not 0.0 <= e_min < e_max:
        raise StateRequestError(
            f"need 0 <= e_min < e_max, got [{e_min}, {e_max}]"
        )
    if e_max > energies[-1]:
        raise StateRequestError(
            f"e_max={e_max} exceeds the box-spectrum ceiling {energies[-1]:.3f}"
        )
    spacing = np.empty_like(energies)
    spacing[1:-1] = 0.5 * (energies[2:] - energies[:-2])
    spacing[0] = energies[1] - energies[0]
    spacing[-1] = energies[-1] - energies[-2]
    keep = np.flatnonzero((energies > 0.0) & (energies >= e_min) & (energies <= e_max))
    if keep.size == 0:
        raise StateRequestError(
            f"no box states with energy in [{e_min}, {e_max}] for l={l}"
        )
    first = keep[0]
    if e_min < spacing[first] and energies[first] > e_min + spacing[first]:
        warnings.warn(
            f"box spectrum is coarse near threshold: first continuum state at "
            f"{energies[first]:.4g} hartree, local spacing {spacing[first]:.4g}",
            stacklevel=2,
        )
    scaled = states[:, keep] / np.sqrt(spacing[keep])[None, :]
    return StateTable(
        l=l,
        energies=energies[keep].copy(),
        states=scaled,
        grid=grid,
        norm="energy",
        spacings=spacing[keep].copy(),
    )


def continuum_states(
    grid: RadialGrid,
    params: PotentialParams,
    l: int,
    e_min: float,
    e_max: float,
) -> StateTable:
    """Energy-normalized box-continuum states with energies in [e_min, e_max].

    Box eigenstates are discrete; each state in the window is rescaled by
    1/sqrt(dE_n), dE_n = (E_{n+1} - E_{n-1})/2, so that |<E|psi>|^2 is a
    spectral density.  A warning is emitted when the window's lower edge is
    not resolved by the local level spacing.

    Raises
    ------
    StateRequestError
        If the window is empty, non-positive, or above the spectrum ceiling.
    """
    op = channel_hamiltonian(grid, params, l)
    energies, states = eigensolve(op)
    return continuum_table(grid, l, energies, states, e_min, e_max)


def angular_factor(l: int) -> float:
    """<Y_{l+1,0}|cos(theta)|Y_{l,0}> = (l+1)/sqrt((2l+1)(2l+3))."""
    return (l + 1) / np.sqrt((2 * l + 1) * (2 * l + 3))


@dataclass
class DipoleCoupling:
    """Velocity-gauge p_z coupling blocks between adjacent channels.

    For reduced radial functions the raising block (l -> l+1) is
    a_l (d/dr - (l+1)/r) and the lowering block (l+1 -> l) is
    a_l (d/dr + (l+1)/r), both multiplied by -i; the pair is Hermitian
    because the FE-DVR derivative matrix is exactly antisymmetric.
    """

    grid: RadialGrid
    l_max: int
    gauge: str = "velocity"
    _deriv: np.ndarray = field(init=False, repr=False)
    _inv_r: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        if self.l_max < 1:
            raise StateRequestError(f"dipole coupling needs l_max >= 1, got {self.l_max}")
        self._deriv = self.grid.derivative_matrix()
        self._inv_r = 1.0 / self.grid.nodes

    def raising_block(self, l: int) -> np.ndarray:
        """Dense matrix of a_l (d/dr - (l+1)/r) mapping channel l to l+1."""
        block = self._deriv - np.diag((l + 1) * self._inv_r)
        return angular_factor(l) * block

    def apply_raising(self, l: int, u: np.ndarray) -> np.ndarray:
        """a_l (D u - (l+1) u / r) without forming the dense block."""
        return angular_factor(l) * (self._deriv @ u - (l + 1) * self._inv_r * u)

    def apply_lowering(self, l: int, u: np.ndarray) -> np.ndarray:
        """a_l (D u + (l+1) u / r): maps channel l+1 down to l."""
        return angular_factor(l) * (self._deriv @ u + (l + 1) * self._inv_r * u)


@dataclass(frozen=True)
class DipoleElement:
    """Result of a p_z matrix element including the selection-rule verdict."""

    value: complex
    allowed: bool

    def __complex__(self) -> complex:
        return self.value

    def __abs__(self) -> float:
        return abs(self.value)


def dipole_element(
    bra: RadialState, ket: RadialState, coupling: DipoleCoupling
) -> DipoleElement:
    """<bra| p_z |ket> in velocity gauge for m = 0 channels.

    Channels with |l_bra - l_ket| != 1 return an explicit zero-coupling
    result rather than raising, so selection-rule filtering is visible to
    callers.
    """
    dl = bra.l - ket.l
    if abs(dl) != 1:
        return DipoleElement(value=0j, allowed=False)
    if dl == 1:
        vec = coupling.apply_raising(ket.l, ket.coeffs)
    else:
        vec = coupling.apply_lowering(bra.l, ket.coeffs)
    return DipoleElement(value=-1j * complex(np.dot(np.conj(bra.coeffs), vec)), allowed=True)


def helium_levels(
    grid: RadialGrid, params: PotentialParams | None = None
) -> dict[str, RadialState]:
    """The three bound states used throughout: 1s^2, 1s2s, 1s3p."""
    p = params or PotentialParams()
    s_states = bound_states(grid, p, l=0, n=2)
    p_states = bound_states(grid, p, l=1, n=2)
    return {
        "1s2": s_states.state(0),
        "1s2s": s_states.state(1),
        "1s3p": p_states.state(1),
    }
