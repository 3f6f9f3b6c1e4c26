"""Reduced two-state model of the laser-dressed bound resonance.

The ground (1s^2) and resonance (1s3p) amplitudes obey

    i dc_1s/dt = [E_1s + delta_1s I_IR(t)] c_1s,
    i dc_3p/dt = [E_3p + (delta_3p - i gamma_3p / 2) I_IR(t)] c_3p
                 + mu_1s3p A_H15(t) c_1s,

where I_IR(t) is the instantaneous dressing intensity and A_H15(t) the
harmonic-15 vector potential.  Stark shifts and the resonance depletion
rate scale linearly with I_IR(t); the weak XUV neither shifts nor
depletes the ground state.  Because the ground-state coefficient is
real, c_1s is a pure phase and is integrated in closed form; c_3p is
advanced with a fixed-step classical Runge-Kutta scheme validated by
step halving.

Two interfering one-IR-photon pathways reach the sideband at
photoelectron energy E (threshold at zero):

    M_res(E) = mu_3p_e           int e^{iEt} A_IR(t) c_3p(t)          dt
    M_con(E) = pi mu_1s_ep mu_ep_e int e^{iEt} A_IR(t) A_H17(t) c_1s(t) dt

The resonant route absorbs the dressing photon from the transiently
populated resonance; the continuum route absorbs harmonic 17 and emits
one IR photon, passing through the intermediate continuum shell at
E + omega_IR.  Their beat carries the explicit exp(-2 i omega_IR tau)
delay dependence plus the slow phase of the resonance dynamics, and
the dark fringes sit where the phase difference crosses odd multiples
of pi.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

import numpy as np

from .pulses import PulseConfigError, PulseTrain
from .constants import fs_to_au

_REFERENCE_INTENSITY = 8.548385e-5
"""Dressing intensity 3e12 W/cm^2 in a.u., at which the Stark and
depletion products below were quoted."""


class AccuracyError(RuntimeError):
    """Raised when an integration fails its internal accuracy check."""


@dataclass(frozen=True)
class LevelParams:
    """Level energies and per-intensity dressing coefficients (a.u.).

    ``delta_1s``, ``delta_3p`` and ``gamma_3p`` are slopes with respect
    to the instantaneous IR intensity; at 3e12 W/cm^2 their products
    reproduce -6.6e-3, 2.2e-3 and 4.8e-3 hartree.  The ground-state
    shift is close to the ponderomotive value -I/(4 omega^2).
    ``mu_1s3p`` is the bound-bound velocity-gauge dipole magnitude from
    the model-potential states; the three pathway dipoles are treated
    as real constants and default to unity since only the channel
    ratio, not the absolute scale, is observable.
    """

    e_1s: float = -0.903540
    e_3p: float = -0.055135
    delta_1s: float = -6.6e-3 / _REFERENCE_INTENSITY
    delta_3p: float = 2.2e-3 / _REFERENCE_INTENSITY
    gamma_3p: float = 4.8e-3 / _REFERENCE_INTENSITY
    mu_1s3p: float = 0.14474
    mu_3p_e: float = 1.0
    mu_1s_ep: float = 1.0
    mu_ep_e: float = 1.0

    def __post_init__(self) -> None:
        if self.gamma_3p < 0:
            raise ValueError("depletion coefficient gamma_3p must be >= 0")


@dataclass(frozen=True)
class BoundAmplitudes:
    """Bound-state amplitudes on a uniform time grid.

    ``c_1s`` keeps unit modulus (its equation of motion is a pure
    phase); ``|c_3p|`` stays well below one in the perturbative XUV
    regime.
    """

    tau_fs: float
    times: np.ndarray
    c_1s: np.ndarray
    c_3p: np.ndarray

    @property
    def dt(self) -> float:
        return float(self.times[1] - self.times[0])


@dataclass(frozen=True)
class PathwayAmplitudes:
    """Resonant and continuum sideband amplitudes on an energy axis."""

    energies: np.ndarray
    m_res: np.ndarray
    m_con: np.ndarray
    wave: str = "s"

    @property
    def m_total(self) -> np.ndarray:
        return self.m_res + self.m_con


def delayed_train(train: PulseTrain, tau_fs: float) -> PulseTrain:
    """Move the component labelled IR to center -tau; leave the rest."""
    parts = []
    found = False
    for comp in train:
        if comp.label == "IR":
            parts.append(dataclasses.replace(comp, center=fs_to_au(-tau_fs)))
            found = True
        else:
            parts.append(comp)
    if not found:
        raise PulseConfigError("train has no component labelled 'IR'")
    return PulseTrain(components=tuple(parts))


def _rk4_cascade(lam_half, g_half, dt):
    """March c' = lam(t) c + g(t) from c(0)=0 with classical RK4.

    ``lam_half`` and ``g_half`` sample the half-step grid (2N+1 points
    for N steps).  The one-step update is affine, c_{n+1} = s_n c_n +
    r_n, so the whole trajectory follows from cumulative products and
    sums instead of a Python loop.
    """
    lam0, lamh, lam1 = lam_half[:-2:2], lam_half[1::2], lam_half[2::2]
    g0, gh, g1 = g_half[:-2:2], g_half[1::2], g_half[2::2]

    a1 = lam0
    a2 = lamh * (1.0 + 0.5 * dt * a1)
    a3 = lamh * (1.0 + 0.5 * dt * a2)
    a4 = lam1 * (1.0 + dt * a3)
    s = 1.0 + dt / 6.0 * (a1 + 2 * a2 + 2 * a3 + a4)

    b1 = g0
    b2 = lamh * (0.5 * dt * b1) + gh
    b3 = lamh * (0.5 * dt * b2) + gh
    b4 = lam1 * (dt * b3) + g1
    r = dt / 6.0 * (b1 + 2 * b2 + 2 * b3 + b4)

    # c_N = P_N sum_{n<N} r_n / P_{n+1} with P_k = prod_{m<k} s_m.
    prod = np.empty(s.size + 1, dtype=complex)
    prod[0] = 1.0
    np.cumprod(s, out=prod[1:])
    c = prod * np.concatenate(([0.0], np.cumsum(r / prod[1:])))
    if not np.all(np.isfinite(c)):
        # Strong depletion underflows the cumulative product; fall back
        # to the explicit recurrence.
        c = np.empty(s.size + 1, dtype=complex)
        c[0] = 0.0
        for n in range(s.size):
            c[n + 1] = s[n] * c[n] + r[n]
    return c


def _amplitudes_on_grid(params, shot, t_lo, n_steps, dt):
    ir = shot.component("IR")
    h15 = shot.component("H15")
    t_half = t_lo + 0.5 * dt * np.arange(2 * n_steps + 1)

    i_ir = ir.instantaneous_intensity(t_half)
    # Phase referenced to t = 0 (the harmonic center) so spectra from
    # different windows and delays share one phase convention.
    phase_1s = params.e_1s * t_half + params.delta_1s * (
        ir.cumulative_intensity(t_half, 0.0)
    )
    c_1s_half = np.exp(-1j * phase_1s)

    lam_half = -1j * (
        params.e_3p + (params.delta_3p - 0.5j * params.gamma_3p) * i_ir
    )
    g_half = -1j * params.mu_1s3p * h15.vector_potential(t_half) * c_1s_half
    c_3p = _rk4_cascade(lam_half, g_half, dt)
    return t_half[::2], c_1s_half[::2], c_3p


def integrate_amplitudes(
    params: LevelParams,
    train: PulseTrain,
    tau_fs: float,
    dt: float = 0.1,
    validate: bool = True,
    halving_tol: float = 1e-8,
    window_widths: float = 3.2,
) -> BoundAmplitudes:
    """Integrate the bound-amplitude equations at scan delay ``tau_fs``.

    Parameters
    ----------
    params : LevelParams
    train : PulseTrain
        Template shot; its IR component is re-centered to -tau.
    tau_fs : float
        Scan delay in femtoseconds (negative: IR after the XUV).
    dt : float
        Time step in a.u.; the fastest drive component advances by
        about 1.8 dt radians per step.
    validate : bool
        Re-run at dt/2 and require agreement of c_3p on shared nodes.
    halving_tol : float
        Maximum allowed step-halving disagreement.
    window_widths : float
        Envelope support multiplier defining the integration window.

    Returns
    -------
    BoundAmplitudes
    """
    if dt <= 0:
        raise ValueError("time step must be positive")
    shot = delayed_train(train, tau_fs)
    t_lo, t_hi = shot.window(n_widths=window_widths)
    n_steps = max(int(math.ceil((t_hi - t_lo) / dt)), 2)

    times, c_1s, c_3p = _amplitudes_on_grid(params, shot, t_lo, n_steps, dt)
    if validate:
        _, _, c_3p_fine = _amplitudes_on_grid(
            params, shot, t_lo, 2 * n_steps, 0.5 * dt
        )
        err = np.abs(c_3p - c_3p_fine[::2]).max()
        if err > halving_tol:
            raise AccuracyError(
                f"step-halving disagreement {err:.2e} exceeds {halving_tol:.0e}; "
                "reduce dt"
            )
    return BoundAmplitudes(tau_fs=tau_fs, times=times, c_1s=c_1s, c_3p=c_3p)


def _spectral_transform(times, integrand, energies, chunk=128):
    """Trapezoid quadrature of e^{iEt} x integrand for each energy."""
    dt = times[1] - times[0]
    weights = np.full(times.size, dt)
    weights[0] = weights[-1] = 0.5 * dt
    weighted = integrand * weights
    out = np.empty(energies.size, dtype=complex)
    for start in range(0, energies.size, chunk):
        block = energies[start : start + chunk]
        out[start : start + chunk] = (
            np.exp(1j * np.outer(block, times)) @ weighted
        )
    return out


def _check_sampling(amps: BoundAmplitudes, energies: np.ndarray) -> None:
    e_max = float(np.abs(energies).max())
    if e_max * amps.dt > 2.0 * np.pi / 10.0:
        raise AccuracyError(
            "spectral carrier undersampled: need > 10 points per e^{iEt} period"
        )


def resonant_amplitude(
    amps: BoundAmplitudes,
    params: LevelParams,
    train: PulseTrain,
    energies: np.ndarray,
) -> np.ndarray:
    """Sideband amplitude through the transient resonance.

    M_res(E) = mu_3p_e int e^{iEt} A_IR(t) c_3p(t) dt, evaluated on the
    amplitude grid.  The spectrum peaks near E_3p + omega_IR plus Stark
    corrections while the pulses overlap, and survives as a
    near-threshold tail once they separate.
    """
    energies = np.asarray(energies, dtype=float)
    _check_sampling(amps, energies)
    ir = delayed_train(train, amps.tau_fs).component("IR")
    integrand = ir.vector_potential(amps.times) * amps.c_3p
    return params.mu_3p_e * _spectral_transform(amps.times, integrand, energies)


def continuum_amplitude(
    amps: BoundAmplitudes,
    params: LevelParams,
    train: PulseTrain,
    energies: np.ndarray,
) -> np.ndarray:
    """Sideband amplitude through the intermediate continuum.

    M_con(E) = pi mu_1s_ep mu_ep_e int e^{iEt} A_IR(t) A_H17(t) c_1s(t) dt:
    harmonic-17 absorption into the shell at E + omega_IR followed by
    stimulated IR emission, collapsed onto the envelope product by the
    broadband intermediate sum.
    """
    energies = np.asarray(energies, dtype=float)
    _check_sampling(amps, energies)
    shot = delayed_train(train, amps.tau_fs)
    integrand = (
        shot.component("IR").vector_potential(amps.times)
        * shot.component("H17").vector_potential(amps.times)
        * amps.c_1s
    )
    prefactor = np.pi * params.mu_1s_ep * params.mu_ep_e
    return prefactor * _spectral_transform(amps.times, integrand, energies)


def pathway_amplitudes(
    params: LevelParams,
    train: PulseTrain,
    tau_fs: float,
    energies: np.ndarray,
    wave: str = "s",
    dt: float = 0.1,
    validate: bool = True,
) -> PathwayAmplitudes:
    """Integrate the bound dynamics and evaluate both pathways."""
    amps = integrate_amplitudes(params, train, tau_fs, dt=dt, validate=validate)
    return PathwayAmplitudes(
        energies=np.asarray(energies, dtype=float),
        m_res=resonant_amplitude(amps, params, train, energies),
        m_con=continuum_amplitude(amps, params, train, energies),
        wave=wave,
    )


def minima_locus(
    params: LevelParams,
    train: PulseTrain,
    energies: np.ndarray,
    taus_fs: np.ndarray,
    shift_fs: float = 0.25,
    dt: float = 0.1,
    match_window_fs: float = 0.4,
) -> list[np.ndarray]:
    """Interference-minima curves in the (delay, energy) plane.

    For each energy the beat z(tau) = M_res M_con* crosses a dark
    fringe where Im z changes sign with Re z < 0 (phase difference at
    an odd multiple of pi).  Crossings of neighbouring energy rows are
    chained into curves, which repeat in delay with the half-IR-cycle
    period pi/omega.  The configurable global delay offset ``shift_fs``
    is added to the returned curves.

    Returns
    -------
    list of (n, 2) arrays
        Columns (tau_fs, energy_au), longest curve first.
    """
    energies = np.asarray(energies, dtype=float)
    taus_fs = np.asarray(taus_fs, dtype=float)
    beat = np.empty((taus_fs.size, energies.size), dtype=complex)
    for i, tau in enumerate(taus_fs):
        spectra = pathway_amplitudes(
            params, train, float(tau), energies, dt=dt, validate=(i == 0)
        )
        beat[i] = spectra.m_res * np.conj(spectra.m_con)

    floor = 1e-12 * np.abs(beat).max()
    crossings: list[list[float]] = []
    for j in range(energies.size):
        z = beat[:, j]
        s, c = z.imag, z.real
        here: list[float] = []
        for i in range(taus_fs.size - 1):
            if s[i] == 0.0 and c[i] < 0 and abs(z[i]) > floor:
                here.append(float(taus_fs[i]))
                continue
            if s[i] * s[i + 1] < 0 and c[i] + c[i + 1] < 0:
                if min(abs(z[i]), abs(z[i + 1])) <= floor:
                    continue
                frac = s[i] / (s[i] - s[i + 1])
                here.append(float(taus_fs[i] + frac * (taus_fs[i + 1] - taus_fs[i])))
        crossings.append(here)

    # Chain row-by-row: continue each open curve with the nearest
    # crossing of the next energy row, else start a new curve.
    open_curves: list[list[tuple[float, float]]] = []
    closed: list[list[tuple[float, float]]] = []
    for j, row in enumerate(crossings):
        available = list(row)
        still_open = []
        for curve in open_curves:
            last_tau = curve[-1][0]
            if available:
                k = int(np.argmin([abs(t - last_tau) for t in available]))
                if abs(available[k] - last_tau) <= match_window_fs:
                    curve.append((available.pop(k), energies[j]))
                    still_open.append(curve)
                    continue
            closed.append(curve)
        open_curves = still_open
        for t in available:
            open_curves.append([(t, energies[j])])
    closed.extend(open_curves)

    curves = [
        np.array([(t + shift_fs, e) for t, e in curve]) for curve in closed
    ]
    curves.sort(key=len, reverse=True)
    return curves


def breit_wigner_limit(
    params: LevelParams,
    train: PulseTrain,
    energies: np.ndarray,
    intensity: float | None = None,
) -> np.ndarray:
    """Resonant amplitude for a constant dressing intensity.

    Freezing I_IR turns the double time integral into a convolution,
    giving the pole form

        M_res(E) ~ -i / (Delta_1 + i Gamma/2)
                   x FT[sqrt(I_IR I_H15(t))](Delta_2),

    with Delta_1 = E - omega_IR - E_3p - delta_3p I, Gamma = gamma_3p I,
    and Delta_2 = E - E_1s - delta_1s I - omega_IR - omega_H15.  The
    Gaussian envelope transform is evaluated in closed form.  Overall
    dipole constants are omitted; compare shapes after normalization.
    """
    energies = np.asarray(energies, dtype=float)
    ir = train.component("IR")
    h15 = train.component("H15")
    i_ir = ir.intensity if intensity is None else float(intensity)
    if i_ir < 0:
        raise ValueError("intensity must be >= 0")

    delta_1 = energies - ir.omega - params.e_3p - params.delta_3p * i_ir
    gamma = params.gamma_3p * i_ir
    delta_2 = energies - params.e_1s - params.delta_1s * i_ir - ir.omega - h15.omega

    four_ln2 = 4.0 * math.log(2.0)
    width = h15.fwhm
    gauss_ft = (
        math.sqrt(math.pi / four_ln2)
        * width
        * np.exp(-(delta_2**2) * width**2 / (4.0 * four_ln2))
        * np.exp(-1j * delta_2 * h15.center)
    )
    envelope_amp = math.sqrt(i_ir * h15.intensity)
    return -1j / (delta_1 + 0.5j * gamma) * envelope_amp * gauss_ft
