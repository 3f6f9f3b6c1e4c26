"""Fringe analysis of delay-resolved spectrograms.

The sideband yield of an XUV+IR interferogram oscillates as
``a + 2 b cos(2 omega tau + phi)``.  This module extracts the local
(a, b, phi) fields by windowed weighted least squares, converts the fitted
beat phase into the phase of the product of the two interfering pathway
amplitudes, and inverts the fitted fringe field into a time-domain resonant
wave packet by dividing out a continuum reference amplitude and applying a
low-pass spectral filter.

Conventions
-----------
The fit basis is {1, cos 2wt, sin 2wt} with Gaussian delay weights; the
contrast is reported with ``b >= 0`` and the branch of ``phi`` fixed by
``atan2``.  For a yield ``|M_res + M_con|**2`` the cross term satisfies
``2 Re(M_res M_con*) = 2 b cos(2 omega tau + phi)`` with
``b = |M_res||M_con|`` and ``arg(M_res M_con*) = -(phi + 2 omega tau)``,
which is the quantity returned by :meth:`FitField.pathway_phase`.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np

from .constants import ev_to_au, fs_to_au
from .spectra import Spectrogram

# Relative eigenvalue floor below which the 3x3 normal matrix of a local
# fit window is treated as rank deficient.
_RANK_FLOOR = 1e-10


class ReconstructionError(RuntimeError):
    """Wave-packet reconstruction would divide by a vanishing reference."""


def wrap_phase(phi):
    """Map angles to the principal branch (-pi, pi]."""
    phi = np.asarray(phi, dtype=float)
    return phi - 2.0 * np.pi * np.ceil((phi - np.pi) / (2.0 * np.pi))


@dataclass(frozen=True)
class FitField:
    """Local-fit coefficients of the fringe model on an (energy, delay) grid.

    Parameters
    ----------
    energies_ev, delays_fs : ndarray
        Grid axes, matching the fitted spectrogram.
    a : ndarray, shape (n_delays, n_energies)
        Delay-local background term.
    b : ndarray
        Fringe contrast, nonnegative by convention; the sign freedom of the
        (b, phi) pair is absorbed into the phase branch.
    phi : ndarray
        Fringe phase of ``a + 2 b cos(2 omega tau + phi)``.  Produced on the
        principal branch; :func:`unwrap_phase` may move it off the branch.
    residual : ndarray
        Weighted RMS misfit of the local model at each grid point.
    valid : ndarray of bool
        False where the local system was rank deficient; such points carry
        zeros and are skipped by downstream consumers instead of being
        extrapolated.
    """

    energies_ev: np.ndarray
    delays_fs: np.ndarray
    a: np.ndarray
    b: np.ndarray
    phi: np.ndarray
    residual: np.ndarray
    valid: np.ndarray

    def __post_init__(self) -> None:
        energies = np.asarray(self.energies_ev, dtype=float)
        delays = np.asarray(self.delays_fs, dtype=float)
        shape = (delays.size, energies.size)
        fields = {}
        for name in ("a", "b", "phi", "residual"):
            arr = np.asarray(getattr(self, name), dtype=float)
            if arr.shape != shape:
                raise ValueError(f"{name} must have shape {shape}, got {arr.shape}")
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"{name} must be finite")
            fields[name] = arr
        if np.any(fields["b"] < 0.0):
            raise ValueError("b must be nonnegative")
        valid = np.asarray(self.valid, dtype=bool)
        if valid.shape != shape:
            raise ValueError(f"valid must have shape {shape}")
        object.__setattr__(self, "energies_ev", energies)
        object.__setattr__(self, "delays_fs", delays)
        for name, arr in fields.items():
            object.__setattr__(self, name, arr)
        object.__setattr__(self, "valid", valid)

    @property
    def shape(self) -> tuple[int, int]:
        """Grid shape as (n_delays, n_energies)."""
        return self.a.shape

    def pathway_phase(self, omega: float) -> np.ndarray:
        """Phase of the pathway product implied by the fit.

        Removes the trivial ``2 omega tau`` fringe advance from the fitted
        phase and flips the sign so the result equals
        ``arg(M_res M_con*)`` for a yield ``|M_res + M_con|**2``, wrapped to
        the principal branch.
        """
        tau_au = fs_to_au(self.delays_fs)
        return wrap_phase(-(self.phi + 2.0 * omega * tau_au[:, None]))


def local_cosine_fit(
    spec: Spectrogram,
    omega: float,
    tau_window_fs: float = 0.94,
) -> FitField:
    """Fit ``c0 + c_cos cos(2wt) + c_sin sin(2wt)`` around every delay.

    For each delay on the spectrogram grid the yield is fitted over all
    delays with Gaussian weights ``exp(-((tau - tau_i) / tau_window)**2)``,
    independently per energy bin.  The linear-in-coefficients basis makes
    the least-squares optimum identical to the nonlinear (a, b, phi)
    parametrization while remaining a single 3x3 solve.

    Parameters
    ----------
    spec : Spectrogram
        Delay-resolved yield; the delay sampling must resolve the ``2 omega``
        fringe (spacing below ``pi / (2 omega)``).
    omega : float
        Fundamental angular frequency in a.u.; fringes beat at ``2 omega``.
    tau_window_fs : float
        Gaussian weight width in fs.

    Returns
    -------
    FitField
        Coefficient fields on the spectrogram grid.  Windows whose normal
        matrix is rank deficient are flagged invalid, not extrapolated.
    """
    if omega <= 0.0:
        raise ValueError("omega must be positive")
    if tau_window_fs <= 0.0:
        raise ValueError("tau_window_fs must be positive")
    delays_fs = spec.delays_fs
    tau_au = fs_to_au(delays_fs)
    # Median spacing so a grid of well-sampled clusters separated by gaps
    # is accepted; windows reaching across a gap are handled by the rank
    # check below, not by rejecting the whole grid.
    if delays_fs.size > 1 and np.median(np.diff(tau_au)) >= np.pi / (2.0 * omega):
        raise ValueError("delay sampling coarser than pi/(2 omega) cannot resolve the fringe")

    x = 2.0 * omega * tau_au
    basis = np.column_stack([np.ones_like(x), np.cos(x), np.sin(x)])
    power = spec.values
    n_tau, n_e = power.shape

    a = np.zeros((n_tau, n_e))
    b = np.zeros((n_tau, n_e))
    phi = np.zeros((n_tau, n_e))
    residual = np.zeros((n_tau, n_e))
    valid = np.zeros((n_tau, n_e), dtype=bool)
    for j in range(n_tau):
        weights = np.exp(-(((delays_fs - delays_fs[j]) / tau_window_fs) ** 2))
        weighted = basis * weights[:, None]
        normal = basis.T @ weighted
        eigvals = np.linalg.eigvalsh(normal)
        if eigvals[0] <= _RANK_FLOOR * eigvals[-1]:
            continue
        coeffs = np.linalg.solve(normal, weighted.T @ power)
        misfit = power - basis @ coeffs
        a[j] = coeffs[0]
        b[j] = 0.5 * np.hypot(coeffs[1], coeffs[2])
        phi[j] = wrap_phase(np.arctan2(-coeffs[2], coeffs[1]))
        residual[j] = np.sqrt(weights @ misfit**2 / weights.sum())
        valid[j] = True
    return FitField(spec.energies_ev, delays_fs, a, b, phi, residual, valid)


def unwrap_phase(field: FitField, axis: str) -> FitField:
    """Remove 2*pi jumps from the fitted phase along one grid axis.

    Parameters
    ----------
    field : FitField
        Input field; only ``phi`` changes.
    axis : {"energy", "delay"}
        Direction along which consecutive valid points are made continuous.
        Invalid points are skipped, not interpolated.
    """
    if axis not in ("energy", "delay"):
        raise ValueError("axis must be 'energy' or 'delay'")
    phi = field.phi.copy()
    lines = phi if axis == "energy" else phi.T
    mask = field.valid if axis == "energy" else field.valid.T
    for line, line_mask in zip(lines, mask):
        idx = np.flatnonzero(line_mask)
        if idx.size > 1:
            line[idx] = np.unwrap(line[idx])
    return dataclasses.replace(field, phi=phi)


@dataclass(frozen=True)
class WavePacketMap:
    """Reconstructed time-domain resonant amplitude versus delay.

    Parameters
    ----------
    times_fs : ndarray
        Real-time axis in fs.
    delays_fs : ndarray
        Delay axis in fs, one row of ``values`` per delay.
    values : ndarray, complex, shape (n_delays, n_times)
        Reconstructed amplitude.
    peaks : tuple of (float, float)
        Per-delay (tau, t_peak) locations of the envelope maximum; delays
        whose profile stays below the tracking floor carry no entry.
    """

    times_fs: np.ndarray
    delays_fs: np.ndarray
    values: np.ndarray
    peaks: tuple = ()

    def __post_init__(self) -> None:
        times = np.asarray(self.times_fs, dtype=float)
        delays = np.asarray(self.delays_fs, dtype=float)
        values = np.asarray(self.values, dtype=complex)
        if times.ndim != 1 or delays.ndim != 1:
            raise ValueError("axes must be 1-d")
        if values.shape != (delays.size, times.size):
            raise ValueError("values must have shape (n_delays, n_times)")
        object.__setattr__(self, "times_fs", times)
        object.__setattr__(self, "delays_fs", delays)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "peaks", tuple(map(tuple, self.peaks)))


def peak_track(wpmap: WavePacketMap, floor: float | None = None) -> list[tuple[float, float]]:
    """Locate the per-delay maximum of the reconstructed envelope.

    The discrete argmax of ``|values|`` is refined by a three-point parabola
    through the neighboring samples.  Rows whose maximum does not exceed
    ``floor`` (default ``1e-12`` of the global maximum) yield no point, so a
    flat or empty profile is skipped rather than reported at an arbitrary
    grid position.
    """
    envelope = np.abs(wpmap.values)
    if floor is None:
        floor = 1e-12 * envelope.max() if envelope.size else 0.0
    times = wpmap.times_fs
    peaks = []
    for tau, row in zip(wpmap.delays_fs, envelope):
        i = int(np.argmax(row))
        if not row[i] > floor:
            continue
        t_peak = times[i]
        if 0 < i < row.size - 1:
            lower, center, upper = row[i - 1], row[i], row[i + 1]
            curvature = lower - 2.0 * center + upper
            if curvature < 0.0:
                step = 0.5 * (times[i + 1] - times[i - 1])
                shift = 0.5 * (lower - upper) / curvature
                t_peak = times[i] + np.clip(shift, -1.0, 1.0) * step
        peaks.append((float(tau), float(t_peak)))
    return peaks


def reconstruct_wavepacket(
    fit: FitField,
    m_con_model: np.ndarray,
    omega: float,
    e_center_ev: float = 0.34,
    alpha: float = 4.0,
    times_fs: np.ndarray | None = None,
    division_floor: float = 1e-6,
    support_level: float = 1e-3,
) -> WavePacketMap:
    """Invert a fitted fringe field into a time-domain resonant amplitude.

    The fitted contrast and phase encode the pathway product
    ``M_res M_con* = b exp(i arg)`` with ``arg`` given by
    :meth:`FitField.pathway_phase`; dividing by the supplied continuum
    reference and applying the spectral filter ``exp(-|E / E_c|**alpha)``
    isolates the resonant spectrum, whose discrete transform
    ``sum_E exp(-i E t) b exp(i arg) / M_con* * filter`` is evaluated on a
    uniform time grid.

    Parameters
    ----------
    fit : FitField
        Fitted fringe field; invalid points contribute nothing.
    m_con_model : ndarray, complex
        Continuum reference amplitude, either one spectrum of shape
        (n_energies,) shared by all delays or one per delay with shape
        (n_delays, n_energies).  Evaluated per delay by the caller; a
        delay-independent reference is an approximation the caller opts
        into by passing a single spectrum.
    omega : float
        Fundamental angular frequency in a.u. used when the fit was made.
    e_center_ev, alpha : float
        Low-pass filter scale (eV) and exponent.
    times_fs : ndarray, optional
        Output time grid; defaults to [-60, 60] fs at 0.1 fs spacing.
    division_floor : float
        Fraction of ``max |m_con_model|`` below which a reference value
        inside the filter support triggers :class:`ReconstructionError`.
    support_level : float
        Filter weight above which a point counts as inside the support for
        the division guard.
    """
    if e_center_ev <= 0.0 or alpha <= 0.0:
        raise ValueError("filter parameters must be positive")
    if times_fs is None:
        times_fs = np.arange(-60.0, 60.0 + 1e-9, 0.1)
    times_fs = np.asarray(times_fs, dtype=float)

    n_tau, n_e = fit.shape
    m_con = np.asarray(m_con_model, dtype=complex)
    if m_con.ndim == 1:
        m_con = np.broadcast_to(m_con, (n_tau, n_e))
    if m_con.shape != (n_tau, n_e):
        raise ValueError(f"m_con_model must have shape {(n_tau, n_e)} or ({n_e},)")

    spectral_filter = np.exp(-np.abs(fit.energies_ev / e_center_ev) ** alpha)
    support = spectral_filter > support_level
    reference_scale = np.abs(m_con).max()
    starved = np.abs(m_con[:, support]) < division_floor * reference_scale
    if reference_scale == 0.0 or np.any(starved):
        raise ReconstructionError(
            "continuum reference vanishes inside the filter support; "
            "cannot divide out the reference amplitude"
        )

    product = fit.b * np.exp(1j * fit.pathway_phase(omega))
    weight = np.where(fit.valid, spectral_filter[None, :], 0.0)
    resonant_spectrum = product / np.conj(m_con) * weight

    energies_au = ev_to_au(fit.energies_ev)
    kernel = np.exp(-1j * np.outer(energies_au, fs_to_au(times_fs)))
    values = resonant_spectrum @ kernel
    wpmap = WavePacketMap(times_fs, fit.delays_fs, values)
    return dataclasses.replace(wpmap, peaks=tuple(peak_track(wpmap)))
