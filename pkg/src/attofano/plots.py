"""Figure rendering for run reports: each delimited artifact gets a PNG twin.

All functions draw on a non-interactive backend and write straight to file;
nothing here inspects or transforms the data beyond display scaling.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .analysis import FitField, WavePacketMap
from .spectra import Spectrogram


def _finish(fig, path) -> Path:
    path = Path(path)
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)
    return path


def render_spectrogram(spec: Spectrogram, path, overlays=()) -> Path:
    """Delay-energy yield map with optional (tau_fs, energy_ev) curve overlays."""
    fig, ax = plt.subplots(figsize=(7.0, 4.2))
    mesh = ax.pcolormesh(
        spec.delays_fs, spec.energies_ev, spec.values.T, shading="nearest", cmap="magma"
    )
    fig.colorbar(mesh, ax=ax, label="yield (arb; per eV)")
    for curve in overlays:
        curve = np.asarray(curve, dtype=float)
        if curve.size:
            ax.plot(curve[:, 0], curve[:, 1], color="cyan", lw=1.2)
    ax.set_xlabel("XUV-IR delay (fs)")
    ax.set_ylabel("photoelectron energy (eV)")
    ax.set_title(spec.label or "spectrogram")
    return _finish(fig, path)


def render_lineshape(traces_by_phase, path) -> Path:
    """Interference profiles |M_total|^2 for each beat phase, overlaid."""
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    for phase, traces in traces_by_phase:
        ax.plot(traces.epsilon, traces.power, label=f"phase = {phase / np.pi:.2f} pi")
    ax.set_xlabel("reduced energy (E - E_res) / (Gamma / 2)")
    ax.set_ylabel("|M_total|^2")
    ax.set_title("two-channel interference lineshape")
    ax.legend(frameon=False)
    return _finish(fig, path)


def render_fit_field(fit: FitField, path) -> Path:
    """Background, contrast, and phase maps of a fitted fringe field."""
    fig, axes = plt.subplots(1, 3, figsize=(13.0, 3.8), sharey=True)
    panels = (
        ("background a", fit.a, "viridis", None),
        ("contrast b", fit.b, "viridis", None),
        ("phase phi (rad)", np.where(fit.valid, fit.phi, np.nan), "twilight", (-np.pi, np.pi)),
    )
    for ax, (title, field, cmap, limits) in zip(axes, panels):
        kwargs = {} if limits is None else {"vmin": limits[0], "vmax": limits[1]}
        mesh = ax.pcolormesh(
            fit.delays_fs, fit.energies_ev, field.T, shading="nearest", cmap=cmap, **kwargs
        )
        fig.colorbar(mesh, ax=ax)
        ax.set_title(title)
        ax.set_xlabel("delay (fs)")
    axes[0].set_ylabel("photoelectron energy (eV)")
    return _finish(fig, path)


def render_wavepacket(wpmap: WavePacketMap, path) -> Path:
    """Reconstructed amplitude magnitude versus (delay, real time) with peaks."""
    fig, ax = plt.subplots(figsize=(7.0, 4.2))
    mesh = ax.pcolormesh(
        wpmap.delays_fs,
        wpmap.times_fs,
        np.abs(wpmap.values).T,
        shading="nearest",
        cmap="magma",
    )
    fig.colorbar(mesh, ax=ax, label="|amplitude| (arb)")
    if wpmap.peaks:
        peaks = np.asarray(wpmap.peaks, dtype=float)
        ax.plot(peaks[:, 0], peaks[:, 1], "wo-", ms=3, lw=0.8, label="envelope peak")
        ax.legend(frameon=False, loc="upper right")
    ax.set_xlabel("XUV-IR delay (fs)")
    ax.set_ylabel("real time (fs)")
    ax.set_title("reconstructed wave packet")
    return _finish(fig, path)


def render_levels(levels, path) -> Path:
    """Horizontal level diagram of the named bound states (energies in a.u.)."""
    fig, ax = plt.subplots(figsize=(4.2, 4.6))
    for i, (name, state) in enumerate(levels.items()):
        ax.hlines(state.energy, i - 0.3, i + 0.3, lw=2.5)
        ax.annotate(
            f"{state.energy:.5f}",
            (i, state.energy),
            textcoords="offset points",
            xytext=(0, 6),
            ha="center",
            fontsize=9,
        )
    ax.set_xticks(range(len(levels)), list(levels))
    ax.set_ylabel("energy (hartree)")
    ax.set_title("bound levels")
    ax.set_xlim(-0.6, len(levels) - 0.4)
    return _finish(fig, path)
