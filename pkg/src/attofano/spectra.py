"""Delay-resolved spectrogram container and delimited-text persistence.

A spectrogram is a photoelectron yield sampled on an (energy, delay) grid.
It is stored delay-major: one matrix row per delay.  On disk it becomes a
plain CSV with two axis header rows followed by the value rows, plus a JSON
sidecar carrying the label, metadata, and code version.  Floats are written
with 17 significant digits so writer and reader round-trip bit exactly.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

FORMAT_TAG = "attofano-spectrogram-1"


class SpectrogramFormatError(ValueError):
    """A delimited spectrogram file does not match the expected layout."""


def _as_axis(values, name: str, allow_empty: bool = False) -> np.ndarray:
    axis = np.asarray(values, dtype=float)
    if axis.ndim != 1 or (axis.size < 1 and not allow_empty):
        raise ValueError(f"{name} must be a nonempty 1-d array")
    if axis.size > 1 and not np.all(np.diff(axis) > 0.0):
        raise ValueError(f"{name} must be strictly increasing")
    if not np.all(np.isfinite(axis)):
        raise ValueError(f"{name} must be finite")
    return axis


@dataclass(frozen=True)
class Spectrogram:
    """Photoelectron yield P(E, tau) on a rectangular energy-delay grid.

    Parameters
    ----------
    energies_ev : ndarray
        Photoelectron energy axis in eV, strictly increasing.
    delays_fs : ndarray
        XUV-IR delay axis in fs, strictly increasing.  Positive delay means
        the IR pulse precedes the harmonics.  May be empty (zero rows) when
        a scan produced no usable delays.
    values : ndarray, shape (n_delays, n_energies)
        Nonnegative yield, one row per delay.
    label : str
        Short human-readable tag for reports.
    meta : dict
        Scenario parameters recorded alongside the data (JSON-serializable).
    """

    energies_ev: np.ndarray
    delays_fs: np.ndarray
    values: np.ndarray
    label: str = ""
    meta: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        energies = _as_axis(self.energies_ev, "energies_ev")
        delays = _as_axis(self.delays_fs, "delays_fs", allow_empty=True)
        values = np.asarray(self.values, dtype=float)
        if values.shape != (delays.size, energies.size):
            raise ValueError(
                "values must have shape (n_delays, n_energies) = "
                f"{(delays.size, energies.size)}, got {values.shape}"
            )
        if not np.all(np.isfinite(values)):
            raise ValueError("values must be finite")
        if np.any(values < 0.0):
            raise ValueError("values must be nonnegative")
        object.__setattr__(self, "energies_ev", energies)
        object.__setattr__(self, "delays_fs", delays)
        object.__setattr__(self, "values", values)

    @property
    def shape(self) -> tuple[int, int]:
        """Grid shape as (n_delays, n_energies)."""
        return self.values.shape


def _format_row(tag: str, row: np.ndarray) -> str:
    return ",".join([tag] + [format(v, ".17g") for v in row])


def write_axes_csv(
    path,
    col_tag: str,
    col_axis: np.ndarray,
    row_tag: str,
    row_axis: np.ndarray,
    values: np.ndarray,
) -> Path:
    """Write a matrix with two axis header rows as plain CSV.

    Layout: one header row per axis (tag in the first field), then one row
    per entry of ``row_axis`` whose first field repeats the axis value.
    """
    path = Path(path)
    col_axis = np.asarray(col_axis, dtype=float)
    row_axis = np.asarray(row_axis, dtype=float)
    values = np.asarray(values, dtype=float)
    if values.shape != (row_axis.size, col_axis.size):
        raise ValueError("values shape does not match the axis lengths")
    lines = [_format_row(col_tag, col_axis), _format_row(row_tag, row_axis)]
    for row_value, row in zip(row_axis, values):
        lines.append(_format_row(format(row_value, ".17g"), row))
    path.write_text("\n".join(lines) + "\n")
    return path


def read_axes_csv(path):
    """Read a matrix written by :func:`write_axes_csv`.

    Returns
    -------
    (col_tag, col_axis, row_tag, row_axis, values)
    """
    path = Path(path)
    lines = [
        (number, text)
        for number, text in enumerate(path.read_text().splitlines(), start=1)
        if text.strip()
    ]
    if len(lines) < 2:
        raise SpectrogramFormatError(f"{path} has no axis header rows")
    col_fields = lines[0][1].split(",")
    row_fields = lines[1][1].split(",")
    try:
        col_tag, col_axis = col_fields[0], np.array([float(v) for v in col_fields[1:]])
    except ValueError as exc:
        raise SpectrogramFormatError(f"{path} line {lines[0][0]}: {exc}") from exc
    try:
        row_tag, row_axis = row_fields[0], np.array([float(v) for v in row_fields[1:]])
    except ValueError as exc:
        raise SpectrogramFormatError(f"{path} line {lines[1][0]}: {exc}") from exc
    if len(lines) - 2 != row_axis.size:
        raise SpectrogramFormatError(
            f"{path}: expected {row_axis.size} value rows, found {len(lines) - 2}"
        )
    values = np.empty((row_axis.size, col_axis.size))
    for i, (number, line) in enumerate(lines[2:]):
        fields = line.split(",")
        if len(fields) != col_axis.size + 1:
            raise SpectrogramFormatError(
                f"{path} line {number}: row has {len(fields) - 1} values, "
                f"expected {col_axis.size}"
            )
        try:
            label_value = float(fields[0])
            values[i] = [float(v) for v in fields[1:]]
        except ValueError as exc:
            raise SpectrogramFormatError(f"{path} line {number}: {exc}") from exc
        if label_value != row_axis[i]:
            raise SpectrogramFormatError(
                f"{path} line {number}: row label disagrees with the delay axis"
            )
    return col_tag, col_axis, row_tag, row_axis, values


def write_spectrogram(spec: Spectrogram, path) -> tuple[Path, Path]:
    """Persist a spectrogram as CSV plus a JSON metadata sidecar.

    Returns the (csv_path, sidecar_path) pair.  The sidecar keeps the label
    and the scenario metadata; the CSV alone suffices to rebuild the grid.
    """
    from . import __version__

    path = Path(path)
    csv_path = write_axes_csv(
        path, "energy_ev", spec.energies_ev, "delay_fs", spec.delays_fs, spec.values
    )
    sidecar = {
        "format": FORMAT_TAG,
        "label": spec.label,
        "meta": spec.meta,
        "shape": list(spec.shape),
        "units": {"energy": "eV", "delay": "fs", "value": "arb"},
        "version": __version__,
    }
    sidecar_path = path.with_suffix(path.suffix + ".json")
    sidecar_path.write_text(json.dumps(sidecar, indent=2, sort_keys=True) + "\n")
    return csv_path, sidecar_path


def read_spectrogram(path) -> Spectrogram:
    """Read a spectrogram written by :func:`write_spectrogram`.

    A missing sidecar is tolerated (label and metadata default to empty) so
    externally produced CSVs in the same layout can be ingested directly.
    """
    path = Path(path)
    col_tag, energies, row_tag, delays, values = read_axes_csv(path)
    if col_tag != "energy_ev" or row_tag != "delay_fs":
        raise SpectrogramFormatError(
            f"{path}: expected axis tags energy_ev/delay_fs, got {col_tag}/{row_tag}"
        )
    label, meta = "", {}
    sidecar_path = path.with_suffix(path.suffix + ".json")
    if sidecar_path.exists():
        sidecar = json.loads(sidecar_path.read_text())
        label = sidecar.get("label", "")
        meta = sidecar.get("meta", {})
    return Spectrogram(energies, delays, values, label=label, meta=meta)
