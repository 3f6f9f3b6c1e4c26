"""Run configuration: one flat JSON document drives every scenario kind.

A configuration file is a single JSON object whose keys mirror the physical
parameter names used across the package (intensities in W/cm2, durations in
fs, box sizes in bohr, energies in eV unless suffixed ``_au``).  Unknown keys
are rejected; unspecified keys resolve to the documented defaults below, and
the fully-resolved values are what a run snapshots next to its outputs.
"""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import atom, tdse, twolevel
from .constants import intensity_to_au
from .pulses import OMEGA_IR_DEFAULT, PulseTrain, rabbit_train

KINDS = ("eigen", "tdse-scan", "two-level-scan", "lineshape", "fit", "reconstruct")

# Intensity at which the dressing coefficients delta_1s/delta_3p/gamma_3p
# are quoted; the two-level model scales them linearly from here.
REFERENCE_INTENSITY_WCM2 = 3.0e12


class ConfigError(ValueError):
    """A configuration document is malformed or out of range."""


@dataclass(frozen=True)
class RunConfig:
    """Fully-resolved parameters of one run; every field has a default.

    The same flat namespace serves all scenario kinds; each kind reads the
    fields it needs and ignores the rest.  ``kind`` selects the scenario.
    """

    kind: str
    # Pulse train (W/cm2, fs; carrier in a.u.)
    ir_intensity_Wcm2: float = 3.0e12
    h15_intensity_Wcm2: float = 1.0e12
    h17_intensity_Wcm2: float = 1.0e12
    t_ir_fs: float = 31.0
    t_xuv_fs: float = 12.0
    omega_ir: float = OMEGA_IR_DEFAULT
    include: tuple[str, ...] = ("IR", "H15", "H17")
    # Radial box and propagation subspace
    r_max: float = 400.0
    n_elements: int = 165
    order: int = 8
    l_max: int = 3
    e_max: float = 2.0
    dt: float = 0.4
    absorber_mode: str | None = None
    mask_start: float | None = None
    shape_exponent: float = 0.125
    split_interval: tuple[float, float] | None = None
    # Model potential
    z_asymptotic: float = 1.0
    a1: float = 1.231
    a2: float = 0.662
    a3: float = -2.966
    a4: float = 2.883
    a5: float = -0.231
    a6: float = 0.121
    # Reported photoelectron energy axis (eV)
    energy_min_ev: float = 0.0
    energy_max_ev: float = 4.0
    energy_step_ev: float = 0.002
    # Delay axis (fs); default step is the 167 as experimental piezo step
    delay_min_fs: float = -3.0
    delay_max_fs: float = 3.0
    delay_step_fs: float = 0.167
    # Two-level resonance model (dressing values quoted at 3e12 W/cm2)
    delta_1s_au: float = -6.6e-3
    delta_3p_au: float = 2.2e-3
    gamma_3p_au: float = 4.8e-3
    mu_1s3p: float = 0.14474
    con_res_ratio: float = 1.0
    locus_shift_fs: float = 0.25
    dt_twolevel: float = 0.2
    # Analytic lineshape
    q: float = 1.0
    phases: tuple[float, ...] = (0.0, 0.5 * math.pi, math.pi, 1.5 * math.pi)
    eps_min: float = -8.0
    eps_max: float = 8.0
    eps_points: int = 1601
    # Fit and reconstruction
    input_path: str | None = None
    tau_window_fs: float = 0.94
    e_center_ev: float = 0.34
    alpha: float = 4.0
    # Run plumbing
    out_dir: str = "attofano-out"
    jobs: int = 1
    seed: int = 0

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ConfigError(f"kind must be one of {', '.join(KINDS)}, got {self.kind!r}")
        positive = (
            "t_ir_fs", "t_xuv_fs", "omega_ir", "r_max", "e_max", "dt",
            "shape_exponent", "z_asymptotic", "energy_step_ev", "delay_step_fs",
            "mu_1s3p", "con_res_ratio", "dt_twolevel", "tau_window_fs",
            "e_center_ev", "alpha",
        )
        for name in positive:
            value = getattr(self, name)
            if not (np.isfinite(value) and value > 0):
                raise ConfigError(f"{name} must be a positive finite number, got {value}")
        nonnegative = (
            "ir_intensity_Wcm2", "h15_intensity_Wcm2", "h17_intensity_Wcm2",
            "energy_min_ev", "gamma_3p_au", "q",
        )
        for name in nonnegative:
            value = getattr(self, name)
            if not (np.isfinite(value) and value >= 0):
                raise ConfigError(f"{name} must be >= 0 and finite, got {value}")
        for name, lower in (("n_elements", 2), ("order", 3), ("l_max", 1),
                            ("eps_points", 2), ("jobs", 1), ("seed", 0)):
            value = getattr(self, name)
            if not isinstance(value, int) or value < lower:
                raise ConfigError(f"{name} must be an integer >= {lower}, got {value}")
        for name in ("delta_1s_au", "delta_3p_au", "locus_shift_fs",
                     "delay_min_fs", "delay_max_fs", "eps_min", "eps_max"):
            if not np.isfinite(getattr(self, name)):
                raise ConfigError(f"{name} must be finite")
        if self.energy_max_ev <= self.energy_min_ev:
            raise ConfigError(
                "energy_max_ev must exceed energy_min_ev, got "
                f"[{self.energy_min_ev}, {self.energy_max_ev}]"
            )
        if self.delay_max_fs <= self.delay_min_fs:
            raise ConfigError(
                "delay_max_fs must exceed delay_min_fs, got "
                f"[{self.delay_min_fs}, {self.delay_max_fs}]"
            )
        if self.eps_max <= self.eps_min:
            raise ConfigError(
                f"eps_max must exceed eps_min, got [{self.eps_min}, {self.eps_max}]"
            )
        if not self.include or not set(self.include) <= {"IR", "H15", "H17"}:
            raise ConfigError(
                f"include must be a nonempty subset of IR, H15, H17, got {self.include}"
            )
        if not self.phases or not all(np.isfinite(p) for p in self.phases):
            raise ConfigError("phases must be a nonempty list of finite numbers")
        if self.absorber_mode not in (None, "mask", "split"):
            raise ConfigError(
                f"absorber_mode must be null, 'mask', or 'split', got {self.absorber_mode!r}"
            )
        if self.absorber_mode == "mask":
            if self.mask_start is None or not 0 < self.mask_start < self.r_max:
                raise ConfigError(
                    f"mask_start must lie in (0, r_max={self.r_max}), got {self.mask_start}"
                )
        if self.absorber_mode == "split":
            iv = self.split_interval
            if iv is None or len(iv) != 2 or not 0 < iv[0] < iv[1] <= self.r_max:
                raise ConfigError(
                    "split_interval must be [lo, hi] with 0 < lo < hi <= "
                    f"r_max={self.r_max}, got {iv}"
                )
        if self.kind in ("fit", "reconstruct") and not self.input_path:
            raise ConfigError(f"input_path is required for kind {self.kind!r}")

    def resolved(self) -> dict:
        """JSON-serializable copy of every resolved field."""
        data = dataclasses.asdict(self)
        for key, value in data.items():
            if isinstance(value, tuple):
                data[key] = list(value)
        return data

    def delays_fs(self) -> np.ndarray:
        """Delay grid min + k*step covering the configured window."""
        n = int(math.floor((self.delay_max_fs - self.delay_min_fs)
                           / self.delay_step_fs + 1e-9)) + 1
        return self.delay_min_fs + self.delay_step_fs * np.arange(n)

    def energy_axis_ev(self) -> np.ndarray:
        n = int(math.floor((self.energy_max_ev - self.energy_min_ev)
                           / self.energy_step_ev + 1e-9)) + 1
        return self.energy_min_ev + self.energy_step_ev * np.arange(n)

    def potential(self) -> atom.PotentialParams:
        return atom.PotentialParams(
            a1=self.a1, a2=self.a2, a3=self.a3, a4=self.a4, a5=self.a5,
            a6=self.a6, z_asymptotic=self.z_asymptotic,
        )

    def absorber(self) -> tdse.AbsorberConfig | None:
        if self.absorber_mode is None:
            return None
        if self.absorber_mode == "mask":
            return tdse.AbsorberConfig(
                mode="mask",
                mask_start=self.mask_start,
                shape_exponent=self.shape_exponent,
            )
        return tdse.AbsorberConfig(mode="split", split_interval=self.split_interval)

    def scan_scenario(self) -> tdse.ScanScenario:
        return tdse.ScanScenario(
            ir_intensity_Wcm2=self.ir_intensity_Wcm2,
            h15_intensity_Wcm2=self.h15_intensity_Wcm2,
            h17_intensity_Wcm2=self.h17_intensity_Wcm2,
            t_ir_fs=self.t_ir_fs,
            t_xuv_fs=self.t_xuv_fs,
            omega_ir=self.omega_ir,
            include=self.include,
            r_max=self.r_max,
            n_elements=self.n_elements,
            order=self.order,
            l_max=self.l_max,
            e_max=self.e_max,
            dt=self.dt,
            absorber=self.absorber(),
            potential=self.potential(),
            energy_min_ev=self.energy_min_ev,
            energy_max_ev=self.energy_max_ev,
            energy_step_ev=self.energy_step_ev,
        )

    def level_params(self) -> twolevel.LevelParams:
        reference = intensity_to_au(REFERENCE_INTENSITY_WCM2)
        return twolevel.LevelParams(
            delta_1s=self.delta_1s_au / reference,
            delta_3p=self.delta_3p_au / reference,
            gamma_3p=self.gamma_3p_au / reference,
            mu_1s3p=self.mu_1s3p,
            mu_1s_ep=self.con_res_ratio,
        )

    def base_train(self) -> PulseTrain:
        """Zero-delay pulse train; scans move the IR per delay point."""
        return rabbit_train(
            0.0,
            ir_intensity_Wcm2=self.ir_intensity_Wcm2,
            h15_intensity_Wcm2=self.h15_intensity_Wcm2,
            h17_intensity_Wcm2=self.h17_intensity_Wcm2,
            t_ir_fs=self.t_ir_fs,
            t_xuv_fs=self.t_xuv_fs,
            omega_ir=self.omega_ir,
            include=self.include,
        )


_FIELD_TYPES = {f.name: f for f in dataclasses.fields(RunConfig)}
_TUPLE_FIELDS = {"include", "split_interval", "phases"}
_INT_FIELDS = {"n_elements", "order", "l_max", "eps_points", "jobs", "seed"}


def from_dict(data: dict, kind: str | None = None, overrides: dict | None = None) -> RunConfig:
    """Build a config from a flat mapping, rejecting unknown keys.

    ``kind`` supplied by the caller (the subcommand) wins over an absent
    document field and must agree with a present one.  ``overrides`` apply
    last, for command-line flags.
    """
    if not isinstance(data, dict):
        raise ConfigError("configuration document must be a JSON object")
    unknown = sorted(set(data) - set(_FIELD_TYPES))
    if unknown:
        raise ConfigError(f"unknown configuration fields: {', '.join(unknown)}")
    merged = dict(data)
    if kind is not None:
        if "kind" in merged and merged["kind"] != kind:
            raise ConfigError(
                f"config file declares kind {merged['kind']!r} but the "
                f"{kind!r} subcommand was invoked"
            )
        merged["kind"] = kind
    if overrides:
        merged.update({k: v for k, v in overrides.items() if v is not None})
    if "kind" not in merged:
        raise ConfigError(f"kind is required; one of {', '.join(KINDS)}")
    for name in _TUPLE_FIELDS & set(merged):
        if merged[name] is not None:
            if not isinstance(merged[name], (list, tuple)):
                raise ConfigError(f"{name} must be a list")
            merged[name] = tuple(merged[name])
    for name in set(merged) - _TUPLE_FIELDS - {"kind", "absorber_mode", "input_path", "out_dir"}:
        value = merged[name]
        if value is None and name == "mask_start":
            continue
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{name} must be a number, got {value!r}")
        if name not in _INT_FIELDS:
            merged[name] = float(value)
    # Documented resolution: a mask absorber without an explicit start
    # begins at 90% of the box radius.
    if merged.get("absorber_mode") == "mask" and merged.get("mask_start") is None:
        merged["mask_start"] = 0.9 * float(merged.get("r_max", RunConfig.r_max))
    try:
        return RunConfig(**merged)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


def load(path, kind: str | None = None, overrides: dict | None = None) -> RunConfig:
    """Read and validate a JSON configuration file."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path} is not valid JSON: {exc}") from exc
    return from_dict(data, kind=kind, overrides=overrides)
