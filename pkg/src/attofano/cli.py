"""Command-line entry point: scenario orchestration, artifacts, and metadata.

Each subcommand resolves one flat JSON configuration, runs the matching
pipeline, and leaves a self-describing output directory: the delimited data
files, a PNG rendering of each, the frozen resolved configuration, and a run
log with the code version and per-stage timings.  Exit codes: 0 success,
2 configuration or input-schema error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
import warnings
from contextlib import contextmanager
from pathlib import Path

import numpy as np

from . import __version__, analysis, atom, lineshape, plots, spectra, tdse, twolevel
from . import config as config_mod
from .constants import CONST, ev_to_au


@contextmanager
def _stage(stages: list, name: str):
    start = time.perf_counter()
    yield
    stages.append({"name": name, "seconds": round(time.perf_counter() - start, 3)})


def _write_table(path: Path, header: str, columns: np.ndarray) -> None:
    lines = [header]
    for row in np.atleast_2d(columns):
        lines.append(",".join(format(v, ".17g") for v in row))
    path.write_text("\n".join(lines) + "\n")


def ingest_spectrogram(path) -> tuple[spectra.Spectrogram, int]:
    """Read a spectrogram CSV for analysis, clipping stray negative entries.

    Returns the validated spectrogram and the count of clipped entries;
    a nonzero count also emits a warning.  Schema violations raise
    :class:`spectra.SpectrogramFormatError` with file line numbers.
    """
    path = Path(path)
    col_tag, energies, row_tag, delays, values = spectra.read_axes_csv(path)
    if col_tag != "energy_ev" or row_tag != "delay_fs":
        raise spectra.SpectrogramFormatError(
            f"{path}: expected axis tags energy_ev/delay_fs, got {col_tag}/{row_tag}"
        )
    clipped = int(np.count_nonzero(values < 0.0))
    if clipped:
        values = np.where(values < 0.0, 0.0, values)
        warnings.warn(f"clipped {clipped} negative entries from {path.name}")
    label, meta = "", {}
    sidecar = path.with_suffix(path.suffix + ".json")
    if sidecar.exists():
        doc = json.loads(sidecar.read_text())
        label = doc.get("label", "")
        meta = doc.get("meta", {})
    try:
        spec = spectra.Spectrogram(energies, delays, values, label=label, meta=meta)
    except ValueError as exc:
        raise spectra.SpectrogramFormatError(f"{path}: {exc}") from exc
    return spec, clipped


def _run_eigen(cfg: config_mod.RunConfig, out: Path, stages: list, artifacts: list) -> None:
    with _stage(stages, "eigensolve"):
        grid = atom.default_grid(cfg.r_max, cfg.n_elements, cfg.order)
        levels = atom.helium_levels(grid, cfg.potential())
    with _stage(stages, "report"):
        lines = ["state,energy_au,energy_ev"]
        for name, state in levels.items():
            energy_ev = state.energy * CONST.hartree_to_ev
            lines.append(f"{name},{state.energy:.17g},{energy_ev:.17g}")
        (out / "levels.csv").write_text("\n".join(lines) + "\n")
        artifacts.append("levels.csv")
        plots.render_levels(levels, out / "levels.png")
        artifacts.append("levels.png")


def _run_tdse_scan(cfg: config_mod.RunConfig, out: Path, stages: list, artifacts: list) -> None:
    scenario = cfg.scan_scenario()
    delays = cfg.delays_fs()
    with _stage(stages, "delay-scan"):
        spec = tdse.delay_scan(scenario, delays, jobs=cfg.jobs)
    if spec.values.shape[0] == 0:
        failures = "; ".join(f["error"] for f in spec.meta["failures"][:3])
        raise tdse.PropagationError(f"every delay point failed: {failures}")
    with _stage(stages, "report"):
        spectra.write_spectrogram(spec, out / "spectrogram.csv")
        artifacts.extend(["spectrogram.csv", "spectrogram.csv.json"])
        plots.render_spectrogram(spec, out / "spectrogram.png")
        artifacts.append("spectrogram.png")


def _run_two_level_scan(
    cfg: config_mod.RunConfig, out: Path, stages: list, artifacts: list
) -> None:
    params = cfg.level_params()
    train = cfg.base_train()
    axis_ev = cfg.energy_axis_ev()
    energies_au = np.array([ev_to_au(e) for e in axis_ev])
    delays = cfg.delays_fs()
    rows = []
    amplitude_rows = []
    with _stage(stages, "pathway-amplitudes"):
        for i, tau in enumerate(delays):
            paths = twolevel.pathway_amplitudes(
                params, train, float(tau), energies_au,
                dt=cfg.dt_twolevel, validate=(i == 0),
            )
            rows.append(np.abs(paths.m_total) ** 2)
            block = np.column_stack([
                np.full(axis_ev.size, tau),
                axis_ev,
                paths.m_res.real, paths.m_res.imag,
                paths.m_con.real, paths.m_con.imag,
                paths.m_total.real, paths.m_total.imag,
            ])
            amplitude_rows.append(block)
    spec = spectra.Spectrogram(
        energies_ev=axis_ev,
        delays_fs=delays,
        values=np.vstack(rows),
        label="two-level delay scan",
        meta={"kind": "two-level-scan", "parameters": cfg.resolved()},
    )
    with _stage(stages, "minima-locus"):
        curves = twolevel.minima_locus(
            params, train, energies_au, delays,
            shift_fs=cfg.locus_shift_fs, dt=cfg.dt_twolevel,
        )
    with _stage(stages, "report"):
        spectra.write_spectrogram(spec, out / "spectrogram.csv")
        artifacts.extend(["spectrogram.csv", "spectrogram.csv.json"])
        _write_table(
            out / "amplitudes.csv",
            "delay_fs,energy_ev,re_res,im_res,re_con,im_con,re_total,im_total",
            np.vstack(amplitude_rows),
        )
        artifacts.append("amplitudes.csv")
        overlay = []
        minima_lines = ["curve,tau_fs,energy_ev"]
        for k, curve in enumerate(curves):
            scaled = np.column_stack([curve[:, 0], curve[:, 1] * CONST.hartree_to_ev])
            overlay.append(scaled)
            for tau, energy in scaled:
                minima_lines.append(f"{k},{tau:.17g},{energy:.17g}")
        (out / "minima.csv").write_text("\n".join(minima_lines) + "\n")
        artifacts.append("minima.csv")
        plots.render_spectrogram(spec, out / "spectrogram.png", overlays=overlay)
        artifacts.append("spectrogram.png")


def _run_lineshape(cfg: config_mod.RunConfig, out: Path, stages: list, artifacts: list) -> None:
    epsilon = np.linspace(cfg.eps_min, cfg.eps_max, cfg.eps_points)
    traced = []
    with _stage(stages, "lineshape"):
        for i, phase in enumerate(cfg.phases):
            traces = lineshape.lineshape(
                lineshape.FanoConfig(q=cfg.q, phase=float(phase), epsilon=epsilon)
            )
            traced.append((float(phase), traces))
            name = f"lineshape_{i:02d}_phase_{phase / math.pi:.3f}pi.csv"
            _write_table(
                out / name,
                "epsilon,re_res,im_res,re_con,im_con,re_total,im_total,power",
                np.column_stack([
                    epsilon,
                    traces.m_res.real, traces.m_res.imag,
                    traces.m_con.real, traces.m_con.imag,
                    traces.m_total.real, traces.m_total.imag,
                    traces.power,
                ]),
            )
            artifacts.append(name)
    with _stage(stages, "report"):
        plots.render_lineshape(traced, out / "lineshape.png")
        artifacts.append("lineshape.png")


def _fit_from_input(cfg: config_mod.RunConfig, stages: list) -> analysis.FitField:
    with _stage(stages, "ingest"):
        spec, _ = ingest_spectrogram(cfg.input_path)
    with _stage(stages, "fringe-fit"):
        return analysis.local_cosine_fit(spec, cfg.omega_ir, cfg.tau_window_fs)


def _write_fit(fit: analysis.FitField, out: Path, artifacts: list) -> None:
    fields = (
        ("fit_a.csv", fit.a),
        ("fit_b.csv", fit.b),
        ("fit_phi.csv", fit.phi),
        ("fit_valid.csv", fit.valid.astype(float)),
    )
    for name, field in fields:
        spectra.write_axes_csv(
            out / name, "energy_ev", fit.energies_ev, "delay_fs", fit.delays_fs, field
        )
        artifacts.append(name)


def _run_fit(cfg: config_mod.RunConfig, out: Path, stages: list, artifacts: list) -> None:
    fit = _fit_from_input(cfg, stages)
    with _stage(stages, "report"):
        _write_fit(fit, out, artifacts)
        plots.render_fit_field(fit, out / "fit.png")
        artifacts.append("fit.png")


def _run_reconstruct(
    cfg: config_mod.RunConfig, out: Path, stages: list, artifacts: list
) -> None:
    fit = _fit_from_input(cfg, stages)
    params = cfg.level_params()
    train = cfg.base_train()
    energies_au = np.array([ev_to_au(e) for e in fit.energies_ev])
    with _stage(stages, "continuum-reference"):
        m_con = np.empty(fit.shape, dtype=complex)
        for i, tau in enumerate(fit.delays_fs):
            paths = twolevel.pathway_amplitudes(
                params, train, float(tau), energies_au,
                dt=cfg.dt_twolevel, validate=(i == 0),
            )
            m_con[i] = paths.m_con
    with _stage(stages, "reconstruct"):
        wpmap = analysis.reconstruct_wavepacket(
            fit, m_con, cfg.omega_ir,
            e_center_ev=cfg.e_center_ev, alpha=cfg.alpha,
        )
    with _stage(stages, "report"):
        spectra.write_axes_csv(
            out / "wavepacket_amplitude.csv",
            "time_fs", wpmap.times_fs, "delay_fs", wpmap.delays_fs,
            np.abs(wpmap.values),
        )
        spectra.write_axes_csv(
            out / "wavepacket_phase.csv",
            "time_fs", wpmap.times_fs, "delay_fs", wpmap.delays_fs,
            np.angle(wpmap.values),
        )
        artifacts.extend(["wavepacket_amplitude.csv", "wavepacket_phase.csv"])
        peak_lines = ["delay_fs,peak_time_fs"]
        for tau, t_peak in wpmap.peaks:
            peak_lines.append(f"{tau:.17g},{t_peak:.17g}")
        (out / "wavepacket_peaks.csv").write_text("\n".join(peak_lines) + "\n")
        artifacts.append("wavepacket_peaks.csv")
        plots.render_wavepacket(wpmap, out / "wavepacket.png")
        artifacts.append("wavepacket.png")


_DISPATCH = {
    "eigen": _run_eigen,
    "tdse-scan": _run_tdse_scan,
    "two-level-scan": _run_two_level_scan,
    "lineshape": _run_lineshape,
    "fit": _run_fit,
    "reconstruct": _run_reconstruct,
}

_NUMERICAL_ERRORS = (
    tdse.PropagationError,
    atom.StateRequestError,
    twolevel.AccuracyError,
    analysis.ReconstructionError,
    np.linalg.LinAlgError,
)


def _write_log(out: Path, cfg, stages, artifacts, status: str, messages=()) -> None:
    log = {
        "version": __version__,
        "kind": cfg.kind,
        "status": status,
        "seed": cfg.seed,
        "stages": stages,
        "artifacts": artifacts,
        "warnings": list(messages),
    }
    (out / "run.json").write_text(json.dumps(log, indent=2, sort_keys=True) + "\n")


def _preflight(cfg: config_mod.RunConfig) -> None:
    """Construct the scenario objects so parameter conflicts fail pre-output."""
    if cfg.kind == "tdse-scan":
        cfg.scan_scenario()
    elif cfg.kind in ("two-level-scan", "reconstruct"):
        cfg.level_params()
        cfg.base_train()
    elif cfg.kind == "lineshape":
        lineshape.FanoConfig(q=cfg.q, phase=float(cfg.phases[0]))
    elif cfg.kind == "eigen":
        cfg.potential()


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="attofano",
        description="Laser-assisted Fano resonance scenarios: simulate, fit, reconstruct.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="kind", required=True, metavar="subcommand")
    helps = {
        "eigen": "solve and report the model-potential bound levels",
        "tdse-scan": "propagate the TDSE over a delay scan and emit a spectrogram",
        "two-level-scan": "evaluate the two-level model over a delay scan",
        "lineshape": "evaluate analytic interference lineshapes per beat phase",
        "fit": "fit fringe parameters to a spectrogram file",
        "reconstruct": "reconstruct the resonant wave packet from a spectrogram file",
    }
    for kind in config_mod.KINDS:
        p = sub.add_parser(kind, help=helps[kind])
        p.add_argument("--config", help="JSON configuration file (defaults used if omitted)")
        p.add_argument("--out", help="output directory (default from config)")
        p.add_argument("--jobs", type=int, help="worker processes for delay scans")
        p.add_argument("--seed", type=int, help="random seed recorded with the run")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    overrides = {"out_dir": args.out, "jobs": args.jobs, "seed": args.seed}
    try:
        if args.config is None:
            cfg = config_mod.from_dict({}, kind=args.kind, overrides=overrides)
        else:
            cfg = config_mod.load(args.config, kind=args.kind, overrides=overrides)
        _preflight(cfg)
    except (config_mod.ConfigError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "config.json").write_text(
        json.dumps(cfg.resolved(), indent=2, sort_keys=True) + "\n"
    )
    stages: list[dict] = []
    artifacts: list[str] = ["config.json"]
    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            _DISPATCH[cfg.kind](cfg, out, stages, artifacts)
        messages = [str(w.message) for w in caught]
    except (spectra.SpectrogramFormatError, OSError) as exc:
        _write_log(out, cfg, stages, artifacts, status=f"input error: {exc}")
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    except _NUMERICAL_ERRORS + (ValueError, RuntimeError) as exc:
        _write_log(out, cfg, stages, artifacts, status=f"numerical failure: {exc}")
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3

    artifacts.append("run.json")
    _write_log(out, cfg, stages, artifacts, status="ok", messages=messages)
    print(f"attofano {__version__} :: {cfg.kind}")
    for stage in stages:
        print(f"  {stage['name']}: {stage['seconds']:.2f} s")
    for message in messages:
        print(f"  warning: {message}")
    print(f"  {len(artifacts)} artifacts in {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
