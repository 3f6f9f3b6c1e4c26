"""Two-state resonance model: dynamics, pathways, and limits."""

import dataclasses
import math

import numpy as np
import pytest
from scipy.integrate import cumulative_trapezoid

from attofano import pulses, twolevel
from attofano.constants import au_to_fs, ev_to_au, fs_to_au

OMEGA = pulses.OMEGA_IR_DEFAULT
REFERENCE_INTENSITY = 8.548385e-5


def short_train(tau_fs=0.0, **kwargs):
    """Scaled-down shot for fast dynamics tests."""
    kwargs.setdefault("t_ir_fs", 8.0)
    kwargs.setdefault("t_xuv_fs", 4.0)
    return pulses.rabbit_train(tau_fs, **kwargs)


def test_coefficients_reproduce_reference_products():
    p = twolevel.LevelParams()
    np.testing.assert_allclose(p.delta_1s * REFERENCE_INTENSITY, -6.6e-3, rtol=1e-6)
    np.testing.assert_allclose(p.delta_3p * REFERENCE_INTENSITY, 2.2e-3, rtol=1e-6)
    np.testing.assert_allclose(p.gamma_3p * REFERENCE_INTENSITY, 4.8e-3, rtol=1e-6)
    # Depletion rate in lab units and the near-ponderomotive ground shift.
    np.testing.assert_allclose(
        p.gamma_3p * REFERENCE_INTENSITY * fs_to_au(1.0), 0.198, atol=2e-3
    )
    np.testing.assert_allclose(
        p.delta_1s, -1.0 / (4 * OMEGA**2), rtol=0.01
    )


def test_negative_depletion_rejected():
    with pytest.raises(ValueError):
        twolevel.LevelParams(gamma_3p=-1.0)


def test_ground_amplitude_stays_unit_modulus():
    amps = twolevel.integrate_amplitudes(
        twolevel.LevelParams(), pulses.rabbit_train(0.0), -10.0
    )
    np.testing.assert_allclose(np.abs(amps.c_1s), 1.0, atol=1e-12)
    assert np.abs(amps.c_3p).max() < 1.0


def test_no_drive_means_empty_resonance():
    train = short_train(h15_intensity_Wcm2=0.0)
    amps = twolevel.integrate_amplitudes(twolevel.LevelParams(), train, 0.0)
    assert np.abs(amps.c_3p).max() == 0.0


def test_no_depletion_freezes_late_population():
    params = twolevel.LevelParams(gamma_3p=0.0)
    amps = twolevel.integrate_amplitudes(params, short_train(), 0.0)
    late = np.abs(amps.c_3p[amps.times > amps.times[-1] - 100.0])
    assert late[-1] > 0.01
    assert late.max() - late.min() < 1e-12


def test_cascade_matches_explicit_runge_kutta_loop():
    params = twolevel.LevelParams()
    shot = twolevel.delayed_train(short_train(), -3.0)
    lo, hi = shot.window()
    dt = 0.1
    n = max(int(math.ceil((hi - lo) / dt)), 2)
    times, c_1s, c_3p = twolevel._amplitudes_on_grid(params, shot, lo, n, dt)

    ir, h15 = shot.component("IR"), shot.component("H15")
    t_half = lo + 0.5 * dt * np.arange(2 * n + 1)
    i_ir = ir.instantaneous_intensity(t_half)
    lam = -1j * (
        params.e_3p + (params.delta_3p - 0.5j * params.gamma_3p) * i_ir
    )
    phase = params.e_1s * t_half + params.delta_1s * ir.cumulative_intensity(
        t_half, 0.0
    )
    g = -1j * params.mu_1s3p * h15.vector_potential(t_half) * np.exp(-1j * phase)

    y = 0.0 + 0j
    walked = [y]
    for k in range(n):
        l0, lh, l1 = lam[2 * k], lam[2 * k + 1], lam[2 * k + 2]
        g0, gh, g1 = g[2 * k], g[2 * k + 1], g[2 * k + 2]
        k1 = l0 * y + g0
        k2 = lh * (y + 0.5 * dt * k1) + gh
        k3 = lh * (y + 0.5 * dt * k2) + gh
        k4 = l1 * (y + dt * k3) + g1
        y = y + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
        walked.append(y)
    np.testing.assert_allclose(c_3p, np.array(walked), atol=1e-12)


def test_step_halving_guard_trips_on_coarse_grid():
    with pytest.raises(twolevel.AccuracyError):
        twolevel.integrate_amplitudes(
            twolevel.LevelParams(), short_train(), 0.0, dt=20.0
        )


def test_transfer_scales_as_root_intensity():
    params = twolevel.LevelParams()
    weak = twolevel.integrate_amplitudes(
        params, short_train(h15_intensity_Wcm2=1e12), 0.0
    )
    strong = twolevel.integrate_amplitudes(
        params, short_train(h15_intensity_Wcm2=4e12), 0.0
    )
    ratio = np.abs(strong.c_3p[-1]) / np.abs(weak.c_3p[-1])
    np.testing.assert_allclose(ratio, 2.0, rtol=0.02)


def test_resonant_spectrum_peaks_at_dressed_resonance():
    params = twolevel.LevelParams()
    train = pulses.rabbit_train(0.0)
    energies = np.linspace(5e-4, ev_to_au(0.5), 600)
    spectra = twolevel.pathway_amplitudes(params, train, 0.0, energies)
    peak = energies[np.argmax(np.abs(spectra.m_res))]
    # One IR photon above the (Stark-shifted) resonance: E_3p + omega
    # is 0.0019 a.u., pushed up by delta_3p I(t) during the overlap.
    assert 0.002 < peak < 0.004
    assert np.abs(spectra.m_total - (spectra.m_res + spectra.m_con)).max() == 0.0


def test_continuum_spectrum_centroid_below_bare_sideband():
    params = twolevel.LevelParams()
    train = pulses.rabbit_train(0.0)
    energies = np.linspace(5e-4, ev_to_au(0.6), 600)
    amps = twolevel.integrate_amplitudes(params, train, 0.0)
    m_con = twolevel.continuum_amplitude(amps, params, train, energies)
    weight = np.abs(m_con) ** 2
    centroid = np.sum(energies * weight) / np.sum(weight)
    bare = params.e_1s + 16 * OMEGA
    # Ponderomotive downshift moves the sideband below 0.243 eV by a
    # sizable fraction of 0.18 eV at full overlap.
    assert ev_to_au(0.08) < centroid < ev_to_au(0.17)
    assert centroid < bare


def test_continuum_wavepacket_peaks_at_envelope_product_time():
    params = twolevel.LevelParams()
    train = pulses.rabbit_train(0.0)
    tau = -10.0
    energies = np.linspace(-ev_to_au(0.6), ev_to_au(0.9), 2400)
    amps = twolevel.integrate_amplitudes(params, train, tau)
    m_con = twolevel.continuum_amplitude(amps, params, train, energies)
    times = np.linspace(fs_to_au(-40.0), fs_to_au(40.0), 8001)
    packet = np.exp(-1j * np.outer(times, energies)) @ m_con
    peak_fs = au_to_fs(times[np.argmax(np.abs(packet))])
    np.testing.assert_allclose(
        peak_fs, pulses.product_peak_fs(tau, 31.0, 12.0), atol=0.05
    )


def test_beat_phase_advances_at_twice_the_carrier():
    params = twolevel.LevelParams()
    train = pulses.rabbit_train(0.0)
    probe = np.array([ev_to_au(0.12)])

    def beat(tau_fs, shot=train):
        spec = twolevel.pathway_amplitudes(params, shot, tau_fs, probe)
        return spec.m_res[0] * np.conj(spec.m_con[0])

    dtau = 0.2
    dphi = np.angle(beat(-10.0 + dtau) * np.conj(beat(-10.0)))
    np.testing.assert_allclose(dphi, -2 * OMEGA * fs_to_au(dtau), atol=0.02)

    # Frozen envelopes, carrier-only delay: the shift is exact.
    shifted = pulses.PulseTrain(
        tuple(
            dataclasses.replace(c, phase=c.omega * fs_to_au(dtau))
            if c.label == "IR"
            else c
            for c in train
        )
    )
    dphi_exact = np.angle(beat(-10.0, shifted) * np.conj(beat(-10.0)))
    np.testing.assert_allclose(dphi_exact, -2 * OMEGA * fs_to_au(dtau), atol=1e-10)


def test_phase_maps_independent_of_dipole_magnitudes():
    train = pulses.rabbit_train(0.0)
    energies = np.linspace(ev_to_au(0.05), ev_to_au(0.4), 40)
    base = twolevel.pathway_amplitudes(
        twolevel.LevelParams(), train, -7.0, energies
    )
    scaled = twolevel.pathway_amplitudes(
        twolevel.LevelParams(mu_3p_e=2.5, mu_1s_ep=0.3, mu_ep_e=1.7),
        train,
        -7.0,
        energies,
        wave="d",
    )
    np.testing.assert_allclose(
        np.angle(base.m_res * np.conj(base.m_con)),
        np.angle(scaled.m_res * np.conj(scaled.m_con)),
        atol=1e-10,
    )


def test_breit_wigner_matches_convolution_oracle():
    # Constant dressing intensity: solve the driven amplitude with an
    # integrating factor and rotating-wave fields, transform, and
    # compare with the closed pole form after common normalization.
    params = twolevel.LevelParams()
    train = pulses.rabbit_train(0.0)
    ir, h15 = train.component("IR"), train.component("H15")
    i_ir = ir.intensity

    times = np.linspace(-2000.0, 8000.0, 500001)
    c_1s = np.exp(-1j * (params.e_1s + params.delta_1s * i_ir) * times)
    lam = -1j * (
        params.e_3p + (params.delta_3p - 0.5j * params.gamma_3p) * i_ir
    )
    drive = (
        -1j
        * params.mu_1s3p
        * np.sqrt(h15.intensity)
        * h15.envelope(times)
        * np.exp(-1j * h15.omega * times)
        / (2 * h15.omega)
        * c_1s
    )
    inner = cumulative_trapezoid(np.exp(-lam * times) * drive, times, initial=0.0)
    c_3p = np.exp(lam * times) * inner
    integrand = (
        np.sqrt(i_ir) / (2 * ir.omega) * np.exp(-1j * ir.omega * times) * c_3p
    )
    dt = times[1] - times[0]
    weights = np.full(times.size, dt)
    weights[0] = weights[-1] = 0.5 * dt

    energies = np.linspace(5e-4, ev_to_au(0.5), 15)
    numeric = np.exp(1j * np.outer(energies, times)) @ (integrand * weights)
    closed = twolevel.breit_wigner_limit(params, train, energies)
    mid = energies.size // 2
    ratio = (numeric / numeric[mid]) / (closed / closed[mid])
    assert np.abs(ratio - 1.0).max() < 0.01


def test_breit_wigner_pole_width():
    # At E = pole center +- Gamma/2 the pole factor halves in power;
    # divide out the envelope transform to expose it.
    params = twolevel.LevelParams()
    train = pulses.rabbit_train(0.0)
    ir, h15 = train.component("IR"), train.component("H15")
    gamma = params.gamma_3p * ir.intensity
    np.testing.assert_allclose(gamma, 4.8e-3, rtol=1e-4)
    center = params.e_3p + params.delta_3p * ir.intensity + OMEGA
    energies = np.array([center - gamma / 2, center, center + gamma / 2])
    spectrum = twolevel.breit_wigner_limit(params, train, energies)
    delta_2 = (
        energies - params.e_1s - params.delta_1s * ir.intensity - OMEGA - h15.omega
    )
    four_ln2 = 4 * math.log(2.0)
    gauss = np.exp(-(delta_2**2) * h15.fwhm**2 / (4 * four_ln2))
    power = np.abs(spectrum / gauss) ** 2
    np.testing.assert_allclose(power[0], 0.5 * power[1], rtol=1e-10)
    np.testing.assert_allclose(power[2], 0.5 * power[1], rtol=1e-10)


def test_minima_curves_repeat_at_half_cycle():
    params = twolevel.LevelParams()
    train = pulses.rabbit_train(0.0)
    taus = np.arange(-12.0, -4.0, 0.1)
    energies = np.linspace(ev_to_au(0.08), ev_to_au(0.35), 12)
    curves = twolevel.minima_locus(
        params, train, energies, taus, shift_fs=0.0, dt=0.25
    )
    assert len(curves) >= 4
    full = [c for c in curves if len(c) == energies.size]
    assert len(full) >= 4
    row = sorted(c[0, 0] for c in full)
    spacing = np.diff(row)
    period = np.pi / OMEGA * au_to_fs(1.0)
    assert np.all(np.abs(spacing - period) < 0.04)


def test_minima_shift_is_rigid_translation():
    params = twolevel.LevelParams()
    train = pulses.rabbit_train(0.0)
    taus = np.arange(-9.0, -6.0, 0.1)
    energies = np.linspace(ev_to_au(0.1), ev_to_au(0.2), 4)
    plain = twolevel.minima_locus(params, train, energies, taus, shift_fs=0.0, dt=0.25)
    moved = twolevel.minima_locus(params, train, energies, taus, shift_fs=0.25, dt=0.25)
    np.testing.assert_allclose(moved[0][:, 0] - plain[0][:, 0], 0.25, atol=1e-12)


def test_pathways_converged_in_window_size():
    params = twolevel.LevelParams()
    train = pulses.rabbit_train(0.0)
    energies = np.linspace(1e-3, ev_to_au(0.5), 40)
    narrow = twolevel.integrate_amplitudes(params, train, -5.0, window_widths=3.2)
    wide = twolevel.integrate_amplitudes(params, train, -5.0, window_widths=6.4)
    for figure in (twolevel.resonant_amplitude, twolevel.continuum_amplitude):
        np.testing.assert_allclose(
            figure(narrow, params, train, energies),
            figure(wide, params, train, energies),
            atol=1e-8,
        )


def test_spectral_sampling_guard():
    amps = twolevel.integrate_amplitudes(
        twolevel.LevelParams(), short_train(), 0.0, dt=0.2
    )
    with pytest.raises(twolevel.AccuracyError):
        twolevel.resonant_amplitude(
            amps, twolevel.LevelParams(), short_train(), np.array([4.0])
        )


def test_delayed_train_moves_only_ir():
    train = pulses.rabbit_train(0.0)
    shot = twolevel.delayed_train(train, -12.5)
    np.testing.assert_allclose(shot.component("IR").center, fs_to_au(12.5))
    assert shot.component("H15").center == 0.0
    assert shot.component("H17").center == 0.0
    xuv_only = pulses.rabbit_train(0.0, include=("H15", "H17"))
    with pytest.raises(pulses.PulseConfigError):
        twolevel.delayed_train(xuv_only, 0.0)
