"""Vector-potential envelopes, pulse trains, and delay bookkeeping."""

import numpy as np
import pytest

from attofano import pulses
from attofano.constants import fs_to_au


def test_ir_peak_vector_potential():
    comp = pulses.PulseComponent.from_lab("IR", 1, 3e12, 31.0, 0.0)
    np.testing.assert_allclose(comp.peak_amplitude, 0.162122, rtol=1e-4)
    np.testing.assert_allclose(comp.omega, 0.05703, rtol=1e-12)


def test_envelope_width_parameter_is_amplitude_fwhm():
    comp = pulses.PulseComponent.from_lab("IR", 1, 3e12, 31.0, 0.0)
    half = comp.center + 0.5 * comp.fwhm
    np.testing.assert_allclose(comp.envelope(half), 0.5, rtol=1e-13)
    np.testing.assert_allclose(comp.envelope(comp.center), 1.0, rtol=1e-13)
    # Instantaneous intensity then quarters at the same offset.
    np.testing.assert_allclose(
        comp.instantaneous_intensity(half), 0.25 * comp.intensity, rtol=1e-12
    )


def test_harmonic_frequencies():
    train = pulses.rabbit_train(tau_fs=0.0)
    np.testing.assert_allclose(train.component("H15").omega, 15 * 0.05703)
    np.testing.assert_allclose(train.component("H17").omega, 17 * 0.05703)
    np.testing.assert_allclose(
        train.component("H15").omega * 27.211386, 23.27, atol=0.02
    )


def test_train_sum_at_common_center():
    train = pulses.rabbit_train(tau_fs=0.0)
    total = train.vector_potential(0.0)
    parts = sum(c.peak_amplitude for c in train)
    np.testing.assert_allclose(total, parts, rtol=1e-12)
    np.testing.assert_allclose(total, 0.173876, rtol=1e-4)


def test_delay_moves_ir_envelope_only():
    tau_fs = -10.0
    train = pulses.rabbit_train(tau_fs=tau_fs)
    ir = train.component("IR")
    np.testing.assert_allclose(ir.center, -tau_fs * fs_to_au(1.0), rtol=1e-12)
    assert train.component("H15").center == 0.0
    assert train.component("H17").center == 0.0


def test_envelope_product_peak_position():
    # Gaussian-product rule: overlap of the harmonic envelope at zero with
    # the dressing envelope at -tau peaks at -tau / (1 + (T_ir/T_xuv)^2).
    tau_fs = -10.0
    predicted = pulses.product_peak_fs(tau_fs, 31.0, 12.0)
    np.testing.assert_allclose(predicted, 1.30317, rtol=1e-4)
    train = pulses.rabbit_train(tau_fs=tau_fs)
    t = np.linspace(-40.0, 40.0, 200001) * fs_to_au(1.0)
    product = train.component("IR").envelope(t) * train.component("H15").envelope(t)
    numeric = t[np.argmax(product)] / fs_to_au(1.0)
    np.testing.assert_allclose(numeric, predicted, atol=1e-3)


def test_window_contains_negligible_tails():
    train = pulses.rabbit_train(tau_fs=-80.0)
    lo, hi = train.window()
    peak = max(c.peak_amplitude for c in train)
    assert abs(train.vector_potential(lo)) < 1e-12 * peak
    assert abs(train.vector_potential(hi)) < 1e-12 * peak
    # Window tracks the displaced dressing pulse.
    assert lo < train.component("IR").center < hi
    assert lo < 0.0 < hi


def test_ponderomotive_shift_magnitude():
    u_p = pulses.ponderomotive_shift(3e12 / 3.50945e16, 0.05703)
    np.testing.assert_allclose(u_p, 6.5708e-3, rtol=1e-3)


def test_component_subsets():
    train = pulses.rabbit_train(tau_fs=0.0, include=("IR", "H15"))
    labels = [c.label for c in train]
    assert labels == ["IR", "H15"]
    with pytest.raises(pulses.PulseConfigError):
        pulses.rabbit_train(tau_fs=0.0, include=("IR", "H19"))


def test_duplicate_labels_rejected():
    comp = pulses.PulseComponent.from_lab("IR", 1, 3e12, 31.0, 0.0)
    with pytest.raises(pulses.PulseConfigError):
        pulses.PulseTrain((comp, comp))


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(label="X", omega=-0.1, intensity=1e-5, fwhm=100.0),
        dict(label="X", omega=0.1, intensity=-1e-5, fwhm=100.0),
        dict(label="X", omega=0.1, intensity=1e-5, fwhm=0.0),
        dict(label="", omega=0.1, intensity=1e-5, fwhm=100.0),
    ],
)
def test_component_validation(kwargs):
    with pytest.raises(pulses.PulseConfigError):
        pulses.PulseComponent(**kwargs)


def test_fringe_period_is_half_ir_cycle():
    # Sideband beats go as cos(2 omega tau): period pi/omega = 1.3325 fs.
    period_fs = np.pi / 0.05703 * 0.02418884
    np.testing.assert_allclose(period_fs, 1.3325, atol=2e-4)
