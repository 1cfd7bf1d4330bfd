import numpy as np
import pytest
from numpy.testing import assert_allclose

from ramancoupling.errors import DetectionError, DomainError
from ramancoupling.model import SystemParams
from ramancoupling.spectroscopy import (ResponseModel, TransmissionTrace, equal_width_drive,
                                        find_split_peaks, fit_response, initial_guess,
                                        pair_transitions, read_trace_csv, response,
                                        synthesize_trace, synthesize_transmission_map,
                                        two_mode_response)
from ramancoupling.stark import stark_parallel_transport
from ramancoupling.utils import ghz, mhz

KAPPA = mhz(6.6)
CENTER = ghz(7.126)
MODEL = ResponseModel(a0=KAPPA * CENTER, gtilde=mhz(3.1), omega_d0=CENTER, kappa=KAPPA,
                      gamma=KAPPA)


def _probe(points=200, span=mhz(25)):
    return CENTER + np.linspace(-span, span, points)


def _dense_peaks(model, span):
    probe = CENTER + np.linspace(-span, span, 400001)
    values = response(model, probe)
    maxima = np.where((values[1:-1] > values[:-2]) & (values[1:-1] > values[2:]))[0] + 1
    return probe[maxima]


def test_response_shape():
    values = response(MODEL, _probe())
    assert np.all(values > 0)
    assert_allclose(values, two_mode_response(MODEL.a0, MODEL.gtilde, CENTER, CENTER, KAPPA,
                                              KAPPA, _probe()))
    bare = ResponseModel(a0=KAPPA * CENTER, gtilde=0.0, omega_d0=CENTER, kappa=KAPPA,
                         gamma=KAPPA)
    assert_allclose(response(bare, CENTER), 1.0, rtol=1e-12)
    with pytest.raises(DomainError):
        response(MODEL, [0.0, 1.0])
    with pytest.raises(DomainError):
        ResponseModel(a0=0.0, gtilde=1.0, omega_d0=CENTER, kappa=KAPPA, gamma=KAPPA)


def test_single_line_center():
    probe = _probe(201)
    spacing = probe[1] - probe[0]
    center = CENTER + 0.37 * spacing
    model = ResponseModel(a0=KAPPA * CENTER, gtilde=0.0, omega_d0=center, kappa=KAPPA,
                          gamma=KAPPA)
    peaks = find_split_peaks(synthesize_trace(model, probe))
    assert not peaks.split
    assert abs(peaks.center - center) < 0.1 * spacing
    assert_allclose(peaks.widths[0], KAPPA, rtol=0.05)


def test_doublet_separation():
    peaks = find_split_peaks(synthesize_trace(MODEL, _probe()))
    assert peaks.split and len(peaks.positions) == 2
    low, high = _dense_peaks(MODEL, mhz(25))
    assert_allclose(peaks.separation, high - low, rtol=0.05)
    assert_allclose(peaks.widths[0], peaks.widths[1], rtol=0.05)
    assert peaks.dip_depth > 0.1


def test_flat_trace_is_rejected():
    trace = TransmissionTrace(_probe(), np.ones(200))
    with pytest.raises(DetectionError):
        find_split_peaks(trace)


def test_narrow_trace_is_rejected():
    bare = ResponseModel(a0=KAPPA * CENTER, gtilde=0.0, omega_d0=CENTER, kappa=KAPPA,
                         gamma=KAPPA)
    with pytest.raises(DetectionError):
        find_split_peaks(synthesize_trace(bare, _probe(200, mhz(12))))
    assert not find_split_peaks(synthesize_trace(bare, _probe(200, mhz(25)))).split


def test_trace_validation():
    with pytest.raises(DomainError):
        TransmissionTrace(_probe(10), np.ones(10))
    with pytest.raises(DomainError):
        TransmissionTrace(_probe()[::-1], np.ones(200))
    with pytest.raises(DomainError):
        TransmissionTrace(_probe(), -np.ones(200))
    with pytest.raises(DomainError):
        TransmissionTrace(_probe(), np.ones(199))


def test_noiseless_round_trip():
    trace = synthesize_trace(MODEL, _probe())
    initial = initial_guess(trace)
    assert_allclose(initial.omega_d0, CENTER, atol=0.2 * KAPPA)
    fit = fit_response(trace, initial)
    model = fit.model
    for name in ('a0', 'gtilde', 'kappa', 'gamma'):
        assert_allclose(getattr(model, name), getattr(MODEL, name), rtol=1e-6, err_msg=name)
    assert abs(model.omega_d0 - CENTER) < 1e-6 * KAPPA
    assert np.abs(fit.residuals).max() < 1e-6 * trace.transmission.max()


def test_noisy_round_trip():
    probe = _probe()
    misses = 0
    for seed in range(20):
        fit = fit_response(synthesize_trace(MODEL, probe, noise=0.02, rng=seed))
        if abs(fit.model.gtilde / MODEL.gtilde - 1) >= 0.03:
            misses += 1
        assert np.all(np.isfinite(fit.stderr))
    assert misses <= 1, misses


def test_scale_covariance():
    trace = synthesize_trace(MODEL, _probe(), noise=0.02, rng=7)
    reference = fit_response(trace).model
    scaled = fit_response(trace.scaled(4.0)).model
    assert_allclose(scaled.a0, 2 * reference.a0, rtol=1e-6)
    for name in ('gtilde', 'kappa', 'gamma'):
        assert_allclose(getattr(scaled, name), getattr(reference, name), rtol=1e-6,
                        err_msg=name)
    assert abs(scaled.omega_d0 - reference.omega_d0) < 1e-6 * KAPPA


def test_separation_bias_shrinks_with_coupling():
    biases = []
    for ratio in (1, 2, 4, 10):
        gtilde = ratio * KAPPA
        model = ResponseModel(a0=KAPPA * CENTER, gtilde=gtilde, omega_d0=CENTER, kappa=KAPPA,
                              gamma=KAPPA)
        probe = _probe(4001, gtilde + 8 * KAPPA)
        peaks = find_split_peaks(synthesize_trace(model, probe))
        assert peaks.split, ratio
        biases.append(peaks.separation / (2 * gtilde) - 1)
    assert np.all(np.diff(biases) < 0), repr(biases)
    assert biases[0] > 0
    assert biases[-1] < 2e-3, repr(biases)


def test_trace_csv_round_trip(tmp_path):
    trace = synthesize_trace(MODEL, _probe())
    path = str(tmp_path / 'trace.csv')
    trace.to_csv(path)
    loaded = read_trace_csv(path)
    assert_allclose(loaded.frequencies, trace.frequencies, rtol=1e-12)
    assert_allclose(loaded.transmission, trace.transmission, rtol=1e-11)


def test_equal_width_drive_pins_resonance():
    params = SystemParams.reference_device(gamma=mhz(2))
    omega_amp = ghz(0.2)
    stark = stark_parallel_transport(params, omega_amp, 100)
    resonant = stark.drive_frequency(omega_amp)
    drive_grid = resonant + mhz(np.array([-4.0, -2.0, 0.0, 2.0, 4.0]))
    middle = np.mean(pair_transitions(params, omega_amp, resonant))
    probe_grid = middle + np.linspace(-mhz(60), mhz(60), 2401)
    transmission_map = synthesize_transmission_map(params, stark, drive_grid, probe_grid,
                                                   omega_amp)
    assert transmission_map.transmission.shape == (5, 2401)
    low, high = transmission_map.polaritons[2]
    assert_allclose(high - low, 2 * stark.effective_coupling(omega_amp), rtol=1e-5)
    omega_d, index, mismatch = equal_width_drive(transmission_map)
    assert index == 2
    assert omega_d == drive_grid[2]
    assert mismatch < 0.05 * KAPPA
    with pytest.raises(DomainError):
        synthesize_transmission_map(params, stark, drive_grid, probe_grid, omega_amp,
                                    gamma=0.0)
