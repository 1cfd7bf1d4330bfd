import numpy as np
import pytest
from numpy.testing import assert_allclose

from ramancoupling.errors import DomainError, FitError, PoleCollisionError
from ramancoupling.model import (DriveParams, FREQUENCY_SCALE, SystemParams, bare_energies,
                                 build_hamiltonian)
from ramancoupling.resolvent import (CALIBRATION_CSV_HEADER, brute_force_self_energy,
                                     calibrate_drive_power, read_calibration_csv, self_energy,
                                     self_energy_exact, stark_shift_resolvent)
from ramancoupling.stark import initial_drive_frequency, stark_parallel_transport
from ramancoupling.utils import ghz, mhz, mw_to_dbm, to_mhz, write_csv


def _drive(params, omega_amp=ghz(0.1), phi=0.0):
    return DriveParams(omega_amp=omega_amp, phi=phi, omega_d=params.omega_bare)


def test_second_order_closed_form():
    params = SystemParams.reference_device(4, 3)
    drive = _drive(params)
    energies = bare_energies(params, drive.omega_d)
    e = {label: energies[params.index(label)] for label in ('e0', 'e1', 'h0')}
    g, half = params.g, 0.5 * drive.omega_amp
    for z in [0.3 * FREQUENCY_SCALE, -0.2 * FREQUENCY_SCALE + 0.01j * FREQUENCY_SCALE]:
        sigma_gg = g ** 2 / (z - e['e0']) + half ** 2 / (z - e['e1'])
        sigma_ff = (2 * g ** 2 / (z - e['e1']) + 2 * half ** 2 / (z - e['e0'])
                    + 3 * half ** 2 / (z - e['h0']))
        assert_allclose(self_energy(params, drive, 'g1', 'g1', z, 2), sigma_gg, rtol=1e-12)
        assert_allclose(self_energy(params, drive, 'f0', 'f0', z, 2), sigma_ff, rtol=1e-12)
        # only the Omega^0 paths survive
        assert_allclose(self_energy(params, drive, 'f0', 'f0', z, 2, max_omega_power=0),
                        2 * g ** 2 / (z - e['e1']), rtol=1e-12)


def test_path_sum_matches_enumeration():
    params = SystemParams.reference_device(3, 2)
    drive = _drive(params, ghz(0.15), phi=0.4)
    z = 0.123 * FREQUENCY_SCALE + 0.01j * FREQUENCY_SCALE
    scale = FREQUENCY_SCALE
    for order in range(1, 5):
        for bra in ('f0', 'g1'):
            for ket in ('f0', 'g1'):
                fast = self_energy(params, drive, bra, ket, z, order)
                slow = brute_force_self_energy(params, drive, bra, ket, z, order)
                assert_allclose(fast, slow, rtol=1e-10, atol=1e-12 * scale), (order, bra, ket)


def test_series_converges_to_exact():
    params = SystemParams.reference_device(4, 3)
    drive = _drive(params, ghz(0.1), phi=0.2)
    z = 5j * FREQUENCY_SCALE
    for bra in ('f0', 'g1'):
        for ket in ('f0', 'g1'):
            series = self_energy(params, drive, bra, ket, z, 14, max_omega_power=14)
            exact = self_energy_exact(params, drive, bra, ket, z)
            assert_allclose(series, exact, rtol=1e-9, atol=1e-9 * abs(exact) + 1e-6)


def test_exact_self_energy_reproduces_resolvent_block():
    params = SystemParams.reference_device(4, 3)
    drive = _drive(params, ghz(0.2), phi=-0.6)
    h = build_hamiltonian(params, drive)
    rows = [params.index('f0'), params.index('g1')]
    z = 0.05 * FREQUENCY_SCALE + 0.02j * FREQUENCY_SCALE
    block = np.linalg.inv(z * np.eye(params.dim) - h)[np.ix_(rows, rows)]
    labels = ('f0', 'g1')
    sigma = np.array([[self_energy_exact(params, drive, a, b, z) for b in labels]
                      for a in labels])
    effective = np.linalg.inv(z * np.eye(2) - np.diag(np.diag(h)[rows]) - sigma)
    assert_allclose(effective, block, rtol=1e-9, atol=1e-9 * np.abs(block).max())


def test_self_energy_contract():
    params = SystemParams.reference_device(4, 3)
    drive = _drive(params)
    with pytest.raises(DomainError):
        self_energy(params, drive, 'e0', 'g1', 0.0, 2)
    with pytest.raises(DomainError):
        self_energy(params, drive, 'f0', 'g1', 0.0, 0)
    pole = bare_energies(params, drive.omega_d)[params.index('e0')]
    with pytest.raises(PoleCollisionError):
        self_energy(params, drive, 'g1', 'g1', pole, 2)


def test_drive_independent_shift():
    params = SystemParams.reference_device(4, 3)
    solution = stark_shift_resolvent(params, 0.0)
    assert solution.delta_f0g1 == 0
    assert_allclose(to_mhz(solution.delta_jc), 18.4, rtol=0.03)
    assert_allclose(params.omega_bare + solution.delta_jc, initial_drive_frequency(params),
                    atol=2 * np.pi * 1e3)
    assert solution.residual < 1e-12 * 10 * FREQUENCY_SCALE


def test_stark_shift_is_negative_and_monotone():
    params = SystemParams.reference_device(4, 3)
    delta_jc = stark_shift_resolvent(params, 0.0).delta_jc
    shifts = [stark_shift_resolvent(params, ghz(omega), delta_jc=delta_jc).delta_f0g1
              for omega in np.linspace(0.03, 0.3, 6)]
    assert shifts[0] < 0, repr(shifts)
    assert np.all(np.diff(shifts) < 0), repr(shifts)
    with pytest.raises(DomainError):
        stark_shift_resolvent(params, ghz(0.1), order_omega=3)


def test_resolvent_agrees_with_transport():
    params = SystemParams.reference_device(4, 3)
    stark = stark_parallel_transport(params, ghz(0.15), 60)
    delta_jc = stark_shift_resolvent(params, 0.0).delta_jc
    for omega in ghz([0.03, 0.06, 0.1, 0.15]):
        series = stark_shift_resolvent(params, omega, delta_jc=delta_jc).delta_f0g1
        transport = stark.stark_shift(omega)
        assert_allclose(series, transport, rtol=0.02), (to_mhz(series), to_mhz(transport))


def test_truncation_error_scales_as_eighth_power():
    params = SystemParams.reference_device(4, 3)
    gaps = []
    for omega in ghz([0.15, 0.3]):
        truncated = stark_shift_resolvent(params, omega, rtol=1e-13)
        full = stark_shift_resolvent(params, omega, order_omega=None, rtol=1e-13)
        assert full.order_omega is None and full.order_g is None
        gaps.append(abs(truncated.delta_f0g1 - full.delta_f0g1))
    assert 0 < gaps[1] < 1e-3 * abs(full.delta_f0g1), gaps
    # doubling Omega multiplies an Omega**8 remainder by 256
    assert 100 < gaps[1] / gaps[0] < 700, gaps


def test_resolvent_gap_to_transport_is_relative():
    params = SystemParams.reference_device(4, 3)
    stark = stark_parallel_transport(params, ghz(0.12), 120)
    delta_jc = stark_shift_resolvent(params, 0.0, order_omega=None).delta_jc
    gaps = []
    for omega in ghz([0.03, 0.06, 0.12]):
        full = stark_shift_resolvent(params, omega, order_omega=None, delta_jc=delta_jc)
        gaps.append(full.delta_f0g1 / stark.stark_shift(omega) - 1)
    # a fixed fraction of the shift that does not vanish with Omega
    assert np.all(np.abs(gaps) > 5e-3) and np.all(np.abs(gaps) < 2e-2), gaps
    assert np.ptp(gaps) < 2e-3, gaps


def _measurements(params, k, powers, noise=0.0, rng=None):
    delta_jc = stark_shift_resolvent(params, 0.0).delta_jc
    data = []
    for power in powers:
        shift = stark_shift_resolvent(params, k * np.sqrt(power), delta_jc=delta_jc).delta_f0g1
        if noise:
            shift *= 1 + noise * rng.standard_normal()
        data.append((power, shift))
    return data


def test_calibration_noiseless():
    params = SystemParams.reference_device(4, 3)
    k = ghz(0.05)
    powers = 10 ** np.linspace(-1, 1, 6)
    fit = calibrate_drive_power(params, _measurements(params, k, powers))
    assert_allclose(fit.k, k, rtol=1e-6)
    assert np.abs(fit.residuals).max() < 1e-6 * FREQUENCY_SCALE


def test_calibration_noisy():
    params = SystemParams.reference_device(4, 3)
    k = ghz(0.05)
    powers = 10 ** np.linspace(-1, 1, 10)
    for seed in range(5):
        rng = np.random.default_rng(seed)
        fit = calibrate_drive_power(params, _measurements(params, k, powers, 0.05, rng))
        assert abs(fit.k / k - 1) < 0.05, (seed, fit.k / k)
        assert fit.stderr > 0


def test_calibration_rejects_degenerate_input():
    params = SystemParams.reference_device(4, 3)
    shift = mhz(-1.0)
    for data in [[(1.0, shift), (2.0, shift)],
                 [(1.0, shift), (1.0, shift), (1.0, shift)],
                 [(-1.0, shift), (1.0, shift), (2.0, shift)]]:
        with pytest.raises(FitError):
            calibrate_drive_power(params, data)


def test_read_calibration_csv(tmp_path):
    path = str(tmp_path / 'measurements.csv')
    write_csv(path, CALIBRATION_CSV_HEADER, [(mw_to_dbm(1.0), -1.5), (10.0, -15.0)])
    data = read_calibration_csv(path)
    assert_allclose(data[0], (1.0, mhz(-1.5)), rtol=1e-12)
    assert_allclose(data[1], (10.0, mhz(-15.0)), rtol=1e-12)
