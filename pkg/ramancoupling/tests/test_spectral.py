import warnings

import numpy as np
import pytest
from numpy.testing import assert_allclose

from ramancoupling.errors import (ContractError, LabelingError, LabelingWarning,
                                  PerturbativeWarning, SingularityError)
from ramancoupling.model import DriveParams, SystemParams, build_hamiltonian, build_hjc
from ramancoupling.spectral import (F0, G1, coupling_ladder, diagonalize, dressed_state,
                                    dressed_states_first_order, effective_coupling_pt,
                                    exact_splitting, label_dressed_states,
                                    lambda_system_coupling, pair_indices)
from ramancoupling.utils import ghz, mhz

LOW_STATES = ['g0', 'e0', 'g1', 'f0', 'e1', 'g2']


def test_diagonalize_reconstructs():
    params = SystemParams.reference_device(4, 4)
    h = build_hamiltonian(params, DriveParams(omega_amp=ghz(0.2), phi=0.3,
                                              omega_d=params.omega_bare))
    spec = diagonalize(h, params.n_fock)
    v = spec.eigenvectors
    assert np.all(np.diff(spec.eigenvalues) >= 0)
    assert_allclose(v.conj().T @ v, np.eye(params.dim), atol=1e-12)
    assert_allclose(v @ np.diag(spec.eigenvalues) @ v.conj().T, h,
                    atol=1e-12 * np.abs(h).max())
    rows = np.argmax(np.abs(v), axis=0)
    pivots = v[rows, np.arange(params.dim)]
    assert_allclose(pivots.imag, 0, atol=1e-14)
    assert np.all(pivots.real > 0)


def test_diagonalize_degenerate_cluster():
    spec = diagonalize(np.zeros((4, 4)))
    assert_allclose(spec.eigenvectors, np.eye(4), atol=1e-14)
    h = np.diag([1.0, 2.0, 2.0])
    spec = diagonalize(h)
    assert_allclose(np.abs(spec.eigenvectors), np.eye(3), atol=1e-14)


def test_diagonalize_contract():
    with pytest.raises(ContractError):
        diagonalize(np.zeros((2, 3)))
    with pytest.raises(ContractError):
        diagonalize(np.array([[0, 1], [0, 0]]))


def test_labeling():
    params = SystemParams.reference_device()
    h = build_hjc(params, DriveParams(omega_d=params.omega_bare))
    spec = label_dressed_states(diagonalize(h, params.n_fock), LOW_STATES)
    assert len(spec.labels) == len(LOW_STATES)
    for text in LOW_STATES:
        n = spec.index_of(text)
        row = params.index(text)
        assert np.argmax(np.abs(spec.eigenvectors[:, n])) == row, text
        energy, vector = dressed_state(params, text, params.omega_bare)
        assert_allclose(spec.energy(text), energy, atol=1.0)
        assert_allclose(abs(np.vdot(spec.vector(text), vector)), 1.0, atol=1e-10)


def test_labeling_conflict():
    spec = diagonalize(np.array([[0.0, 1.0], [1.0, 0.0]]), n_fock=2)
    with pytest.raises(LabelingError) as info:
        label_dressed_states(spec, ['g0', 'g1'], threshold=0.6)
    assert len(info.value.conflicts) == 2, repr(info.value.conflicts)
    with pytest.warns(LabelingWarning):
        spec = label_dressed_states(spec, ['g0', 'g1'], threshold=0.6, strict=False)
    assert spec.labels == {}
    with pytest.raises(ContractError):
        label_dressed_states(diagonalize(np.eye(2)))


def test_labeling_breaks_down_under_strong_drive():
    params = SystemParams.reference_device()
    h = build_hamiltonian(params, DriveParams(omega_amp=ghz(2.0), omega_d=params.omega_bare))
    spec = diagonalize(h, params.n_fock)
    with pytest.raises(LabelingError) as info:
        label_dressed_states(spec, LOW_STATES)
    assert info.value.conflicts
    with pytest.warns(LabelingWarning):
        partial = label_dressed_states(spec, LOW_STATES, strict=False)
    assert len(partial.labels) < len(LOW_STATES)


def test_dressed_state_phase_and_norm():
    params = SystemParams.reference_device()
    for text in LOW_STATES:
        _, vector = dressed_state(params, text)
        assert_allclose(np.linalg.norm(vector), 1.0, rtol=1e-12)
        component = vector[params.index(text)]
        assert component.real > 0.9 and abs(component.imag) < 1e-15, text


def test_first_order_dressing():
    params = SystemParams.reference_device()
    f_state, g_state = dressed_states_first_order(params)
    e1, e0 = params.index('e1'), params.index('e0')
    assert_allclose(f_state[e1].real, -0.1530, atol=5e-4)
    assert_allclose(g_state[e0].real, 0.0665, atol=5e-4)
    # exact diagonalization carries the opposite sign convention
    _, f_exact = dressed_state(params, F0)
    _, g_exact = dressed_state(params, G1)
    assert_allclose(f_exact[e1].real, -f_state[e1].real, rtol=0.05)
    assert_allclose(g_exact[e0].real, -g_state[e0].real, rtol=0.05)
    f1, g2 = dressed_states_first_order(params, l=1)
    assert f1[params.index('h0')] != 0
    assert g2[params.index('e1')] != 0


def test_first_order_warns_outside_dispersive():
    params = SystemParams(omega_ge=ghz(7.4), omega_r=ghz(7.126), g=mhz(100), alpha=ghz(-0.376))
    with pytest.warns(PerturbativeWarning):
        dressed_states_first_order(params)


def test_effective_coupling_pt():
    params = SystemParams.reference_device()
    value = effective_coupling_pt(params, DriveParams(omega_amp=ghz(0.05)))
    assert_allclose(value, mhz(-1.4716), rtol=1e-3)
    for phi in np.linspace(-np.pi, np.pi, 7):
        rotated = effective_coupling_pt(params, DriveParams(omega_amp=ghz(0.05), phi=phi))
        assert_allclose(rotated, value * np.exp(1j * phi), rtol=1e-12)
    assert effective_coupling_pt(params, DriveParams()) == 0
    ladder = coupling_ladder(params, DriveParams(omega_amp=ghz(0.05)))
    assert len(ladder) == params.n_fock - 1
    assert_allclose(ladder / ladder[0], np.sqrt(np.arange(1, params.n_fock)), rtol=1e-12)
    singular = SystemParams(omega_ge=ghz(7.5), omega_r=ghz(7.5), g=mhz(65), alpha=ghz(-0.376))
    with pytest.raises(SingularityError):
        effective_coupling_pt(singular, DriveParams(omega_amp=ghz(0.05)))


def test_lambda_bound_first_order():
    drive = DriveParams(omega_amp=ghz(0.1))
    for alpha in np.linspace(-0.5, -0.05, 10):
        params = SystemParams(omega_ge=ghz(8.103), omega_r=ghz(7.126), g=mhz(65),
                              alpha=ghz(alpha))
        ratio = abs(effective_coupling_pt(params, drive)) / abs(lambda_system_coupling(params, drive))
        assert ratio < 1, (alpha, ratio)
    params = SystemParams(omega_ge=ghz(8.103), omega_r=ghz(7.126), g=mhz(65), alpha=ghz(-1000))
    assert_allclose(abs(effective_coupling_pt(params, drive)),
                    abs(lambda_system_coupling(params, drive, ef_matrix_element=True)),
                    rtol=2e-3)


def test_exact_splitting_phase_invariance():
    params = SystemParams.reference_device(4, 4)
    rng = np.random.default_rng(11)
    for _ in range(50):
        omega_amp = ghz(rng.uniform(0.02, 0.2))
        omega_d = params.omega_bare + mhz(rng.uniform(-10, 25))
        reference = exact_splitting(params, DriveParams(omega_amp=omega_amp, omega_d=omega_d))
        phi = rng.uniform(-np.pi, np.pi)
        rotated = exact_splitting(params, DriveParams(omega_amp=omega_amp, phi=phi,
                                                      omega_d=omega_d))
        assert_allclose(rotated, reference, rtol=1e-9)


def test_pair_indices():
    params = SystemParams.reference_device(4, 4)
    _, f_state = dressed_state(params, F0)
    _, g_state = dressed_state(params, G1)
    h = build_hamiltonian(params, DriveParams(omega_amp=ghz(0.1), omega_d=params.omega_bare))
    spec = diagonalize(h, params.n_fock)
    (lower, upper), weight = pair_indices(spec, f_state, g_state)
    assert lower < upper
    assert np.all(weight > 0.9), repr(weight)
    with warnings.catch_warnings():
        warnings.simplefilter('error')
        assert exact_splitting(params, DriveParams(omega_amp=ghz(0.1),
                                                   omega_d=params.omega_bare)) > 0
