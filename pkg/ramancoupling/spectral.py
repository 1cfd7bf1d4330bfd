"""Exact diagonalization, dressed-state identification and the
perturbative effective coupling between |f0>_D and |g1>_D.
"""
# Author: ramancoupling developers
# Created: October 2026

__all__ = ['SpectralResult', 'diagonalize', 'label_dressed_states',
           'dressed_state', 'dressed_states_first_order',
           'effective_coupling_pt', 'coupling_ladder',
           'lambda_system_coupling', 'pair_indices', 'exact_splitting',
           'F0', 'G1', 'G0']

import logging
import warnings
from dataclasses import dataclass, field, replace

import numpy as np
import scipy.linalg

from .errors import (ContractError, LabelingError, LabelingWarning,
                     PerturbativeWarning, SingularityError)
from .model import BasisLabel, build_hamiltonian, build_hjc, DriveParams

log = logging.getLogger(__name__)

F0 = BasisLabel(2, 0)
G1 = BasisLabel(0, 1)
G0 = BasisLabel(0, 0)

HERMITIAN_RTOL = 1e-12
DEGENERACY_RTOL = 1e-12


@dataclass(frozen=True, eq=False)
class SpectralResult:
    """Eigen-decomposition of a Hamiltonian.

    Attributes
    ----------
    eigenvalues : ndarray
      Ascending real eigenvalues.
    eigenvectors : ndarray
      Orthonormal eigenvectors stored as columns.
    labels : dict
      Map from dressed :class:`BasisLabel` to eigenindex.
    n_fock : int or None
      Fock truncation, needed to translate labels to indices.
    """
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    labels: dict = field(default_factory=dict)
    n_fock: int = None

    def __len__(self):
        return len(self.eigenvalues)

    def index_of(self, label):
        return self.labels[BasisLabel.coerce(label).as_dressed()]

    def energy(self, label):
        return self.eigenvalues[self.index_of(label)]

    def vector(self, label):
        return self.eigenvectors[:, self.index_of(label)]


def _fix_phases(vectors):
    """Make the largest-magnitude component of each column real positive."""
    rows = np.argmax(np.abs(vectors), axis=0)
    pivots = vectors[rows, np.arange(vectors.shape[1])]
    return vectors * (pivots.conj() / np.abs(pivots))


def _align_cluster(vectors):
    """Rotate a degenerate block onto its dominant bare states.

    With ``B = V[rows]`` and ``B = W S Z'`` the rotated block
    ``V Z W'`` has a Hermitian positive restriction to ``rows``.
    """
    m = vectors.shape[1]
    weight = (np.abs(vectors) ** 2).sum(axis=1)
    rows = np.sort(np.argsort(weight)[::-1][:m])
    w, s, zh = np.linalg.svd(vectors[rows])
    return vectors @ (zh.conj().T @ w.conj().T)


def diagonalize(h, n_fock=None):
    """Diagonalize a Hermitian matrix with a reproducible phase convention.

    Parameters
    ----------
    h : array_like
      Hermitian matrix.
    n_fock : int, optional
      Fock truncation, stored for later labeling.

    Returns
    -------
    result : SpectralResult
      Eigenvalues ascending. Degenerate clusters are rotated onto the
      bare states they overlap with most, then every eigenvector is
      phase-fixed so that its largest component is real positive.

    See also
    --------
    label_dressed_states
    """
    h = np.asarray(h, dtype=complex)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ContractError('expected a square matrix, got shape %s' % (h.shape,))
    scale = np.abs(h).max() if h.size else 0.0
    if scale and np.abs(h - h.conj().T).max() > HERMITIAN_RTOL * scale:
        raise ContractError('matrix is not Hermitian (defect %.3g)'
                            % (np.abs(h - h.conj().T).max() / scale))
    values, vectors = scipy.linalg.eigh(0.5 * (h + h.conj().T))
    tol = DEGENERACY_RTOL * max(scale, 1.0)
    start = 0
    for stop in range(1, len(values) + 1):
        if stop == len(values) or values[stop] - values[stop - 1] > tol:
            if stop - start > 1:
                vectors[:, start:stop] = _align_cluster(vectors[:, start:stop])
            start = stop
    return SpectralResult(values, _fix_phases(vectors), {}, n_fock)


def label_dressed_states(spec, labels=None, threshold=0.5, strict=True):
    """Attach dressed labels to eigenvectors by maximal bare overlap.

    Labels are processed greedily in order of descending overlap. A label
    whose best eigenvector is already taken, or whose squared overlap is
    below ``threshold``, is a conflict: :class:`LabelingError` when
    ``strict``, otherwise a :class:`LabelingWarning` and the label is
    left out.
    """
    if spec.n_fock is None:
        raise ContractError('labeling needs the Fock truncation of the spectrum')
    if labels is None:
        labels = [BasisLabel.from_index(i, spec.n_fock) for i in range(len(spec))]
    labels = [BasisLabel.coerce(label).as_dressed(False) for label in labels]
    rows = [label.index(spec.n_fock) for label in labels]
    overlap2 = np.abs(spec.eigenvectors[rows, :]) ** 2
    best = overlap2.argmax(axis=1)
    best_value = overlap2[np.arange(len(rows)), best]
    assigned, taken, conflicts = {}, set(), []
    for i in np.argsort(-best_value, kind='stable'):
        n = int(best[i])
        if best_value[i] < threshold or n in taken:
            conflicts.append((labels[i], n, float(best_value[i])))
            continue
        taken.add(n)
        assigned[labels[i].as_dressed()] = n
    if conflicts:
        message = 'ambiguous dressed labels: ' + ', '.join(
            '%s->%d (%.3f)' % c for c in conflicts)
        if strict:
            raise LabelingError(message, conflicts)
        warnings.warn(message, LabelingWarning, stacklevel=2)
    return replace(spec, labels=assigned)


def _sector(params, excitations):
    return [k * params.n_fock + (excitations - k)
            for k in range(params.n_transmon)
            if 0 <= excitations - k < params.n_fock]


def dressed_state(params, label, omega_d=0.0, threshold=0.5):
    """Return ``(energy, vector)`` of the dressed state ``|label>_D``.

    H_JC conserves a'a + b'b, so only the excitation sector holding the
    label is diagonalized. The energy refers to the frame rotating at
    ``omega_d``; the vector lives in the full composite space with its
    label component real positive.
    """
    label = BasisLabel.coerce(label)
    row = params.index(label)
    sector = _sector(params, label.excitations)
    h = build_hjc(params, DriveParams(omega_d=omega_d))[np.ix_(sector, sector)]
    values, vectors = scipy.linalg.eigh(h)
    local = sector.index(row)
    n = int(np.argmax(np.abs(vectors[local]) ** 2))
    overlap2 = abs(vectors[local, n]) ** 2
    if overlap2 < threshold:
        raise LabelingError('dressed state %s has overlap %.3f with its bare state'
                            % (label.as_dressed(), overlap2),
                            [(label, n, overlap2)])
    vector = np.zeros(params.dim, dtype=complex)
    vector[sector] = vectors[:, n] * (abs(vectors[local, n]) / vectors[local, n])
    return values[n], vector


def dressed_states_first_order(params, l=0):
    """First-order dressed states ``|f,l>_D`` and ``|g,l+1>_D``.

    The admixture coefficients are
    ``-g sqrt(2(l+1))/(Delta+alpha)`` on ``|e,l+1>``,
    ``+g sqrt(3l)/(Delta+2alpha)`` on ``|h,l-1>`` and
    ``+g sqrt(l+1)/Delta`` on ``|e,l>``. The vectors are not normalized.
    """
    params.require_level(3)
    params.require_photons(l + 1)
    delta, alpha, g = params.delta, params.alpha, params.g
    for value in (delta, delta + alpha, delta + 2 * alpha):
        if value == 0:
            raise SingularityError('vanishing energy denominator in first-order dressing')
    ratio2 = (g / delta) ** 2
    if ratio2 > 0.05:
        warnings.warn('(g/Delta)^2 = %.3g is not small' % ratio2, PerturbativeWarning,
                      stacklevel=2)
    n = params.n_fock
    f_state = np.zeros(params.dim, dtype=complex)
    f_state[2 * n + l] = 1.0
    f_state[1 * n + l + 1] = -g * np.sqrt(2 * (l + 1)) / (delta + alpha)
    if l > 0:
        f_state[3 * n + l - 1] = g * np.sqrt(3 * l) / (delta + 2 * alpha)
    g_state = np.zeros(params.dim, dtype=complex)
    g_state[l + 1] = 1.0
    g_state[1 * n + l] = g * np.sqrt(l + 1) / delta
    return f_state, g_state


def effective_coupling_pt(params, drive, l=0):
    """First-order effective coupling between ``|f,l>_D`` and ``|g,l+1>_D``.

    ``g_l = g Omega exp(i phi) sqrt((l+1)/2) alpha / (Delta (Delta + alpha))``;
    ``l = 0`` gives the coupling of the f0-g1 pair.
    """
    params.require_level(3)
    params.require_photons(l + 1)
    delta, alpha = params.delta, params.alpha
    if delta == 0 or delta + alpha == 0:
        raise SingularityError('effective coupling is singular at Delta=%r, alpha=%r'
                               % (delta, alpha))
    return (params.g * drive.omega_amp * np.exp(1j * drive.phi)
            * np.sqrt((l + 1) / 2.0) * alpha / (delta * (delta + alpha)))


def coupling_ladder(params, drive, l_max=None):
    """Effective couplings g_0 ... g_lmax along the photon ladder."""
    if l_max is None:
        l_max = params.n_fock - 2
    return np.array([effective_coupling_pt(params, drive, l) for l in range(l_max + 1)])


def lambda_system_coupling(params, drive, ef_matrix_element=False):
    """Raman coupling g Omega exp(i phi) / Delta of a three-level Lambda system.

    With ``ef_matrix_element`` the pump strength is the transmon's e-f
    matrix element Omega/sqrt(2); that is the value the transmon
    coupling approaches for large |alpha|. For |alpha| below
    ``sqrt(2) Delta / (1 + sqrt(2))`` the transmon coupling stays below
    the plain Lambda value.
    """
    if params.delta == 0:
        raise SingularityError('Lambda coupling is singular at Delta = 0')
    pump = drive.omega_amp / np.sqrt(2) if ef_matrix_element else drive.omega_amp
    return params.g * pump * np.exp(1j * drive.phi) / params.delta


def pair_indices(spec, f_state, g_state):
    """Indices of the two eigenvectors with most weight on span{f, g}."""
    vectors = spec.eigenvectors
    weight = np.abs(f_state.conj() @ vectors) ** 2 + np.abs(g_state.conj() @ vectors) ** 2
    order = np.argsort(weight)[::-1][:2]
    return tuple(sorted(int(i) for i in order)), weight[order]


def exact_splitting(params, drive):
    """Gap eps_+ - eps_- between the two polaritons built from |f0>_D, |g1>_D.

    The caller supplies the resonant drive frequency. The two
    eigenvectors of the full Hamiltonian with the largest weight on the
    dressed pair are used; a pair weight below 0.5 is a labeling
    failure.
    """
    _, f_state = dressed_state(params, F0)
    _, g_state = dressed_state(params, G1)
    spec = diagonalize(build_hamiltonian(params, drive), params.n_fock)
    (lower, upper), weight = pair_indices(spec, f_state, g_state)
    if weight.min() < 0.5:
        raise LabelingError('polariton pair weight %.3f below 0.5' % weight.min(),
                            [(F0, upper, float(weight.min()))])
    return spec.eigenvalues[upper] - spec.eigenvalues[lower]
