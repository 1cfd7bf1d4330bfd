"""Device parameters, basis labels and the driven transmon-resonator
Hamiltonian.

All frequencies are angular frequencies in rad/s. Operators act on the
composite space ``transmon (x) resonator`` and a bare product state
``|k, l>`` (transmon level ``k``, ``l`` photons) has composite index
``k * n_fock + l``.
"""
# Author: ramancoupling developers
# Created: October 2026

__all__ = ['SystemParams', 'DriveParams', 'BasisLabel', 'FREQUENCY_SCALE',
           'DEFAULT_MAX_DIM', 'build_hjc', 'build_hdrive',
           'build_hamiltonian', 'drive_derivative', 'frequency_derivative',
           'excitation_number', 'transmon_lowering', 'resonator_lowering',
           'bare_energies', 'hermiticity_defect', 'guard_population',
           'check_truncation', 'transmon_frequency_estimate']

import logging
import warnings
from dataclasses import dataclass, replace

import numpy as np

from .errors import DomainError, SizeError, DispersiveWarning, TruncationWarning

log = logging.getLogger(__name__)

#: 2*pi x 1 GHz, the frequency scale used for relative tolerances.
FREQUENCY_SCALE = 2 * np.pi * 1e9
DEFAULT_MAX_DIM = 4096
GUARD_THRESHOLD = 1e-6
LEVEL_NAMES = 'gefhijklmnopqrstuvwxyz'


@dataclass(frozen=True)
class SystemParams:
    """Static device parameters and Hilbert-space truncation.

    Attributes
    ----------
    omega_ge : float
      Bare g-e transition frequency.
    omega_r : float
      Bare resonator frequency.
    g : float
      Transmon-resonator coupling, ``g >= 0``.
    alpha : float
      Anharmonicity, negative.
    kappa, gamma : float
      Resonator and transmon decay rates. Only the spectroscopy
      response uses them.
    n_transmon : int
      Number of transmon levels, at least 3.
    n_fock : int
      Number of resonator Fock states, at least 2.
    """
    omega_ge: float
    omega_r: float
    g: float
    alpha: float
    kappa: float = 0.0
    gamma: float = 0.0
    n_transmon: int = 5
    n_fock: int = 6

    def __post_init__(self):
        for name in ('omega_ge', 'omega_r', 'g', 'alpha', 'kappa', 'gamma'):
            value = getattr(self, name)
            if isinstance(value, bool) or not np.isfinite(value):
                raise DomainError('%s must be a finite number, got %r' % (name, value))
        if not self.alpha < 0:
            raise DomainError('anharmonicity must be negative, got %r' % (self.alpha,))
        if self.g < 0:
            raise DomainError('coupling g must be non-negative, got %r' % (self.g,))
        if self.kappa < 0 or self.gamma < 0:
            raise DomainError('decay rates must be non-negative, got kappa=%r gamma=%r'
                              % (self.kappa, self.gamma))
        if int(self.n_transmon) != self.n_transmon or self.n_transmon < 3:
            raise DomainError('n_transmon must be an integer >= 3, got %r' % (self.n_transmon,))
        if int(self.n_fock) != self.n_fock or self.n_fock < 2:
            raise DomainError('n_fock must be an integer >= 2, got %r' % (self.n_fock,))

    @classmethod
    def reference_device(cls, n_transmon=5, n_fock=6, delta=None, gamma=0.0):
        """Return the device quoted in the measurements.

        omega_ge/2pi = 8.103 GHz, omega_r/2pi = 7.126 GHz,
        g/2pi = 65 MHz, alpha/2pi = -0.376 GHz, kappa/2pi = 6.6 MHz.
        When ``delta`` is given the transmon frequency is moved to
        ``omega_r + delta``.
        """
        ghz = FREQUENCY_SCALE
        omega_r = 7.126 * ghz
        omega_ge = 8.103 * ghz if delta is None else omega_r + delta
        return cls(omega_ge=omega_ge, omega_r=omega_r, g=0.065 * ghz,
                   alpha=-0.376 * ghz, kappa=0.0066 * ghz, gamma=gamma,
                   n_transmon=n_transmon, n_fock=n_fock)

    @property
    def dim(self):
        return self.n_transmon * self.n_fock

    @property
    def delta(self):
        """Qubit-resonator detuning omega_ge - omega_r."""
        return self.omega_ge - self.omega_r

    @property
    def omega_bare(self):
        """Drive frequency making |f0> and |g1> degenerate when g = 0."""
        return 2 * self.omega_ge + self.alpha - self.omega_r

    @property
    def dispersive_ratio(self):
        if self.delta == 0:
            return np.inf
        return abs(self.g / self.delta)

    def is_dispersive(self, threshold=0.5):
        return self.dispersive_ratio < threshold

    def check_dispersive(self, threshold=0.5):
        """Warn when |g/Delta| is not below ``threshold``."""
        ok = self.is_dispersive(threshold)
        if not ok:
            warnings.warn('outside the dispersive regime: |g/Delta|=%.3g'
                          % (self.dispersive_ratio), DispersiveWarning, stacklevel=2)
        return ok

    def require_level(self, level):
        if level >= self.n_transmon:
            raise SizeError('transmon level %s needs n_transmon > %d, have %d'
                            % (LEVEL_NAMES[level], level, self.n_transmon))

    def require_photons(self, photons):
        if photons >= self.n_fock:
            raise SizeError('%d photons need n_fock > %d, have %d'
                            % (photons, photons, self.n_fock))

    def label(self, index, dressed=False):
        return BasisLabel.from_index(index, self.n_fock, dressed=dressed)

    def index(self, label):
        label = BasisLabel.coerce(label)
        self.require_level(label.level)
        self.require_photons(label.photons)
        return label.index(self.n_fock)

    def truncated(self, n_transmon, n_fock):
        return replace(self, n_transmon=n_transmon, n_fock=n_fock)


@dataclass(frozen=True)
class DriveParams:
    """Transmon drive: amplitude, phase and frequency.

    The detunings are computed from the current ``omega_d`` on every
    call, so a copy made with :meth:`at_frequency` never carries stale
    values.
    """
    omega_amp: float = 0.0
    phi: float = 0.0
    omega_d: float = 0.0

    def __post_init__(self):
        if not np.isfinite(self.omega_amp) or self.omega_amp < 0:
            raise DomainError('drive amplitude must be non-negative, got %r' % (self.omega_amp,))
        if not (np.isfinite(self.phi) and np.isfinite(self.omega_d)):
            raise DomainError('drive phase and frequency must be finite')

    def delta_r(self, params):
        return params.omega_r - self.omega_d

    def delta_q(self, params):
        return params.omega_ge - self.omega_d

    def at_frequency(self, omega_d):
        return replace(self, omega_d=omega_d)

    def at_amplitude(self, omega_amp):
        return replace(self, omega_amp=omega_amp)


@dataclass(frozen=True, order=True)
class BasisLabel:
    """Product-state label ``|level, photons>``, e.g. ``f0`` or ``g1``.

    ``dressed`` marks the eigenstate of the undriven Jaynes-Cummings
    Hamiltonian connected to the bare state.
    """
    level: int
    photons: int
    dressed: bool = False

    def __post_init__(self):
        if self.level < 0 or self.photons < 0:
            raise DomainError('invalid basis label (%r, %r)' % (self.level, self.photons))

    @classmethod
    def parse(cls, text, dressed=None):
        """Parse ``'f0'``, ``'g1'`` or ``'f0D'``."""
        text = text.strip()
        is_dressed = text.endswith('D')
        if is_dressed:
            text = text[:-1]
        if len(text) < 2 or text[0] not in LEVEL_NAMES or not text[1:].isdigit():
            raise DomainError('cannot parse basis label %r' % (text,))
        if dressed is not None:
            is_dressed = dressed
        return cls(LEVEL_NAMES.index(text[0]), int(text[1:]), is_dressed)

    @classmethod
    def coerce(cls, label):
        if isinstance(label, cls):
            return label
        return cls.parse(label)

    @classmethod
    def from_index(cls, index, n_fock, dressed=False):
        return cls(int(index) // n_fock, int(index) % n_fock, dressed)

    def index(self, n_fock):
        if self.photons >= n_fock:
            raise SizeError('%s is outside a %d-state Fock truncation' % (self, n_fock))
        return self.level * n_fock + self.photons

    @property
    def excitations(self):
        return self.level + self.photons

    def as_dressed(self, dressed=True):
        return replace(self, dressed=dressed)

    def __str__(self):
        return '%s%d%s' % (LEVEL_NAMES[self.level], self.photons,
                           'D' if self.dressed else '')


def _destroy(n):
    return np.diag(np.sqrt(np.arange(1, n, dtype=float)), 1)


def transmon_lowering(params):
    """The operator b = |g><e| + sqrt(2)|e><f| + ... on the full space."""
    return np.kron(_destroy(params.n_transmon), np.eye(params.n_fock))


def resonator_lowering(params):
    return np.kron(np.eye(params.n_transmon), _destroy(params.n_fock))


def _levels(params):
    k = np.repeat(np.arange(params.n_transmon), params.n_fock)
    l = np.tile(np.arange(params.n_fock), params.n_transmon)
    return k, l


def excitation_number(params):
    """Total excitation number a'a + b'b."""
    k, l = _levels(params)
    return np.diag((k + l).astype(float))


def bare_energies(params, omega_d):
    """Diagonal of H_JC in the frame rotating at ``omega_d``."""
    k, l = _levels(params)
    delta_r = params.omega_r - omega_d
    delta_q = params.omega_ge - omega_d
    return l * delta_r + k * delta_q + 0.5 * params.alpha * k * (k - 1)


def _check_dim(params, max_dim):
    if params.dim > max_dim:
        raise SizeError('Hilbert dimension %d exceeds the maximum %d'
                        % (params.dim, max_dim))


def coupling_operator(params):
    """g (a b' + a' b)."""
    a = resonator_lowering(params)
    b = transmon_lowering(params)
    return params.g * (a @ b.T + a.T @ b)


def build_hjc(params, drive, max_dim=DEFAULT_MAX_DIM):
    """Return the undriven Jaynes-Cummings Hamiltonian in the drive frame.

    Parameters
    ----------
    params : SystemParams
    drive : DriveParams
      Only ``omega_d`` is used.
    max_dim : int
      Largest accepted Hilbert dimension.

    Returns
    -------
    h : ndarray
      Complex ``(dim, dim)`` Hermitian matrix
      ``delta_r a'a + delta_q b'b + alpha/2 b'b'bb + g(ab' + a'b)``.

    See also
    --------
    build_hdrive, build_hamiltonian
    """
    _check_dim(params, max_dim)
    h = coupling_operator(params).astype(complex)
    h[np.diag_indices(params.dim)] += bare_energies(params, drive.omega_d)
    return h


def drive_derivative(params, phi=0.0):
    """dH/dOmega = (exp(i phi) b + exp(-i phi) b') / 2."""
    b = transmon_lowering(params)
    return 0.5 * (np.exp(1j * phi) * b + np.exp(-1j * phi) * b.T)


def frequency_derivative(params):
    """dH/domega_d = -(a'a + b'b)."""
    return -excitation_number(params).astype(complex)


def build_hdrive(params, drive, max_dim=DEFAULT_MAX_DIM):
    """Return the drive term (Omega/2)(exp(i phi) b + exp(-i phi) b')."""
    _check_dim(params, max_dim)
    return drive.omega_amp * drive_derivative(params, drive.phi)


def build_hamiltonian(params, drive, max_dim=DEFAULT_MAX_DIM):
    return build_hjc(params, drive, max_dim) + build_hdrive(params, drive, max_dim)


def hermiticity_defect(h):
    """Return max|H - H'| / max|H| (0 for the zero matrix)."""
    h = np.asarray(h)
    scale = np.abs(h).max() if h.size else 0.0
    if scale == 0:
        return 0.0
    return np.abs(h - h.conj().T).max() / scale


def guard_population(params, state):
    """Population of the topmost transmon level and the topmost Fock state.

    ``state`` is a state vector or an array whose last axis runs over
    the composite basis; the maxima over the leading axes are returned.
    """
    state = np.asarray(state)
    p = np.abs(state.reshape(-1, params.n_transmon, params.n_fock)) ** 2
    p_transmon = p[:, -1, :].sum(axis=-1).max()
    p_fock = p[:, :, -1].sum(axis=-1).max()
    return p_transmon, p_fock


def check_truncation(params, state, threshold=GUARD_THRESHOLD):
    """Warn when guard levels carry more than ``threshold`` population."""
    p_transmon, p_fock = guard_population(params, state)
    if max(p_transmon, p_fock) > threshold:
        warnings.warn('guard-level population %.3g (transmon level %s) and %.3g '
                      '(Fock state %d) exceeds %g; increase the truncation'
                      % (p_transmon, LEVEL_NAMES[params.n_transmon - 1], p_fock,
                         params.n_fock - 1, threshold),
                      TruncationWarning, stacklevel=2)
        return False
    return True


def transmon_frequency_estimate(ej, ec):
    """Closed-form transmon estimate from E_J/h and E_C/h (in Hz).

    Returns ``(omega_ge, alpha)`` with omega_ge = 2pi (sqrt(8 E_J E_C) - E_C)
    and alpha = -2pi E_C. This is an estimate only.
    """
    if not (ec > 0 and ej > 20 * ec):
        raise DomainError('transmon limit requires E_J > 20 E_C, got E_J=%r E_C=%r'
                          % (ej, ec))
    return 2 * np.pi * (np.sqrt(8 * ej * ec) - ec), -2 * np.pi * ec
