"""Amplitude-dependent resonant drive frequency and exact effective
coupling by parallel transport of the resonant |f0>_D, |g1>_D pair.

Starting from the degenerate pair ``(|f0>_D +- |g1>_D)/sqrt(2)`` at
Omega = 0, the drive frequency is advanced so that the tracked
eigenvectors stay parallel transported:
``<Phi_1|dH/dOmega|Phi_2> + omega_d'(Omega) <Phi_1|dH/domega_d|Phi_2> = 0``.
In the resulting basis the two-level effective Hamiltonian has equal
diagonal elements and the coupling is half the eigenenergy splitting.
"""
# Author: ramancoupling developers
# Created: October 2026

__all__ = ['StarkSolution', 'initial_drive_frequency',
           'stark_parallel_transport', 'effective_coupling_exact',
           'transport_residual', 'resonance_certificate', 'read_stark_csv',
           'STARK_CSV_HEADER']

import logging
import warnings
from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.linalg
import scipy.optimize
from scipy.interpolate import PchipInterpolator

from .errors import (BracketingError, DomainError, MonotonicityWarning,
                     RangeError, SingularityError, TrackingError)
from .model import (DriveParams, FREQUENCY_SCALE, build_hjc, drive_derivative,
                    excitation_number, frequency_derivative)
from .spectral import F0, G1, dressed_state
from .utils import read_csv, write_csv

log = logging.getLogger(__name__)

STARK_CSV_HEADER = ['omega_2pi_ghz', 'omega_d_2pi_ghz', 'gtilde_2pi_mhz',
                    'e_offset_2pi_mhz']
STEPS_PER_GHZ = 100
TRACKING_THRESHOLD = 0.9
METHODS = ('midpoint', 'euler')


@dataclass(frozen=True, eq=False)
class StarkSolution:
    """Resonant drive frequency and effective coupling on an amplitude grid.

    Attributes
    ----------
    omega_grid : ndarray
      Ascending drive amplitudes starting at 0.
    omega_d_of_omega : ndarray
      Resonant drive frequency per amplitude.
    gtilde_of_omega : ndarray
      Effective coupling ``(E_1 - E_2)/2``.
    e_offset : ndarray
      Mean pair energy ``(E_1 + E_2)/2`` in the frame of the drive.
    phi_pair : ndarray or None
      Tracked eigenvectors, shape ``(n_points, dim, 2)``.
    method : str
    """
    omega_grid: np.ndarray
    omega_d_of_omega: np.ndarray
    gtilde_of_omega: np.ndarray
    e_offset: np.ndarray
    phi_pair: np.ndarray = None
    method: str = 'midpoint'

    def __post_init__(self):
        grid = np.asarray(self.omega_grid)
        if grid.ndim != 1 or len(grid) == 0 or grid[0] != 0:
            raise DomainError('amplitude grid must start at 0')
        if np.any(np.diff(grid) <= 0):
            raise DomainError('amplitude grid must be strictly increasing')

    @property
    def omega_d0(self):
        return self.omega_d_of_omega[0]

    @property
    def omega_max(self):
        return self.omega_grid[-1]

    @property
    def delta_f0g1(self):
        """Stark shift omega_d(Omega) - omega_d(0) on the grid."""
        return self.omega_d_of_omega - self.omega_d0

    def _interpolator(self, values):
        if len(self.omega_grid) == 1:
            return lambda omega: np.full(np.shape(omega), values[0], dtype=float)
        return PchipInterpolator(self.omega_grid, values, extrapolate=False)

    @cached_property
    def _gtilde(self):
        return self._interpolator(self.gtilde_of_omega)

    @cached_property
    def _omega_d(self):
        return self._interpolator(self.omega_d_of_omega)

    @cached_property
    def _peak(self):
        magnitude = np.abs(self.gtilde_of_omega)
        falling = np.flatnonzero(np.diff(magnitude) < 0)
        return int(falling[0]) if len(falling) else len(magnitude) - 1

    def _check_range(self, omega):
        omega = np.asarray(omega, dtype=float)
        slack = 1e-12 * max(self.omega_max, FREQUENCY_SCALE)
        if np.any(omega < -slack) or np.any(omega > self.omega_max + slack):
            raise RangeError('amplitude outside the solved range [0, %.6g] rad/s'
                             % self.omega_max)
        return np.clip(omega, 0.0, self.omega_max)

    def effective_coupling(self, omega):
        return self._gtilde(self._check_range(omega))[()]

    def drive_frequency(self, omega):
        return self._omega_d(self._check_range(omega))[()]

    def stark_shift(self, omega):
        return self.drive_frequency(omega) - self.omega_d0

    @property
    def max_gtilde(self):
        """Largest |g~| on the monotone part of the curve."""
        return abs(self.gtilde_of_omega[self._peak])

    def omega_for_gtilde(self, gtilde):
        """Invert |g~(Omega)| by bisection on its monotone branch.

        Couplings beyond the first maximum raise :class:`RangeError`;
        the post-peak branch is never used.
        """
        target = abs(gtilde)
        if target == 0:
            return 0.0
        if self._peak < len(self.omega_grid) - 1:
            warnings.warn('g~(Omega) turns over at Omega/2pi = %.4g GHz; only the '
                          'monotone branch is inverted'
                          % (self.omega_grid[self._peak] / FREQUENCY_SCALE),
                          MonotonicityWarning, stacklevel=2)
        if target > self.max_gtilde * (1 + 1e-12):
            raise RangeError('|g~|/2pi = %.6g MHz exceeds the monotone maximum %.6g MHz'
                             % (target / FREQUENCY_SCALE * 1e3,
                                self.max_gtilde / FREQUENCY_SCALE * 1e3))
        upper = self.omega_grid[self._peak]
        target = min(target, self.max_gtilde)

        def excess(omega):
            return abs(float(self._gtilde(omega))) - target
        return scipy.optimize.bisect(excess, 0.0, upper, xtol=1e-13 * upper,
                                     rtol=4 * np.finfo(float).eps, maxiter=200)

    def to_csv(self, path):
        rows = zip(self.omega_grid / FREQUENCY_SCALE,
                   self.omega_d_of_omega / FREQUENCY_SCALE,
                   self.gtilde_of_omega / FREQUENCY_SCALE * 1e3,
                   self.e_offset / FREQUENCY_SCALE * 1e3)
        write_csv(path, STARK_CSV_HEADER, rows, fmt='%.15g')


def read_stark_csv(path):
    """Load a :class:`StarkSolution` written by :meth:`StarkSolution.to_csv`."""
    columns = read_csv(path, STARK_CSV_HEADER)
    return StarkSolution(omega_grid=columns[0] * FREQUENCY_SCALE,
                         omega_d_of_omega=columns[1] * FREQUENCY_SCALE,
                         gtilde_of_omega=columns[2] * FREQUENCY_SCALE * 1e-3,
                         e_offset=columns[3] * FREQUENCY_SCALE * 1e-3)


def effective_coupling_exact(solution, omega_amp):
    """Interpolated effective coupling g~(Omega) of a transport solution."""
    return solution.effective_coupling(omega_amp)


def _dressed_gap(params, omega_d):
    e_f, _ = dressed_state(params, F0, omega_d)
    e_g, _ = dressed_state(params, G1, omega_d)
    return e_f - e_g


def initial_drive_frequency(params):
    """Drive frequency making |f0>_D and |g1>_D degenerate at Omega = 0.

    The root of the dressed gap is bracketed by omega_bare +- 10 g,
    omega_bare = 2 omega_ge + alpha - omega_r. For g = 0 the bare
    resonance is returned.
    """
    if params.g == 0:
        return params.omega_bare
    params.check_dispersive()
    low, high = params.omega_bare - 10 * params.g, params.omega_bare + 10 * params.g
    gap_low, gap_high = _dressed_gap(params, low), _dressed_gap(params, high)
    if np.sign(gap_low) == np.sign(gap_high):
        raise BracketingError('no f0-g1 degeneracy within omega_bare +- 10 g '
                              '(gaps %.4g, %.4g rad/s)' % (gap_low, gap_high))
    return scipy.optimize.brentq(lambda w: _dressed_gap(params, w), low, high,
                                 xtol=1e-15 * params.omega_bare, maxiter=200)


class _Transport:
    """Pair tracking on H(Omega, omega_d) for one parameter set."""

    def __init__(self, params, omega_d0):
        self.params = params
        self.omega_d0 = omega_d0
        self.h_ref = build_hjc(params, DriveParams(omega_d=omega_d0))
        self.d_omega = drive_derivative(params, 0.0)
        self.d_freq = frequency_derivative(params)
        self.number = np.diag(excitation_number(params))

    def hamiltonian(self, omega, omega_d):
        h = self.h_ref + omega * self.d_omega
        h[np.diag_indices_from(h)] -= (omega_d - self.omega_d0) * self.number
        return h

    def eigenpair(self, omega, omega_d, previous):
        values, vectors = scipy.linalg.eigh(self.hamiltonian(omega, omega_d))
        overlaps = previous.conj().T @ vectors
        weight = (np.abs(overlaps) ** 2).sum(axis=0)
        p, q = np.argsort(weight)[::-1][:2]
        if min(weight[p], weight[q]) < TRACKING_THRESHOLD:
            raise TrackingError('lost the f0-g1 pair at Omega/2pi = %.6g GHz '
                                '(weight %.3f)' % (omega / FREQUENCY_SCALE,
                                                  min(weight[p], weight[q])), omega)
        a = np.abs(overlaps) ** 2
        if a[0, p] + a[1, q] < a[0, q] + a[1, p]:
            p, q = q, p
        pair = vectors[:, [p, q]].astype(complex)
        for i, n in enumerate((p, q)):
            s = overlaps[i, n]
            pair[:, i] *= s.conj() / abs(s)
        return values[[p, q]], pair

    def slope(self, pair):
        num = (pair[:, 0].conj() @ self.d_omega @ pair[:, 1]).real
        den = (pair[:, 0].conj() @ self.d_freq @ pair[:, 1]).real
        if abs(den) < 1e-9:
            raise SingularityError('<Phi_1|dH/domega_d|Phi_2> vanishes (%.3g)' % den)
        return -num / den

    @staticmethod
    def mismatch(previous, pair):
        """Antisymmetric part of the overlap matrix between two steps."""
        return 0.5 * (previous[:, 1].conj() @ pair[:, 0]
                      - previous[:, 0].conj() @ pair[:, 1]).real

    def corrected(self, omega, guess, previous):
        """Solve for the drive frequency whose pair is the transported one."""
        energies, pair = self.eigenpair(omega, guess, previous)
        scale = max(abs(energies[0] - energies[1]), 1.0)

        def mismatch(omega_d):
            return self.mismatch(previous, self.eigenpair(omega, omega_d, previous)[1])
        start = mismatch(guess)
        if start == 0:
            return guess
        root, info = scipy.optimize.newton(mismatch, guess, x1=guess + 1e-3 * scale,
                                           tol=1e-10 * scale, maxiter=50,
                                           full_output=True, disp=False)
        if not info.converged:
            log.warning('transport corrector did not converge at Omega/2pi = %.6g GHz: %s',
                        omega / FREQUENCY_SCALE, info.flag)
            if abs(mismatch(root)) > abs(start):
                return guess
        return root


def _check_grid(omega_max, n_steps):
    if not np.isfinite(omega_max) or omega_max < 0:
        raise DomainError('omega_max must be non-negative, got %r' % (omega_max,))
    if omega_max == 0:
        return np.zeros(1)
    needed = STEPS_PER_GHZ * omega_max / FREQUENCY_SCALE
    if n_steps < max(needed, 1):
        raise DomainError('%d steps are too coarse for Omega/2pi up to %.4g GHz; '
                          'need at least %d' % (n_steps, omega_max / FREQUENCY_SCALE,
                                                int(np.ceil(needed))))
    return np.linspace(0.0, omega_max, int(n_steps) + 1)


def stark_parallel_transport(params, omega_max, n_steps, method='midpoint'):
    """Solve omega_d(Omega) and g~(Omega) by parallel transport.

    Parameters
    ----------
    params : SystemParams
    omega_max : float
      Largest drive amplitude.
    n_steps : int
      Number of amplitude steps, at least 100 per 2pi x GHz.
    method : {'midpoint', 'euler'}
      ``'euler'`` follows the plain forward-Euler update of omega_d.
      ``'midpoint'`` takes a midpoint predictor and then corrects
      omega_d until the new eigenpair is the parallel transport of the
      previous one (symmetric overlap matrix).

    Returns
    -------
    solution : StarkSolution

    See also
    --------
    initial_drive_frequency, effective_coupling_exact
    """
    if method not in METHODS:
        raise DomainError('method must be one of %s, got %r' % (METHODS, method))
    grid = _check_grid(omega_max, n_steps)
    omega_d0 = initial_drive_frequency(params)
    if params.g == 0:
        return _decoupled_transport(params, grid, omega_d0, method)
    _, f_state = dressed_state(params, F0)
    _, g_state = dressed_state(params, G1)
    pair = np.column_stack([f_state + g_state, f_state - g_state]) / np.sqrt(2)
    transport = _Transport(params, omega_d0)
    h0 = transport.hamiltonian(0.0, omega_d0)
    energies = np.array([(pair[:, i].conj() @ h0 @ pair[:, i]).real for i in range(2)])

    omega_d = np.empty(len(grid))
    gtilde = np.empty(len(grid))
    offset = np.empty(len(grid))
    pairs = np.empty((len(grid), params.dim, 2), dtype=complex)
    omega_d[0], pairs[0] = omega_d0, pair
    gtilde[0], offset[0] = 0.5 * (energies[0] - energies[1]), 0.5 * energies.sum()
    for i in range(1, len(grid)):
        step = grid[i] - grid[i - 1]
        previous = pairs[i - 1]
        if method == 'euler':
            new = omega_d[i - 1] + step * transport.slope(previous)
        else:
            k1 = transport.slope(previous)
            half = grid[i - 1] + 0.5 * step
            _, mid = transport.eigenpair(half, omega_d[i - 1] + 0.5 * step * k1, previous)
            guess = omega_d[i - 1] + step * transport.slope(mid)
            new = transport.corrected(grid[i], guess, previous)
        energies, pairs[i] = transport.eigenpair(grid[i], new, previous)
        omega_d[i] = new
        gtilde[i] = 0.5 * (energies[0] - energies[1])
        offset[i] = 0.5 * (energies[0] + energies[1])
        if i % 100 == 0:
            log.debug('transport step %d/%d: Omega/2pi=%.4g GHz shift/2pi=%.6g MHz',
                      i, len(grid) - 1, grid[i] / FREQUENCY_SCALE,
                      (new - omega_d0) / FREQUENCY_SCALE * 1e3)
    log.info('parallel transport (%s) to Omega/2pi=%.4g GHz in %d steps: '
             'g~/2pi=%.6g MHz', method, grid[-1] / FREQUENCY_SCALE, len(grid) - 1,
             gtilde[-1] / FREQUENCY_SCALE * 1e3)
    return StarkSolution(grid, omega_d, gtilde, offset, pairs, method)


def _transmon_block(params, omega, omega_d):
    k = np.arange(params.n_transmon)
    h = np.diag(k * (params.omega_ge - omega_d) + 0.5 * params.alpha * k * (k - 1))
    b = np.diag(np.sqrt(np.arange(1, params.n_transmon, dtype=float)), 1)
    values, vectors = scipy.linalg.eigh(h + 0.5 * omega * (b + b.T))
    f_index = int(np.argmax(np.abs(vectors[2])))
    g_index = int(np.argmax(np.abs(vectors[0])))
    return values[f_index], vectors[:, f_index], values[g_index], vectors[:, g_index]


def _decoupled_transport(params, grid, omega_d0, method):
    """g = 0: f0 and g1 never couple, only the Stark shift is tracked."""
    def gap(omega, omega_d):
        e_f, _, e_g, _ = _transmon_block(params, omega, omega_d)
        return e_f - e_g - (params.omega_r - omega_d)

    omega_d = np.empty(len(grid))
    offset = np.empty(len(grid))
    pairs = np.zeros((len(grid), params.dim, 2), dtype=complex)
    current = omega_d0
    for i, omega in enumerate(grid):
        if omega > 0:
            width = 2 * np.pi * 5e7
            for _ in range(8):
                low, high = current - width, current + width
                if np.sign(gap(omega, low)) != np.sign(gap(omega, high)):
                    break
                width *= 2
            else:
                raise BracketingError('no f0-g1 degeneracy near %.6g rad/s at Omega=%.6g'
                                      % (current, omega))
            current = scipy.optimize.brentq(lambda w: gap(omega, w), low, high,
                                            xtol=1e-15 * current, maxiter=200)
        e_f, v_f, e_g, v_g = _transmon_block(params, omega, current)
        f_state = np.kron(v_f * np.sign(v_f[2]), np.eye(params.n_fock)[0])
        g_state = np.kron(v_g * np.sign(v_g[0]), np.eye(params.n_fock)[1])
        pairs[i] = np.column_stack([f_state + g_state, f_state - g_state]) / np.sqrt(2)
        omega_d[i] = current
        offset[i] = e_f
    return StarkSolution(grid, omega_d, np.zeros(len(grid)), offset, pairs, method)


def transport_residual(solution):
    """Largest per-step off-diagonal transport defect of the tracked pair.

    Uses the central difference
    ``|<Phi_1(i)|Phi_2(i+1)> - <Phi_1(i)|Phi_2(i-1)>| / 2``.
    """
    pairs = solution.phi_pair
    if pairs is None or len(pairs) < 3:
        return 0.0
    forward = np.einsum('ij,ij->i', pairs[1:-1, :, 0].conj(), pairs[2:, :, 1])
    backward = np.einsum('ij,ij->i', pairs[1:-1, :, 0].conj(), pairs[:-2, :, 1])
    return float(np.abs(forward - backward).max() / 2)


def resonance_certificate(params, solution):
    """Largest diagonal difference of the effective Hamiltonian.

    H is rebuilt at every grid point with the solved drive frequency and
    projected on ``(Phi_1 +- Phi_2)/sqrt(2)``.
    """
    if solution.phi_pair is None:
        raise DomainError('the solution carries no eigenvectors')
    transport = _Transport(params, solution.omega_d0)
    worst = 0.0
    for omega, omega_d, pair in zip(solution.omega_grid, solution.omega_d_of_omega,
                                    solution.phi_pair):
        h = transport.hamiltonian(omega, omega_d)
        f_like = (pair[:, 0] + pair[:, 1]) / np.sqrt(2)
        g_like = (pair[:, 0] - pair[:, 1]) / np.sqrt(2)
        difference = (f_like.conj() @ h @ f_like - g_like.conj() @ h @ g_like).real
        worst = max(worst, abs(difference))
    return worst
