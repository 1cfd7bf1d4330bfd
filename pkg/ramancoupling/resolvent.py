"""Resolvent (self-energy) treatment of the ac Stark shift of the
|f0>-|g1> resonance and drive-power calibration.

The self-energy between two states of the degenerate pair is the sum
over all paths through bare intermediate states (the pair itself
excluded), each hop weighted by the interaction matrix element and each
intermediate state ``m`` by ``1/(z - E_m)``. Paths are summed breadth
first: a ``dim x (P+1)`` amplitude array is propagated one hop at a
time, its column ``p`` holding the part carrying ``Omega**p``.
"""
# Author: ramancoupling developers
# Created: October 2026

__all__ = ['ResolventSolution', 'CalibrationFit', 'self_energy',
           'self_energy_exact', 'brute_force_self_energy',
           'stark_shift_resolvent', 'calibrate_drive_power',
           'read_calibration_csv', 'MAX_ORDER', 'CALIBRATION_CSV_HEADER']

import itertools
import logging
from dataclasses import dataclass

import numpy as np
import scipy.optimize

from .errors import ConvergenceError, DomainError, FitError, PoleCollisionError
from .model import (BasisLabel, DriveParams, bare_energies, coupling_operator,
                    build_hdrive)
from .spectral import F0, G1
from .utils import dbm_to_mw, mhz, read_csv

log = logging.getLogger(__name__)

MAX_ORDER = 6
POLE_TOLERANCE = 1e-6
PAIR = (F0, G1)
CALIBRATION_CSV_HEADER = ['power_dbm', 'delta_f0g1_mhz']


@dataclass(frozen=True)
class ResolventSolution:
    """Converged solution of the coupled resonance conditions.

    Attributes
    ----------
    z : complex
      Resolvent variable at the fixed point, relative to the bare pair
      energy at the bare resonance.
    delta_f0g1 : float
      Stark shift of the resonant drive frequency, zero at Omega = 0.
    delta_jc : float
      Drive-independent shift of the resonance caused by g.
    order_g, order_omega : int or None
      Path depth and highest power of Omega kept, None when summed to
      all orders.
    iterations : int
    residual : float
      Largest residual of the two resonance conditions.
    """
    z: complex
    delta_f0g1: float
    delta_jc: float
    order_g: int
    order_omega: int
    iterations: int
    residual: float


@dataclass(frozen=True, eq=False)
class CalibrationFit:
    """Fitted conversion ``Omega = k sqrt(P)``.

    Attributes
    ----------
    k : float
      Drive amplitude (rad/s) per square root of power (mW).
    residuals : ndarray
      Measured minus fitted Stark shift per point (rad/s).
    covariance : float
      Variance estimate of ``k``.
    """
    k: float
    residuals: np.ndarray
    covariance: float

    @property
    def stderr(self):
        return float(np.sqrt(self.covariance))


class _PathSum:
    """Interaction operators and bare energies for one parameter set."""

    def __init__(self, params, drive, energies=None):
        self.params = params
        self.h_g = coupling_operator(params).astype(complex)
        self.h_drive = build_hdrive(params, drive)
        if energies is None:
            energies = bare_energies(params, drive.omega_d)
        self.energies = np.asarray(energies, dtype=float)
        self.included = np.ones(params.dim, dtype=bool)
        for label in PAIR:
            self.included[params.index(label)] = False

    def propagator(self, z):
        gap = z - self.energies
        close = self.included & (np.abs(gap) < POLE_TOLERANCE)
        if close.any():
            i = int(np.flatnonzero(close)[0])
            raise PoleCollisionError('z=%r hits the bare energy of %s'
                                     % (z, self.params.label(i)))
        r = np.zeros(self.params.dim, dtype=complex)
        r[self.included] = 1.0 / gap[self.included]
        return r

    def __call__(self, bra, ket, z, order, max_power):
        r = self.propagator(z)
        x = np.zeros((self.params.dim, max_power + 1), dtype=complex)
        x[ket, 0] = 1.0
        total = 0j
        for _ in range(order):
            y = self.h_g @ x
            y[:, 1:] += self.h_drive @ x[:, :-1]
            total += y[bra].sum()
            x = r[:, None] * y
        return total

    def exact(self, bra, ket, z):
        """All-order self-energy at the current bare energies."""
        self.propagator(z)
        v = self.h_g + self.h_drive
        q = self.included
        block = z * np.eye(q.sum()) - (np.diag(self.energies) + v)[np.ix_(q, q)]
        return v[bra, ket] + v[bra, q] @ np.linalg.solve(block, v[q, ket])


def _pair_rows(params, bra_label, ket_label):
    bra_label, ket_label = BasisLabel.coerce(bra_label), BasisLabel.coerce(ket_label)
    for label in (bra_label, ket_label):
        if label.as_dressed(False) not in PAIR:
            raise DomainError('self-energy is defined on f0 and g1 only, got %s' % label)
    return params.index(bra_label), params.index(ket_label)


def self_energy(params, drive, bra_label, ket_label, z, order, max_omega_power=None):
    """Self-energy Sigma_kl(z) summed over paths of at most ``order`` hops.

    Parameters
    ----------
    params : SystemParams
    drive : DriveParams
      Sets Omega, phi and the frame omega_d of the bare energies.
    bra_label, ket_label : {'f0', 'g1'}
    z : complex
    order : int
      Longest path, counted in interaction factors.
    max_omega_power : int, optional
      Drop path contributions with a higher power of Omega.
      Defaults to ``order``.

    Returns
    -------
    sigma : complex
    """
    if order < 1:
        raise DomainError('order must be >= 1, got %r' % (order,))
    bra, ket = _pair_rows(params, bra_label, ket_label)
    if max_omega_power is None:
        max_omega_power = order
    return _PathSum(params, drive)(bra, ket, z, order, max_omega_power)


def self_energy_exact(params, drive, bra_label, ket_label, z):
    """All-order self-energy <k|V|l> + <k|V Q (z - QHQ)^-1 Q V|l>."""
    bra, ket = _pair_rows(params, bra_label, ket_label)
    return _PathSum(params, drive).exact(bra, ket, z)


def brute_force_self_energy(params, drive, bra_label, ket_label, z, order):
    """Self-energy by explicit enumeration of every intermediate sequence.

    Exponential in ``order``; meant for checking :func:`self_energy`
    on small truncations.
    """
    bra, ket = _pair_rows(params, bra_label, ket_label)
    paths = _PathSum(params, drive)
    r = paths.propagator(z)
    v = paths.h_g + paths.h_drive
    states = np.flatnonzero(paths.included)
    total = v[bra, ket]
    for length in range(1, order):
        for sequence in itertools.product(states, repeat=length):
            chain = (bra,) + sequence + (ket,)
            weight = 1.0 + 0j
            for left, right in zip(chain[:-1], chain[1:]):
                weight *= v[left, right]
                if weight == 0:
                    break
            else:
                total += weight * np.prod(r[list(sequence)])
    return total


def _solve_resonance(params, omega_amp, order_omega, max_iter, damping, rtol):
    frame = DriveParams(omega_amp=omega_amp, omega_d=params.omega_bare)
    offset = params.omega_r - params.omega_bare
    paths = _PathSum(params, frame, bare_energies(params, params.omega_bare) - offset)
    n = params.dim
    excitations = (np.arange(n) // params.n_fock + np.arange(n) % params.n_fock).astype(float)
    f_row, g_row = params.index(F0), params.index(G1)
    e_f, e_g = paths.energies[f_row], paths.energies[g_row]
    base = paths.energies.copy()
    tol = rtol * np.abs(base).max()
    z, shift = 0.0, 0.0
    history = []

    def sigma(row):
        if order_omega is None:
            return paths.exact(row, row, z).real
        return paths(row, row, z, order_omega + 2, order_omega).real

    for iteration in range(1, max_iter + 1):
        paths.energies = base - shift * excitations
        sigma_ff, sigma_gg = sigma(f_row), sigma(g_row)
        residual = max(abs(z - (e_g - shift + sigma_gg)),
                       abs(z - (e_f - 2 * shift + sigma_ff)))
        history.append(residual)
        if residual < tol:
            return z, shift, iteration, residual
        target_shift = e_f - e_g + sigma_ff - sigma_gg
        target_z = e_g - target_shift + sigma_gg
        z = (1 - damping) * z + damping * target_z
        shift = (1 - damping) * shift + damping * target_shift
        log.debug('resolvent iteration %d: z=%.6g shift=%.6g residual=%.3g',
                  iteration, z, shift, residual)
    raise ConvergenceError('resolvent fixed point did not converge in %d iterations '
                           '(residual %.3g)' % (max_iter, history[-1]), history)


def stark_shift_resolvent(params, omega_amp, order_omega=MAX_ORDER, max_iter=200,
                          damping=0.5, rtol=1e-12, delta_jc=None):
    """Stark shift of the f0-g1 resonance from the self-energy series.

    The coupled conditions ``z = E_g1 + Sigma_g1g1(z)`` and
    ``z = E_f0 + Sigma_f0f0(z)`` are solved by damped fixed-point
    iteration from ``z = 0`` for ``z`` and the drive-frequency offset
    from the bare resonance. Paths are summed to depth
    ``order_omega + 2`` keeping powers of Omega up to ``order_omega``.
    ``order_omega=None`` sums the self-energy to all orders. ``delta_jc``
    may be passed to reuse the Omega = 0 solution.

    Returns
    -------
    solution : ResolventSolution
    """
    if order_omega is not None and (order_omega < 2 or order_omega % 2):
        raise DomainError('order_omega must be even and >= 2, got %r' % (order_omega,))
    if not 0 < damping <= 1:
        raise DomainError('damping must lie in (0, 1], got %r' % (damping,))
    if delta_jc is None:
        delta_jc = _solve_resonance(params, 0.0, order_omega, max_iter, damping, rtol)[1]
    z, shift, iterations, residual = _solve_resonance(params, omega_amp, order_omega,
                                                      max_iter, damping, rtol)
    return ResolventSolution(z=z, delta_f0g1=shift - delta_jc, delta_jc=delta_jc,
                             order_g=None if order_omega is None else order_omega + 2,
                             order_omega=order_omega,
                             iterations=iterations, residual=residual)


def calibrate_drive_power(params, measurements, order_omega=MAX_ORDER,
                          reference_amplitude=None):
    """Fit ``Omega = k sqrt(P)`` to measured Stark shifts.

    Parameters
    ----------
    params : SystemParams
    measurements : sequence of (power, delta_f0g1)
      Power in mW and measured shift in rad/s.
    order_omega : int
      Truncation of the resolvent series.
    reference_amplitude : float, optional
      Amplitude used to estimate the quadratic Stark coefficient for
      the initial guess. Defaults to 2pi x 50 MHz.

    Returns
    -------
    fit : CalibrationFit
    """
    data = np.asarray(measurements, dtype=float)
    if data.ndim != 2 or data.shape[1] != 2 or len(data) < 3:
        raise FitError('calibration needs at least 3 (power, shift) points')
    power, measured = data[:, 0], data[:, 1]
    if not np.all(power > 0):
        raise FitError('powers must be positive')
    if np.ptp(power) == 0:
        raise FitError('all powers are equal, the conversion factor is undetermined')
    delta_jc = stark_shift_resolvent(params, 0.0, order_omega).delta_jc

    def model(k):
        return np.array([stark_shift_resolvent(params, k * np.sqrt(p), order_omega,
                                               delta_jc=delta_jc).delta_f0g1
                         for p in power])

    if reference_amplitude is None:
        reference_amplitude = 2 * np.pi * 5e7
    curvature = stark_shift_resolvent(params, reference_amplitude, order_omega,
                                      delta_jc=delta_jc).delta_f0g1 / reference_amplitude ** 2
    first = np.argmin(power)
    if curvature == 0 or measured[first] == 0:
        raise FitError('cannot initialize the calibration from a vanishing Stark shift')
    k0 = np.sqrt(abs(measured[first] / curvature) / power[first])
    history = []

    def residuals(x):
        r = measured - model(x[0] * k0)
        history.append(float(np.sqrt(np.mean(r ** 2))))
        return r / np.abs(measured).max()

    result = scipy.optimize.least_squares(residuals, [1.0], method='lm', diff_step=1e-5,
                                          xtol=1e-14, ftol=1e-14, gtol=1e-14)
    if result.status <= 0:
        raise FitError('calibration fit failed: %s' % result.message, history)
    k = float(result.x[0] * k0)
    r = measured - model(k)
    dof = max(len(r) - 1, 1)
    jac = result.jac[:, 0] * np.abs(measured).max() / k0
    jtj = float(jac @ jac)
    covariance = float(r @ r) / dof / jtj if jtj > 0 else np.inf
    log.info('calibrated k=%.6g rad/s/sqrt(mW) after %d evaluations', k, result.nfev)
    return CalibrationFit(k=k, residuals=r, covariance=covariance)


def read_calibration_csv(path):
    """Load measured Stark shifts as ``(power_mW, delta_f0g1)`` pairs.

    The file holds power in dBm and the shift over 2pi in MHz.
    """
    power_dbm, shift_mhz = read_csv(path, CALIBRATION_CSV_HEADER)
    return [(float(p), float(d)) for p, d in zip(dbm_to_mw(power_dbm), mhz(shift_mhz))]
