"""Time-domain swap dynamics between |f0>_D and |g1>_D.

Shaped pulses are specified in the effective coupling, ``g~(t) =
g~_max sin^2(pi t / 2 dt)`` on the ramps, and are converted into a drive
amplitude Omega(t) and a chirped drive frequency omega_d(Omega(t)) that
cancels the amplitude-dependent Stark shift. The Schroedinger equation
is integrated in the frame rotating at omega_d(0), with the chirp
carried by the drive phase.
"""
# Author: ramancoupling developers
# Created: October 2026

__all__ = ['PulseShape', 'DynamicsResult', 'OverlapSet', 'RabiExpansion',
           'ChirpedDrive', 'ConstantDrive', 'make_pulse', 'pulse_pi',
           'chirped_drive', 'evolve', 'simulate_pi_pulse',
           'pi_pulse_infidelity', 'rabi_eigenexpansion', 'rabi_frequency_fft',
           'fidelity_sweep', 'analytic_fidelity', 'polariton_overlaps',
           'leakage_amplitudes', 'write_sweep_csv', 'TIME_SERIES_HEADER', 'SWEEP_HEADER']

import logging
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.integrate
import scipy.signal
from scipy.interpolate import PchipInterpolator

from .errors import (DomainError, PerturbativeWarning, RangeError,
                     SingularityError, StiffnessError)
from .model import DriveParams, build_hamiltonian, build_hjc, check_truncation, transmon_lowering
from .spectral import F0, G1, diagonalize, dressed_state, pair_indices
from .utils import run_parallel, write_csv

log = logging.getLogger(__name__)

INVERSION_LEVELS = 513
TIME_SERIES_HEADER = ['t_ns', 'p_f0', 'p_g1', 'leakage']
SWEEP_HEADER = ['T_ns', 'rise_ns', 'one_minus_F']


@dataclass(frozen=True)
class PulseShape:
    """Flat-top pulse with sin^2 ramps, defined in the effective coupling.

    Attributes
    ----------
    total_time : float
      Pulse duration T in seconds.
    rise_time : float
      Ramp duration, ``0 < 2 rise_time <= total_time``.
    gtilde_max : float
      Plateau effective coupling (rad/s).
    phi : float
      Drive phase at t = 0.
    """
    total_time: float
    rise_time: float
    gtilde_max: float
    phi: float = 0.0

    def __post_init__(self):
        if not (self.rise_time > 0 and 2 * self.rise_time <= self.total_time * (1 + 1e-12)):
            raise DomainError('pulse needs 0 < 2 rise_time <= total_time, got T=%r rise=%r'
                              % (self.total_time, self.rise_time))
        if not self.gtilde_max >= 0:
            raise DomainError('gtilde_max must be non-negative, got %r' % (self.gtilde_max,))

    def envelope(self, t):
        """Envelope in [0, 1]; zero outside the pulse."""
        t = np.asarray(t, dtype=float)
        edge = np.minimum(t, self.total_time - t)
        s = np.where(edge < self.rise_time,
                     np.sin(0.5 * np.pi * np.clip(edge, 0, None) / self.rise_time) ** 2, 1.0)
        return np.where((t < 0) | (t > self.total_time), 0.0, s)[()]

    def gtilde(self, t):
        return self.gtilde_max * self.envelope(t)

    def area(self):
        """Integral of g~(t) over the pulse."""
        return self.gtilde_max * (self.total_time - self.rise_time)


@dataclass(frozen=True, eq=False)
class DynamicsResult:
    """Populations of the dressed pair along an evolution.

    Attributes
    ----------
    times : ndarray
    p_f0, p_g1 : ndarray
      Populations of |f0> and |g1> (dressed or bare, see ``basis``).
    leakage : ndarray
      ``1 - p_f0 - p_g1``.
    fidelity : float
      End value of p_g1 for pulses, first maximum for a constant drive.
    amp_f0, amp_g1 : ndarray
      Complex amplitudes behind the populations.
    norm : ndarray
      State norm per sample.
    final_state : ndarray
    basis : str
    """
    times: np.ndarray
    p_f0: np.ndarray
    p_g1: np.ndarray
    leakage: np.ndarray
    fidelity: float
    amp_f0: np.ndarray
    amp_g1: np.ndarray
    norm: np.ndarray
    final_state: np.ndarray
    basis: str = 'dressed'

    @property
    def infidelity(self):
        return 1.0 - self.fidelity

    def to_csv(self, path):
        write_csv(path, TIME_SERIES_HEADER,
                  zip(self.times * 1e9, self.p_f0, self.p_g1, self.leakage))


@dataclass(frozen=True, eq=False)
class OverlapSet:
    """Expansion of |f0>_D and |g1>_D in the driven eigenbasis.

    ``alpha_n = <Phi_n|f0>_D``, ``beta_n = <Phi_n|g1>_D``.
    """
    alpha_n: np.ndarray
    beta_n: np.ndarray
    energies: np.ndarray

    @property
    def weights(self):
        return self.beta_n.conj() * self.alpha_n

    @property
    def theta_nm(self):
        """Matrix of arg(c_m c_n*) with c_n = beta_n* alpha_n."""
        c = self.weights
        return np.angle(c[None, :] * c[:, None].conj())


@dataclass(frozen=True, eq=False)
class RabiExpansion:
    times: np.ndarray
    p_g1: np.ndarray
    fidelity: float
    rate: float
    overlaps: OverlapSet


def make_pulse(gtilde_max, total_time, rise_time, phi=0.0):
    return PulseShape(total_time=total_time, rise_time=rise_time,
                      gtilde_max=gtilde_max, phi=phi)


def pulse_pi(stark, total_time, rise_time, phi=0.0):
    """pi-swap pulse: g~_max = (pi/2) / (T - dt) so that the area is pi/2.

    Raises :class:`RangeError` when the plateau coupling is beyond the
    monotone range of ``stark``.
    """
    if not (rise_time > 0 and 2 * rise_time <= total_time * (1 + 1e-12)):
        raise DomainError('pulse needs 0 < 2 rise_time <= total_time, got T=%r rise=%r'
                          % (total_time, rise_time))
    gtilde_max = 0.5 * np.pi / (total_time - rise_time)
    if stark is not None and gtilde_max > stark.max_gtilde * (1 + 1e-12):
        raise RangeError('a %.4g ns pi pulse needs g~/2pi = %.4g MHz, above the reachable '
                         '%.4g MHz' % (total_time * 1e9, gtilde_max / (2e6 * np.pi),
                                       stark.max_gtilde / (2e6 * np.pi)))
    return make_pulse(gtilde_max, total_time, rise_time, phi)


class ChirpedDrive:
    """Drive realizing a :class:`PulseShape` with Stark-chirp cancellation.

    Omega(t) follows from inverting g~(Omega) of the transport solution;
    omega_d(t) = omega_d(Omega(t)). The simulation frame is omega_d(0)
    and ``phase(t) = phi0 + int_0^t (omega_d - omega_d(0)) dt'``.
    """
    is_constant = False

    def __init__(self, pulse, stark, levels=INVERSION_LEVELS):
        self.pulse = pulse
        self.stark = stark
        self.frame = stark.omega_d0
        self.phi0 = pulse.phi
        if pulse.gtilde_max == 0:
            self._omega_of_s = None
        else:
            s = np.linspace(0.0, 1.0, levels)
            omega = [stark.omega_for_gtilde(x * pulse.gtilde_max) for x in s]
            self._omega_of_s = PchipInterpolator(s, omega)
        log.debug('chirped drive: T=%.4g ns rise=%.4g ns plateau Omega/2pi=%.6g GHz',
                  pulse.total_time * 1e9, pulse.rise_time * 1e9,
                  self.amplitude(0.5 * pulse.total_time) / (2e9 * np.pi))

    def amplitude(self, t):
        if self._omega_of_s is None:
            return np.zeros(np.shape(t))[()]
        return self._omega_of_s(self.pulse.envelope(t))[()]

    def frequency(self, t):
        return self.stark.drive_frequency(self.amplitude(t))

    def detuning(self, t):
        return self.frequency(t) - self.frame

    def phase(self, t):
        if t <= 0:
            return self.phi0
        corners = [c for c in (self.pulse.rise_time, self.pulse.total_time - self.pulse.rise_time)
                   if 0 < c < t]
        value, _ = scipy.integrate.quad(self.detuning, 0.0, t, limit=200, points=corners or None)
        return self.phi0 + value


def chirped_drive(pulse, stark):
    return ChirpedDrive(pulse, stark)


class ConstantDrive:
    """Square drive at fixed amplitude and frequency, framed at its own omega_d."""
    is_constant = True

    def __init__(self, drive):
        self.drive = drive
        self.frame = drive.omega_d
        self.phi0 = drive.phi

    def amplitude(self, t):
        return self.drive.omega_amp

    def frequency(self, t):
        return self.drive.omega_d

    def detuning(self, t):
        return 0.0

    def phase(self, t):
        return self.phi0


def _projectors(params, basis):
    if basis == 'dressed':
        return dressed_state(params, F0)[1], dressed_state(params, G1)[1]
    if basis == 'bare':
        f_state = np.zeros(params.dim, dtype=complex)
        g_state = np.zeros(params.dim, dtype=complex)
        f_state[params.index(F0)] = g_state[params.index(G1)] = 1.0
        return f_state, g_state
    raise DomainError("basis must be 'dressed' or 'bare', got %r" % (basis,))


def evolve(params, drive, psi0, t_grid, basis='dressed', rtol=1e-10, atol=1e-12):
    """Integrate the Schroedinger equation for a (possibly chirped) drive.

    Parameters
    ----------
    params : SystemParams
    drive : ChirpedDrive or ConstantDrive
    psi0 : array_like
      Normalized initial state in the composite basis.
    t_grid : array_like
      Increasing sample times; integration starts at ``t_grid[0]``.
    basis : {'dressed', 'bare'}
      Basis of the reported f0 and g1 populations.
    rtol, atol : float
      Local error tolerances of the DOP853 integrator.

    Returns
    -------
    result : DynamicsResult
    """
    psi0 = np.asarray(psi0, dtype=complex)
    if psi0.shape != (params.dim,) or abs(np.linalg.norm(psi0) - 1) > 1e-9:
        raise DomainError('psi0 must be a normalized vector of length %d' % params.dim)
    times = np.asarray(t_grid, dtype=float)
    if times.ndim != 1 or len(times) < 2 or np.any(np.diff(times) <= 0):
        raise DomainError('t_grid must be strictly increasing with at least two samples')
    f_state, g_state = _projectors(params, basis)
    h_jc = build_hjc(params, DriveParams(omega_d=drive.frame))
    b = transmon_lowering(params)
    bt = b.T.copy()

    def rhs(t, y):
        psi = y[:-1]
        omega = drive.amplitude(t)
        h_psi = h_jc @ psi
        if omega:
            rotation = np.exp(1j * y[-1].real)
            h_psi = h_psi + 0.5 * omega * (rotation * (b @ psi) + rotation.conjugate() * (bt @ psi))
        return np.concatenate([-1j * h_psi, [drive.detuning(t)]])

    y0 = np.concatenate([psi0, [drive.phi0]]).astype(complex)
    solution = scipy.integrate.solve_ivp(rhs, (times[0], times[-1]), y0, method='DOP853',
                                         t_eval=times, rtol=rtol, atol=atol)
    if solution.status == -1:
        raise StiffnessError('integration failed: %s' % solution.message)
    states = solution.y[:-1].T
    log.debug('evolve: %d samples, %d right-hand side evaluations', len(times), solution.nfev)
    check_truncation(params, states)
    amp_f0 = states @ f_state.conj()
    amp_g1 = states @ g_state.conj()
    p_f0, p_g1 = np.abs(amp_f0) ** 2, np.abs(amp_g1) ** 2
    if drive.is_constant:
        peaks, _ = scipy.signal.find_peaks(p_g1)
        fidelity = p_g1[peaks[0]] if len(peaks) else p_g1.max()
    else:
        fidelity = p_g1[-1]
    return DynamicsResult(times=times, p_f0=p_f0, p_g1=p_g1, leakage=1.0 - p_f0 - p_g1,
                          fidelity=float(fidelity), amp_f0=amp_f0, amp_g1=amp_g1,
                          norm=np.linalg.norm(states, axis=1), final_state=states[-1],
                          basis=basis)


def simulate_pi_pulse(params, stark, total_time, rise_time, phi=0.0, n_samples=201,
                      basis='dressed', rtol=1e-10, atol=1e-12):
    """Evolve |f0>_D under a chirped pi pulse built from ``stark``."""
    drive = ChirpedDrive(pulse_pi(stark, total_time, rise_time, phi), stark)
    _, psi0 = dressed_state(params, F0)
    times = np.linspace(0.0, total_time, n_samples)
    return evolve(params, drive, psi0, times, basis=basis, rtol=rtol, atol=atol)


def pi_pulse_infidelity(params, stark, total_time, rise_time):
    return simulate_pi_pulse(params, stark, total_time, rise_time, n_samples=3).infidelity


def _sweep_point(args):
    return pi_pulse_infidelity(*args)


def fidelity_sweep(params, stark, total_times, rise_times, workers=1):
    """Pi-pulse infidelity over a (T, rise time) grid.

    Points with 2 rise > T are skipped. Returns (T, rise, 1 - F)
    rows in grid order.
    """
    points = [(t, r) for t in total_times for r in rise_times if 2 * r <= t]
    values = run_parallel(_sweep_point, [(params, stark, t, r) for t, r in points], workers)
    return [(t, r, v) for (t, r), v in zip(points, values)]


def write_sweep_csv(path, rows):
    write_csv(path, SWEEP_HEADER, [(t * 1e9, r * 1e9, v) for t, r, v in rows])


def rabi_eigenexpansion(params, drive, t_grid):
    """P_g1D(t) under a constant drive from a single diagonalization.

    ``P(t) = sum |c_n|^2 + 2 sum_{n<m} |c_n c_m| cos((eps_n - eps_m) t + theta_nm)``
    with ``c_n = beta_n* alpha_n``. The swap fidelity
    ``F = 4 |alpha_+ alpha_- beta_+ beta_-|`` and the rate ``eps_+ - eps_-``
    use the two eigenvectors with most weight on the dressed pair.
    """
    times = np.asarray(t_grid, dtype=float)
    _, f_state = dressed_state(params, F0)
    _, g_state = dressed_state(params, G1)
    spec = diagonalize(build_hamiltonian(params, drive), params.n_fock)
    alpha = spec.eigenvectors.conj().T @ f_state
    beta = spec.eigenvectors.conj().T @ g_state
    overlaps = OverlapSet(alpha, beta, spec.eigenvalues)
    c = overlaps.weights
    keep = np.flatnonzero(np.abs(c) > 1e-15)
    p_g1 = np.full(times.shape, float(np.sum(np.abs(c) ** 2)))
    theta = overlaps.theta_nm
    for i, n in enumerate(keep):
        for m in keep[i + 1:]:
            p_g1 += 2 * abs(c[n] * c[m]) * np.cos(
                (spec.eigenvalues[n] - spec.eigenvalues[m]) * times + theta[n, m])
    (lower, upper), _ = pair_indices(spec, f_state, g_state)
    fidelity = 4 * abs(alpha[upper] * alpha[lower] * beta[upper] * beta[lower])
    rate = spec.eigenvalues[upper] - spec.eigenvalues[lower]
    return RabiExpansion(times, p_g1, float(fidelity), float(rate), overlaps)


def rabi_frequency_fft(times, signal):
    """Angular frequency of the strongest non-zero Fourier component.

    ``times`` must be uniformly spaced; the resolution is one bin,
    ``2 pi / (n dt)``.
    """
    times = np.asarray(times, dtype=float)
    signal = np.asarray(signal, dtype=float)
    dt = np.diff(times)
    if len(times) < 4 or not np.allclose(dt, dt[0], rtol=1e-9, atol=0):
        raise DomainError('FFT needs at least 4 uniformly spaced samples')
    spectrum = np.abs(np.fft.rfft(signal - signal.mean()))
    frequencies = np.fft.rfftfreq(len(signal), dt[0])
    return 2 * np.pi * frequencies[1 + int(np.argmax(spectrum[1:]))]


def _denominators(params):
    delta, alpha = params.delta, params.alpha
    for name, value in (('Delta', delta), ('Delta+alpha', delta + alpha),
                        ('Delta-alpha', delta - alpha)):
        if value == 0:
            raise SingularityError('%s vanishes' % name)
    return delta, delta + alpha, delta - alpha


def _check_perturbative(params, omega_amp):
    ratio = (omega_amp / (2 * (params.delta + params.alpha))) ** 2
    if ratio > 0.1:
        warnings.warn('(Omega/(2(Delta+alpha)))^2 = %.3g; second-order estimates are '
                      'unreliable' % ratio, PerturbativeWarning, stacklevel=3)


def leakage_amplitudes(params, omega_amp):
    """First-order admixtures of |e0>, |h0> (into |f0>_D) and |e1> (into |g1>_D)."""
    delta, plus, minus = _denominators(params)
    half = 0.5 * omega_amp
    return {'e0': -np.sqrt(2) * half / delta,
            'h0': np.sqrt(3) * half / minus,
            'e1': half / plus}


def analytic_fidelity(params, omega_amp):
    """Second-order swap fidelity of a square pulse.

    ``F = 1 - (Omega/2/(Delta+alpha))^2 - (sqrt(2) Omega/2/Delta)^2
    - (sqrt(3) Omega/2/(Delta-alpha))^2``
    """
    _check_perturbative(params, omega_amp)
    return 1.0 - sum(abs(a) ** 2 for a in leakage_amplitudes(params, omega_amp).values())


def polariton_overlaps(params, omega_amp):
    """Second-order overlaps ``(alpha_pm, beta_pm)`` of the polaritons.

    ``alpha_+- = (1 - (sqrt2 Omega/2/Delta)^2/2 - (sqrt3 Omega/2/(Delta-alpha))^2/2)/sqrt2``
    and ``beta_+- = +-(1 - (Omega/2/(Delta+alpha))^2/2)/sqrt2``.
    """
    _check_perturbative(params, omega_amp)
    leak = leakage_amplitudes(params, omega_amp)
    a = (1 - 0.5 * leak['e0'] ** 2 - 0.5 * leak['h0'] ** 2) / np.sqrt(2)
    b = (1 - 0.5 * leak['e1'] ** 2) / np.sqrt(2)
    return np.array([a, a]), np.array([b, -b])
