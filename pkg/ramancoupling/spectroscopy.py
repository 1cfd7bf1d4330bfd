"""Resonator transmission of the driven transmon-resonator system.

The response function is

  S(w) = A0^2 |(i|gamma| w - w~^2) / (4 g~^2 w0^2 - (i|gamma| w - w~^2)(i|kappa| w - w~^2))|^2

with ``w~^2 = w^2 - w0^2`` and ``w0`` the resonant drive frequency.
Traces are synthesized from it, split peaks are located, and the five
parameters are fitted back by damped least squares.
"""
# Author: ramancoupling developers
# Created: October 2026

__all__ = ['ResponseModel', 'TransmissionTrace', 'PeakResult', 'FitResult',
           'TransmissionMap', 'response', 'two_mode_response', 'find_split_peaks',
           'initial_guess', 'fit_response', 'synthesize_trace',
           'synthesize_transmission_map', 'pair_transitions', 'equal_width_drive', 'read_trace_csv',
           'TRACE_CSV_HEADER', 'MAP_CSV_HEADER']

import logging
from dataclasses import dataclass, replace

import numpy as np
import scipy.optimize
import scipy.signal

from .errors import DetectionError, DomainError, FitError, LabelingError, SingularityError
from .model import DriveParams, FREQUENCY_SCALE, build_hamiltonian
from .spectral import F0, G0, G1, diagonalize, dressed_state, pair_indices
from .utils import read_csv, run_parallel, write_csv

log = logging.getLogger(__name__)

TRACE_CSV_HEADER = ['probe_ghz', 'transmission']
MAP_CSV_HEADER = ['drive_ghz', 'probe_ghz', 'transmission']
MIN_TRACE_POINTS = 32
DIP_THRESHOLD = 0.1
PROMINENCE = 0.1
NOISE_FLOOR = 3.0
MIN_SPAN_LINEWIDTHS = 6
MAX_NFEV = 500


@dataclass(frozen=True)
class ResponseModel:
    """Parameters of the transmission response.

    Attributes
    ----------
    a0 : float
      Amplitude, > 0.
    gtilde : float
      Effective coupling (rad/s).
    omega_d0 : float
      Resonant drive frequency entering the response (rad/s).
    kappa, gamma : float
      Resonator and transmon linewidths (rad/s).
    """
    a0: float
    gtilde: float
    omega_d0: float
    kappa: float
    gamma: float

    def __post_init__(self):
        if not self.a0 > 0:
            raise DomainError('a0 must be positive, got %r' % (self.a0,))
        if not self.omega_d0 > 0:
            raise DomainError('omega_d0 must be positive, got %r' % (self.omega_d0,))
        for name in ('gtilde', 'kappa', 'gamma'):
            if not getattr(self, name) >= 0:
                raise DomainError('%s must be non-negative, got %r' % (name, getattr(self, name)))

    def as_array(self):
        return np.array([self.a0, self.gtilde, self.omega_d0, self.kappa, self.gamma])


def two_mode_response(a0, gtilde, omega_c, omega_q, kappa, gamma, omega):
    """Transmission of a resonator mode at ``omega_c`` coupled by ``gtilde``
    to a mode at ``omega_q``; equals :func:`response` when the two coincide.
    """
    omega = np.asarray(omega, dtype=float)
    if np.any(omega <= 0):
        raise DomainError('probe frequencies must be positive')
    transmon = 1j * gamma * omega - (omega - omega_q) * (omega + omega_q)
    resonator = 1j * kappa * omega - (omega - omega_c) * (omega + omega_c)
    denominator = 4 * gtilde ** 2 * omega_c ** 2 - transmon * resonator
    if np.any(np.abs(denominator) < 1e-30):
        raise SingularityError('response has a pole on the probe grid')
    return (a0 ** 2 * np.abs(transmon / denominator) ** 2)[()]


def response(model, omega):
    """Evaluate S(omega) for a :class:`ResponseModel`."""
    return two_mode_response(model.a0, model.gtilde, model.omega_d0, model.omega_d0,
                             model.kappa, model.gamma, omega)


@dataclass(frozen=True, eq=False)
class TransmissionTrace:
    frequencies: np.ndarray
    transmission: np.ndarray

    def __post_init__(self):
        frequencies = np.asarray(self.frequencies, dtype=float)
        transmission = np.asarray(self.transmission, dtype=float)
        if frequencies.ndim != 1 or frequencies.shape != transmission.shape:
            raise DomainError('trace needs matching 1-d frequency and transmission arrays')
        if len(frequencies) < MIN_TRACE_POINTS:
            raise DomainError('trace needs at least %d points, got %d'
                              % (MIN_TRACE_POINTS, len(frequencies)))
        if np.any(np.diff(frequencies) <= 0):
            raise DomainError('trace frequencies must be strictly increasing')
        if np.any(transmission < 0) or not np.all(np.isfinite(transmission)):
            raise DomainError('transmission must be finite and non-negative')
        object.__setattr__(self, 'frequencies', frequencies)
        object.__setattr__(self, 'transmission', transmission)

    def scaled(self, factor):
        return TransmissionTrace(self.frequencies, self.transmission * factor)

    def to_csv(self, path):
        write_csv(path, TRACE_CSV_HEADER,
                  zip(self.frequencies / FREQUENCY_SCALE, self.transmission))


def read_trace_csv(path):
    probe, transmission = read_csv(path, TRACE_CSV_HEADER)
    return TransmissionTrace(probe * FREQUENCY_SCALE, transmission)


def synthesize_trace(model, probe, noise=0.0, rng=None):
    """Sample the response on ``probe`` with multiplicative Gaussian noise.

    ``rng`` is a seed or :class:`numpy.random.Generator`.
    """
    values = response(model, probe)
    if noise:
        rng = np.random.default_rng(rng)
        values = np.clip(values * (1 + noise * rng.standard_normal(len(values))), 0, None)
    return TransmissionTrace(probe, values)


@dataclass(frozen=True)
class PeakResult:
    """Located transmission maxima.

    ``positions``, ``heights`` and ``widths`` hold one entry for an
    unsplit line and two (ascending in frequency) for a doublet.
    """
    positions: tuple
    heights: tuple
    widths: tuple
    split: bool
    dip_depth: float = 0.0

    @property
    def center(self):
        return float(np.mean(self.positions))

    @property
    def separation(self):
        return self.positions[1] - self.positions[0] if self.split else 0.0


def _vertex(x, y, i):
    """Parabola vertex through samples i-1, i, i+1."""
    if i == 0 or i == len(y) - 1:
        return x[i], y[i]
    x0, x1, x2 = x[i - 1:i + 2]
    y0, y1, y2 = y[i - 1:i + 2]
    coefficients = np.polyfit([x0 - x1, 0.0, x2 - x1], [y0, y1, y2], 2)
    if coefficients[0] >= 0:
        return x[i], y[i]
    shift = -coefficients[1] / (2 * coefficients[0])
    shift = min(max(shift, x0 - x1), x2 - x1)
    return x1 + shift, float(np.polyval(coefficients, shift))


def find_split_peaks(trace, prominence=PROMINENCE, dip_threshold=DIP_THRESHOLD):
    """Locate the transmission maxima of a trace.

    Candidate peaks need a prominence of ``prominence * max(S)``; the two
    highest are kept and refined by three-point parabolic interpolation.
    They count as a doublet when the dip between them is at least
    ``dip_threshold`` below the lower peak.

    Raises
    ------
    DetectionError
      When the maximum is below three times the median, no peak is found
      or the trace spans fewer than six of the measured linewidths.
    """
    x, y = trace.frequencies, trace.transmission
    top = y.max()
    if not top > NOISE_FLOOR * np.median(y):
        raise DetectionError('no peak above the noise floor (max %.3g, median %.3g)'
                             % (top, np.median(y)))
    peaks, _ = scipy.signal.find_peaks(y, prominence=prominence * top)
    if len(peaks) == 0:
        raise DetectionError('no peak with prominence above %.3g' % (prominence * top))
    peaks = np.sort(peaks[np.argsort(y[peaks])[::-1][:2]])
    prominence_data = None
    depth = 0.0
    if len(peaks) == 2:
        dip = peaks[0] + int(np.argmin(y[peaks[0]:peaks[1] + 1]))
        depth = 1.0 - y[dip] / min(y[peaks])
        # both members of a doublet are measured against the dip between them
        left_bases = np.array([np.argmin(y[:peaks[0] + 1]), dip])
        right_bases = np.array([dip, peaks[1] + np.argmin(y[peaks[1]:])])
        prominences = y[peaks] - np.maximum(y[left_bases], y[right_bases])
        prominence_data = (prominences, left_bases, right_bases)
    widths, _, left, right = scipy.signal.peak_widths(y, peaks, rel_height=0.5,
                                                      prominence_data=prominence_data)
    index = np.arange(len(x))
    widths = np.interp(right, index, x) - np.interp(left, index, x)
    span = x[-1] - x[0]
    if span < MIN_SPAN_LINEWIDTHS * widths.max():
        raise DetectionError('trace spans %.3g linewidths, need at least %d'
                             % (span / widths.max(), MIN_SPAN_LINEWIDTHS))
    vertices = [_vertex(x, y, i) for i in peaks]
    if len(peaks) == 2:
        if depth >= dip_threshold:
            log.debug('doublet at %s with %.1f%% dip', [v[0] for v in vertices], 100 * depth)
            return PeakResult(positions=tuple(v[0] for v in vertices),
                              heights=tuple(v[1] for v in vertices),
                              widths=tuple(widths), split=True, dip_depth=depth)
    best = int(np.argmax(y[peaks]))
    return PeakResult(positions=(vertices[best][0],), heights=(vertices[best][1],),
                      widths=(widths[best],), split=False)


def initial_guess(trace, peaks=None):
    """Starting :class:`ResponseModel` from located peaks.

    A doublet gives g~ as half the separation and kappa = gamma as the
    mean peak width; a single line gives kappa = gamma = its width and
    g~ a quarter of it. The amplitude matches the trace maximum.
    """
    if peaks is None:
        peaks = find_split_peaks(trace)
    width = float(np.mean(peaks.widths))
    gtilde = 0.5 * peaks.separation if peaks.split else 0.25 * width
    unit = ResponseModel(a0=1.0, gtilde=gtilde, omega_d0=peaks.center, kappa=width, gamma=width)
    scale = np.sqrt(trace.transmission.max() / response(unit, trace.frequencies).max())
    return replace(unit, a0=float(scale))


@dataclass(frozen=True, eq=False)
class FitResult:
    """Fitted response with residuals and parameter covariance.

    ``covariance`` is ordered as (a0, gtilde, omega_d0, kappa, gamma).
    """
    model: ResponseModel
    residuals: np.ndarray
    covariance: np.ndarray
    cost: float
    nfev: int

    @property
    def stderr(self):
        return np.sqrt(np.diag(self.covariance))


def fit_response(trace, initial=None, max_nfev=MAX_NFEV):
    """Least-squares fit of the response to a trace.

    Parameters are fitted in units of the initial linewidth around the
    initial center, with the amplitude relative to the initial a0.

    Raises
    ------
    FitError
      When the optimizer stops on the evaluation limit.
    """
    if initial is None:
        initial = initial_guess(trace)
    unit = initial.kappa or initial.gtilde or (trace.frequencies[-1] - trace.frequencies[0]) / 100
    scales = np.array([initial.a0, unit, unit, unit, unit])
    center = initial.omega_d0
    norm = trace.transmission.max()
    history = []

    def unpack(x):
        return ResponseModel(a0=abs(x[0]) * scales[0], gtilde=abs(x[1]) * unit,
                             omega_d0=center + x[2] * unit, kappa=abs(x[3]) * unit,
                             gamma=abs(x[4]) * unit)

    def residuals(x):
        r = (response(unpack(x), trace.frequencies) - trace.transmission) / norm
        history.append(float(np.dot(r, r)))
        return r

    x0 = np.array([1.0, initial.gtilde / unit, 0.0, initial.kappa / unit, initial.gamma / unit])
    result = scipy.optimize.least_squares(residuals, x0, method='lm', x_scale='jac',
                                          ftol=1e-12, xtol=1e-12, gtol=1e-12,
                                          max_nfev=max_nfev)
    if result.status == 0:
        raise FitError('response fit did not converge in %d evaluations' % max_nfev,
                       history=history)
    model = unpack(result.x)
    dof = max(len(trace.frequencies) - len(x0), 1)
    jac = result.jac
    covariance = np.linalg.pinv(jac.T @ jac) * (2 * result.cost / dof)
    signs = np.sign(result.x)
    signs[2] = 1.0
    signs[signs == 0] = 1.0
    factor = scales * signs
    covariance = covariance * np.outer(factor, factor)
    log.info('fit: g~/2pi = %.6g MHz, kappa/2pi = %.6g MHz, gamma/2pi = %.6g MHz (%d evaluations)',
             model.gtilde / FREQUENCY_SCALE * 1e3, model.kappa / FREQUENCY_SCALE * 1e3,
             model.gamma / FREQUENCY_SCALE * 1e3, result.nfev)
    return FitResult(model=model, residuals=result.fun * norm, covariance=covariance,
                     cost=float(result.cost), nfev=int(result.nfev))


@dataclass(frozen=True, eq=False)
class TransmissionMap:
    """Transmission over (drive frequency, probe frequency).

    ``transmission[i, j]`` belongs to ``drive_grid[i]``, ``probe_grid[j]``;
    ``polaritons[i]`` are the two pair transition frequencies.
    """
    drive_grid: np.ndarray
    probe_grid: np.ndarray
    transmission: np.ndarray
    polaritons: np.ndarray

    def trace(self, i):
        return TransmissionTrace(self.probe_grid, self.transmission[i])

    def to_csv(self, path):
        rows = ((d, p, s) for d, row in zip(self.drive_grid / FREQUENCY_SCALE, self.transmission)
                for p, s in zip(self.probe_grid / FREQUENCY_SCALE, row))
        write_csv(path, MAP_CSV_HEADER, rows)


def _pair_spectrum(params, omega_amp, omega_d, f_state, g_state, ground):
    spec = diagonalize(build_hamiltonian(params, DriveParams(omega_amp=omega_amp, omega_d=omega_d)),
                       params.n_fock)
    (lower, upper), _ = pair_indices(spec, f_state, g_state)
    overlaps = np.abs(spec.eigenvectors.conj().T @ ground) ** 2
    ground_index = int(np.argmax(overlaps))
    if overlaps[ground_index] < 0.5:
        raise LabelingError('driven ground state lost at omega_d/2pi = %.6g GHz'
                            % (omega_d / FREQUENCY_SCALE))
    offset = omega_d - spec.eigenvalues[ground_index]
    upper_is_resonator = (abs(np.vdot(g_state, spec.eigenvectors[:, upper]))
                          >= abs(np.vdot(g_state, spec.eigenvectors[:, lower])))
    return spec.eigenvalues[lower] + offset, spec.eigenvalues[upper] + offset, upper_is_resonator


def pair_transitions(params, omega_amp, omega_d):
    """Probe frequencies ``(low, high)`` of the two polaritons seen from the driven ground state."""
    _, f_state = dressed_state(params, F0)
    _, g_state = dressed_state(params, G1)
    _, ground = dressed_state(params, G0)
    return _pair_spectrum(params, omega_amp, omega_d, f_state, g_state, ground)[:2]


def _map_column(args):
    params, omega_amp, omega_d, gtilde, f_state, g_state, ground, a0, gamma, probe = args
    low, high, upper_is_resonator = _pair_spectrum(params, omega_amp, omega_d,
                                                   f_state, g_state, ground)
    center, half = 0.5 * (high + low), 0.5 * (high - low)
    detuning = np.sqrt(max(half ** 2 - gtilde ** 2, 0.0))
    omega_c = center + detuning if upper_is_resonator else center - detuning
    omega_q = 2 * center - omega_c
    values = two_mode_response(a0, gtilde, omega_c, omega_q, params.kappa, gamma, probe)
    return (low, high), values


def synthesize_transmission_map(params, stark, drive_grid, probe_grid, omega_amp,
                                a0=None, gamma=None, workers=1):
    """Avoided-crossing transmission map at fixed drive amplitude.

    For each drive frequency the two pair energies are taken from a full
    diagonalization, turned into probe transition frequencies from the
    driven ground state, and rendered with the two-mode response using
    g~ = ``stark.effective_coupling(omega_amp)``.
    """
    gamma = params.gamma if gamma is None else gamma
    if not (params.kappa > 0 and gamma > 0):
        raise DomainError('transmission map needs kappa > 0 and gamma > 0')
    drive_grid = np.asarray(drive_grid, dtype=float)
    probe_grid = np.asarray(probe_grid, dtype=float)
    if drive_grid.ndim != 1 or len(drive_grid) == 0:
        raise DomainError('drive grid must be a non-empty 1-d array')
    gtilde = abs(float(stark.effective_coupling(omega_amp)))
    if a0 is None:
        a0 = params.kappa * params.omega_r
    _, f_state = dressed_state(params, F0)
    _, g_state = dressed_state(params, G1)
    _, ground = dressed_state(params, G0)
    tasks = [(params, omega_amp, omega_d, gtilde, f_state, g_state, ground, a0, gamma, probe_grid)
             for omega_d in drive_grid]
    columns = run_parallel(_map_column, tasks, workers)
    return TransmissionMap(drive_grid=drive_grid, probe_grid=probe_grid,
                           transmission=np.array([c[1] for c in columns]),
                           polaritons=np.array([c[0] for c in columns]))


def equal_width_drive(transmission_map):
    """Drive frequency whose doublet has the most nearly equal peak widths.

    Returns ``(omega_d, index, width_mismatch)``; columns without a
    resolved doublet are skipped.
    """
    best = None
    for i, omega_d in enumerate(transmission_map.drive_grid):
        try:
            peaks = find_split_peaks(transmission_map.trace(i))
        except DetectionError:
            continue
        if not peaks.split:
            continue
        mismatch = abs(peaks.widths[1] - peaks.widths[0])
        if best is None or mismatch < best[2]:
            best = (float(omega_d), i, float(mismatch))
    if best is None:
        raise DetectionError('no column of the map shows a split doublet')
    return best
