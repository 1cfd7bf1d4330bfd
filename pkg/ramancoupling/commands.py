"""Subcommand pipelines of the ``raman`` script.

Each ``cmd_<name>(config, out_dir, workers)`` runs one pipeline, writes
its CSV files into ``out_dir`` and returns ``(outputs, results)``;
:func:`main` parses the command line, writes ``run_manifest.json`` and
maps errors to exit codes (1 configuration, 2 numerics, 3 fits and peak
detection).
"""
# Author: ramancoupling developers
# Created: October 2026

__all__ = ['main', 'runner', 'cmd_spectrum', 'cmd_stark', 'cmd_dynamics', 'cmd_fit',
           'cmd_calibrate', 'COMMANDS']

import functools
import logging
import math
import os
import sys
import time

import numpy as np

from .config import load_config
from .dynamics import fidelity_sweep, simulate_pi_pulse, write_sweep_csv
from .errors import ConfigError, DetectionError, RamanCouplingError
from .model import DriveParams, FREQUENCY_SCALE
from .resolvent import (CALIBRATION_CSV_HEADER, calibrate_drive_power,
                        read_calibration_csv, stark_shift_resolvent)
from .script_options import (CommandParser, set_calibrate_options, set_dynamics_options,
                             set_fit_options, set_spectrum_options, set_stark_options)
from .spectral import effective_coupling_pt, lambda_system_coupling
from .spectroscopy import (ResponseModel, equal_width_drive, find_split_peaks, fit_response,
                           initial_guess, read_trace_csv, response, synthesize_trace,
                           pair_transitions, synthesize_transmission_map)
from .stark import STEPS_PER_GHZ, read_stark_csv, stark_parallel_transport
from .utils import Options, mw_to_dbm, run_parallel, to_ghz, to_mhz, write_csv, write_manifest
from .version import version

log = logging.getLogger(__name__)

SPECTRUM_CSV_HEADER = ['omega_2pi_ghz', 'gtilde_pt_2pi_mhz', 'gtilde_exact_2pi_mhz',
                       'gtilde_lambda_2pi_mhz']
FIT_CSV_HEADER = ['parameter', 'value', 'stderr']
RESIDUAL_CSV_HEADER = ['probe_ghz', 'transmission', 'model', 'residual']
CALIBRATION_RESULT_HEADER = ['power_dbm', 'delta_measured_2pi_mhz', 'delta_fit_2pi_mhz',
                             'residual_2pi_mhz']


def _default_steps(omega_max):
    return max(200, int(math.ceil(4 * STEPS_PER_GHZ * omega_max / FREQUENCY_SCALE)))


def _transport(params, block):
    omega_max = block['omega_max']
    n_steps = block['n_steps'] or _default_steps(omega_max)
    return stark_parallel_transport(params, omega_max, n_steps,
                                    method=block.get('method', 'midpoint'))


def cmd_spectrum(config, out_dir, workers=1):
    """Effective coupling versus drive amplitude by three methods.

    The first-order and transport couplings carry opposite signs, so
    every column holds the magnitude |g~|.
    """
    params = config.system
    block = config.block('spectrum')
    grid = np.linspace(0.0, block['omega_max'], block['n_points'])
    stark = _transport(params, block)
    rows = []
    for omega in grid:
        drive = DriveParams(omega_amp=omega)
        rows.append((to_ghz(omega),
                     to_mhz(abs(effective_coupling_pt(params, drive))),
                     to_mhz(abs(stark.effective_coupling(omega))),
                     to_mhz(abs(lambda_system_coupling(params, drive)))))
    path = os.path.join(out_dir, 'gtilde_vs_omega.csv')
    outputs = [write_csv(path, SPECTRUM_CSV_HEADER, rows)]
    results = dict(gtilde_pt_2pi_mhz=rows[-1][1], gtilde_exact_2pi_mhz=rows[-1][2],
                   gtilde_lambda_2pi_mhz=rows[-1][3], omega_max_2pi_ghz=rows[-1][0])
    map_omega = block['map_omega']
    if map_omega is not None:
        if map_omega > block['omega_max']:
            raise ConfigError('spectrum.map_omega_ghz exceeds spectrum.omega_max_ghz')
        if not (params.kappa > 0 and params.gamma > 0):
            raise ConfigError('the transmission map needs kappa_mhz > 0 and gamma_mhz > 0')
        drive_grid = stark.drive_frequency(map_omega) + np.linspace(
            -0.5 * block['map_drive_span'], 0.5 * block['map_drive_span'], block['map_drive_points'])
        probe_center = np.mean(pair_transitions(params, map_omega, stark.drive_frequency(map_omega)))
        probe_grid = probe_center + np.linspace(
            -0.5 * block['map_probe_span'], 0.5 * block['map_probe_span'], block['map_probe_points'])
        transmission_map = synthesize_transmission_map(params, stark, drive_grid, probe_grid,
                                                       map_omega, workers=workers)
        path = os.path.join(out_dir, 'transmission_map.csv')
        transmission_map.to_csv(path)
        outputs.append(path)
        try:
            results['equal_width_drive_ghz'] = to_ghz(equal_width_drive(transmission_map)[0])
        except DetectionError as msg:
            log.warning('no equal-width column in the map: %s', msg)
    return outputs, results


def _resolvent_shift(params, order, delta_jc, omega):
    return stark_shift_resolvent(params, omega, order, delta_jc=delta_jc).delta_f0g1


def cmd_stark(config, out_dir, workers=1):
    """Stark shift of the resonance from the resolvent series and by transport."""
    params = config.system
    block = config.block('stark')
    grid = np.linspace(0.0, block['omega_max'], block['n_points'])
    header, columns = ['omega_2pi_ghz'], [to_ghz(grid)]
    for order in block['orders']:
        delta_jc = stark_shift_resolvent(params, 0.0, order).delta_jc
        shifts = run_parallel(functools.partial(_resolvent_shift, params, order, delta_jc),
                              grid, workers)
        header.append('delta_order%d_2pi_mhz' % order)
        columns.append(to_mhz(np.array(shifts)))
    outputs = []
    if block['transport']:
        stark = _transport(params, block)
        header.append('delta_transport_2pi_mhz')
        columns.append(to_mhz(stark.stark_shift(grid)))
        path = os.path.join(out_dir, 'stark_solution.csv')
        stark.to_csv(path)
        outputs.append(path)
    path = os.path.join(out_dir, 'stark_shift.csv')
    outputs.insert(0, write_csv(path, header, zip(*columns)))
    results = {name: float(column[-1]) for name, column in zip(header[1:], columns[1:])}
    return outputs, results


def cmd_dynamics(config, out_dir, workers=1):
    """Chirped pi-pulse infidelity over (T, rise time) and one time series."""
    params = config.system
    block = config.block('dynamics')
    if block['stark_solution']:
        stark = read_stark_csv(block['stark_solution'])
    else:
        stark = _transport(params, block)
    rows = fidelity_sweep(params, stark, block['total_times'], block['rise_times'], workers)
    if not rows:
        raise ConfigError('dynamics: no (T, rise) pair satisfies 2 rise <= T')
    path = os.path.join(out_dir, 'fidelity_sweep.csv')
    write_sweep_csv(path, rows)
    outputs = [path]
    if block['time_series']:
        total_time, rise_time = rows[0][:2]
        result = simulate_pi_pulse(params, stark, total_time, rise_time,
                                   n_samples=block['n_samples'])
        path = os.path.join(out_dir, 'time_series.csv')
        result.to_csv(path)
        outputs.append(path)
    best = min(rows, key=lambda row: row[2])
    results = dict(best_total_time_ns=best[0] * 1e9, best_rise_time_ns=best[1] * 1e9,
                   best_one_minus_F=best[2])
    return outputs, results


def cmd_fit(config, out_dir, workers=1):
    """Fit the transmission response to a trace file or a synthetic trace."""
    block = config.block('fit')
    outputs = []
    if block['trace']:
        trace = read_trace_csv(block['trace'])
    else:
        model = ResponseModel(a0=block['kappa'] * block['omega_d0'], gtilde=block['gtilde'],
                              omega_d0=block['omega_d0'], kappa=block['kappa'],
                              gamma=block['gamma'])
        probe = block['omega_d0'] + np.linspace(-0.5 * block['span'], 0.5 * block['span'],
                                                block['n_points'])
        trace = synthesize_trace(model, probe, block['noise'], rng=np.random.default_rng(config.seed))
        path = os.path.join(out_dir, 'trace.csv')
        trace.to_csv(path)
        outputs.append(path)
    peaks = find_split_peaks(trace)
    fit = fit_response(trace, initial_guess(trace, peaks))
    model, stderr = fit.model, fit.stderr
    rows = [('a0', model.a0, stderr[0]),
            ('gtilde_2pi_mhz', to_mhz(model.gtilde), to_mhz(stderr[1])),
            ('omega_d0_2pi_ghz', to_ghz(model.omega_d0), to_ghz(stderr[2])),
            ('kappa_2pi_mhz', to_mhz(model.kappa), to_mhz(stderr[3])),
            ('gamma_2pi_mhz', to_mhz(model.gamma), to_mhz(stderr[4]))]
    path = os.path.join(out_dir, 'fit.csv')
    outputs.append(write_csv(path, FIT_CSV_HEADER, rows))
    fitted = response(model, trace.frequencies)
    path = os.path.join(out_dir, 'fit_residuals.csv')
    outputs.append(write_csv(path, RESIDUAL_CSV_HEADER,
                             zip(to_ghz(trace.frequencies), trace.transmission, fitted,
                                 trace.transmission - fitted)))
    results = {name: value for name, value, _ in rows}
    results['split'] = peaks.split
    return outputs, results


def cmd_calibrate(config, out_dir, workers=1):
    """Fit Omega = k sqrt(P) to measured or synthetic Stark shifts."""
    params = config.system
    block = config.block('calibrate')
    order = block['order_omega']
    outputs = []
    if block['measurements']:
        data = read_calibration_csv(block['measurements'])
    else:
        rng = np.random.default_rng(config.seed)
        delta_jc = stark_shift_resolvent(params, 0.0, order).delta_jc
        data = []
        for power in block['powers']:
            shift = _resolvent_shift(params, order, delta_jc, block['k'] * np.sqrt(power))
            data.append((power, shift * (1 + block['noise'] * rng.standard_normal())))
        path = os.path.join(out_dir, 'measurements.csv')
        outputs.append(write_csv(path, CALIBRATION_CSV_HEADER,
                                 [(mw_to_dbm(p), to_mhz(d)) for p, d in data]))
    fit = calibrate_drive_power(params, data, order)
    rows = [(mw_to_dbm(p), to_mhz(d), to_mhz(d - r), to_mhz(r))
            for (p, d), r in zip(data, fit.residuals)]
    path = os.path.join(out_dir, 'calibration.csv')
    outputs.append(write_csv(path, CALIBRATION_RESULT_HEADER, rows))
    results = dict(k_2pi_mhz_per_sqrt_mw=to_mhz(fit.k),
                   k_stderr_2pi_mhz_per_sqrt_mw=to_mhz(fit.stderr))
    return outputs, results


COMMANDS = {
    'spectrum': (cmd_spectrum, set_spectrum_options),
    'stark': (cmd_stark, set_stark_options),
    'dynamics': (cmd_dynamics, set_dynamics_options),
    'fit': (cmd_fit, set_fit_options),
    'calibrate': (cmd_calibrate, set_calibrate_options),
}

USAGE = 'usage: raman {%s} --config PATH [options]\n' % ','.join(COMMANDS)


def _configure_logging(options):
    level = logging.WARNING
    if options.get(verbose=False):
        level = logging.INFO
    if options.get(debug=False):
        level = logging.DEBUG
    logging.basicConfig(level=level, format='%(levelname)s %(name)s: %(message)s')
    logging.getLogger('ramancoupling').setLevel(level)


def runner(name, parser, options, args):
    if args:
        parser.error('unexpected arguments: %s' % ' '.join(args))
    if options.config is None:
        parser.error('expected --config but got nothing')
    workers = options.get(workers=1)
    if workers < 1:
        parser.error('--workers must be positive')
    _configure_logging(options)
    config = load_config(options.config).with_seed(options.seed)
    out_dir = options.get(out='.')
    os.makedirs(out_dir, exist_ok=True)
    start = time.time()
    outputs, results = COMMANDS[name][0](config, out_dir, workers)
    write_manifest(os.path.join(out_dir, 'run_manifest.json'), name, version, config.echo,
                   config.seed, workers, time.time() - start, outputs, results)
    log.info('%s: wrote %s', name, ', '.join(os.path.basename(p) for p in outputs))
    return 0


def main(argv=None):
    """Run a subcommand and return its exit code."""
    argv = sys.argv[1:] if argv is None else list(argv)
    if not argv or argv[0] in ('-h', '--help'):
        sys.stdout.write(USAGE)
        return 0 if argv else 1
    name = argv[0]
    if name not in COMMANDS:
        sys.stderr.write('unknown command %r\n' % name + USAGE)
        return 1
    parser = CommandParser(prog='raman ' + name)
    COMMANDS[name][1](parser)
    try:
        options, args = parser.parse_args(argv[1:])
        return runner(name, parser, Options(options), args)
    except RamanCouplingError as msg:
        log.error('%s', msg)
        sys.stderr.write('raman %s: %s\n' % (name, msg))
        return msg.exit_code
