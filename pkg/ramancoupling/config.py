"""JSON run configuration.

Keys carry their unit as a suffix (``_ghz``, ``_mhz``, ``_ns``, ``_dbm``);
values are converted once at load to rad/s, seconds and mW, and stored
under the key with the suffix removed. Unknown keys are rejected.
"""
# Author: ramancoupling developers
# Created: October 2026

__all__ = ['RunConfig', 'load_config', 'parse_config', 'SYSTEM_SCHEMA', 'BLOCK_SCHEMAS']

import json
import logging
import os
from dataclasses import dataclass, field

from .errors import ConfigError, RamanCouplingError
from .model import SystemParams
from .utils import dbm_to_mw, ghz, mhz, ns

log = logging.getLogger(__name__)

REQUIRED = object()

UNITS = (('_ghz', ghz), ('_mhz', mhz), ('_ns', ns), ('_dbm', dbm_to_mw))

# key -> (kind, default)
SYSTEM_SCHEMA = {
    'omega_ge_ghz': ('float', REQUIRED),
    'omega_r_ghz': ('float', REQUIRED),
    'g_mhz': ('float', REQUIRED),
    'alpha_ghz': ('float', REQUIRED),
    'kappa_mhz': ('float', 0.0),
    'gamma_mhz': ('float', 0.0),
    'n_transmon': ('int', 5),
    'n_fock': ('int', 6),
    'seed': ('int', 0),
}

BLOCK_SCHEMAS = {
    'spectrum': {
        'omega_max_ghz': ('float', 0.4),
        'n_points': ('int', 41),
        'n_steps': ('int', None),
        'map_omega_ghz': ('float', None),
        'map_drive_span_mhz': ('float', 40.0),
        'map_drive_points': ('int', 41),
        'map_probe_span_mhz': ('float', 40.0),
        'map_probe_points': ('int', 401),
    },
    'stark': {
        'omega_max_ghz': ('float', 0.15),
        'n_points': ('int', 16),
        'orders': ('ints', [2, 6]),
        'n_steps': ('int', None),
        'method': ('str', 'midpoint'),
        'transport': ('bool', True),
    },
    'dynamics': {
        'total_times_ns': ('floats', [50.0]),
        'rise_times_ns': ('floats', [0.2, 1.0, 2.0, 5.0]),
        'omega_max_ghz': ('float', 0.3),
        'n_steps': ('int', None),
        'n_samples': ('int', 201),
        'time_series': ('bool', True),
        'stark_solution': ('path', None),
    },
    'fit': {
        'trace': ('path', None),
        'gtilde_mhz': ('float', 3.1),
        'kappa_mhz': ('float', 6.6),
        'gamma_mhz': ('float', 6.6),
        'omega_d0_ghz': ('float', 7.126),
        'span_mhz': ('float', 50.0),
        'n_points': ('int', 200),
        'noise': ('float', 0.02),
    },
    'calibrate': {
        'measurements': ('path', None),
        'k_mhz': ('float', 20.0),
        'powers_dbm': ('floats', [-10.0, -7.0, -4.0, -1.0, 2.0, 5.0]),
        'noise': ('float', 0.05),
        'order_omega': ('int', 6),
    },
}


def _strip_unit(key):
    for suffix, convert in UNITS:
        if key.endswith(suffix):
            return key[:-len(suffix)], convert
    return key, None


def _check_value(where, kind, value):
    if kind in ('float', 'int') and isinstance(value, bool):
        raise ConfigError('%s: expected a number, got a boolean' % where)
    if kind == 'float':
        if not isinstance(value, (int, float)):
            raise ConfigError('%s: expected a number, got %r' % (where, value))
        return float(value)
    if kind == 'int':
        if not isinstance(value, int):
            raise ConfigError('%s: expected an integer, got %r' % (where, value))
        return value
    if kind == 'bool':
        if not isinstance(value, bool):
            raise ConfigError('%s: expected true or false, got %r' % (where, value))
        return value
    if kind in ('str', 'path'):
        if not isinstance(value, str):
            raise ConfigError('%s: expected a string, got %r' % (where, value))
        return value
    if kind in ('floats', 'ints'):
        if not isinstance(value, list) or not value:
            raise ConfigError('%s: expected a non-empty list, got %r' % (where, value))
        return [_check_value('%s[%d]' % (where, i), kind[:-1], v) for i, v in enumerate(value)]
    raise NotImplementedError(repr(kind))


def _parse_section(where, data, schema, base_dir):
    if not isinstance(data, dict):
        raise ConfigError('%s: expected an object' % where)
    unknown = sorted(set(data) - set(schema))
    if unknown:
        raise ConfigError('%s: unknown keys %s' % (where, ', '.join(unknown)))
    echo, values = {}, {}
    for key, (kind, default) in schema.items():
        if key in data:
            value = _check_value('%s.%s' % (where, key), kind, data[key])
        elif default is REQUIRED:
            raise ConfigError('%s: missing required key %s' % (where, key))
        else:
            value = default
        echo[key] = value
        name, convert = _strip_unit(key)
        if value is not None and convert is not None:
            value = [float(convert(v)) for v in value] if isinstance(value, list) else float(convert(value))
        if value is not None and kind == 'path':
            value = os.path.normpath(os.path.join(base_dir, value))
        values[name] = value
    return echo, values


@dataclass(frozen=True, eq=False)
class RunConfig:
    """Validated configuration.

    Attributes
    ----------
    system : SystemParams
    seed : int
    blocks : dict
      Per-command settings in SI units (rad/s, s, mW), defaults filled in.
    echo : dict
      The configuration in input units after validation, for the manifest.
    """
    system: SystemParams
    seed: int = 0
    blocks: dict = field(default_factory=dict)
    echo: dict = field(default_factory=dict)

    def block(self, name):
        return self.blocks[name]

    def with_seed(self, seed):
        if seed is None:
            return self
        echo = dict(self.echo, seed=seed)
        return RunConfig(self.system, seed, self.blocks, echo)


def _check_block(name, values):
    for key in ('n_points', 'n_samples', 'map_drive_points', 'map_probe_points'):
        if key in values and values[key] is not None and values[key] < 2:
            raise ConfigError('%s.%s must be at least 2' % (name, key))
    if values.get('n_steps') is not None and values['n_steps'] < 1:
        raise ConfigError('%s.n_steps must be positive' % name)
    for key in ('omega_max', 'span', 'noise', 'map_drive_span', 'map_probe_span'):
        if key in values and not values[key] >= 0:
            raise ConfigError('%s.%s must be non-negative' % (name, key))
    if name in ('spectrum', 'stark', 'dynamics') and not values['omega_max'] > 0:
        raise ConfigError('%s.omega_max_ghz must be positive' % name)
    if name == 'stark':
        if values['method'] not in ('midpoint', 'euler'):
            raise ConfigError("stark.method must be 'midpoint' or 'euler'")
        if any(order < 2 or order % 2 for order in values['orders']):
            raise ConfigError('stark.orders must be even integers >= 2')
    if name == 'dynamics':
        if any(t <= 0 for t in values['total_times'] + values['rise_times']):
            raise ConfigError('dynamics pulse durations must be positive')
    if name == 'calibrate' and values['order_omega'] not in range(2, 7, 2):
        raise ConfigError('calibrate.order_omega must be 2, 4 or 6')


def parse_config(data, base_dir='.'):
    """Validate a configuration mapping and return a :class:`RunConfig`."""
    if not isinstance(data, dict):
        raise ConfigError('configuration must be a JSON object')
    flat = {k: v for k, v in data.items() if k not in BLOCK_SCHEMAS}
    echo, values = _parse_section('config', flat, SYSTEM_SCHEMA, base_dir)
    seed = values.pop('seed')
    if seed < 0:
        raise ConfigError('seed must be non-negative')
    try:
        system = SystemParams(**values)
    except RamanCouplingError as msg:
        raise ConfigError('config: %s' % msg)
    blocks = {}
    for name, schema in BLOCK_SCHEMAS.items():
        block_echo, block = _parse_section(name, data.get(name, {}), schema, base_dir)
        _check_block(name, block)
        if name in data:
            echo[name] = block_echo
        blocks[name] = block
    log.debug('configuration: %s', echo)
    return RunConfig(system=system, seed=seed, blocks=blocks, echo=echo)


def load_config(path):
    """Read and validate a JSON configuration file.

    Relative paths inside the file are resolved against its directory.
    """
    try:
        with open(path) as f:
            data = json.load(f)
    except OSError as msg:
        raise ConfigError('cannot read %s: %s' % (path, msg))
    except ValueError as msg:
        raise ConfigError('%s is not valid JSON: %s' % (path, msg))
    return parse_config(data, base_dir=os.path.dirname(os.path.abspath(path)))
