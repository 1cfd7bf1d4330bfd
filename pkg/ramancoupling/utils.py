# Author: ramancoupling developers
# Created: October 2026

__all__ = ['Options', 'ghz', 'mhz', 'ns', 'to_ghz', 'to_mhz', 'to_ns',
           'dbm_to_mw', 'mw_to_dbm', 'write_csv', 'read_csv', 'sha256_file',
           'write_manifest', 'run_parallel']

import csv
import hashlib
import json
import logging
import optparse
import os
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from .errors import ConfigError

log = logging.getLogger(__name__)

TWO_PI = 2 * np.pi


def ghz(value):
    """Ordinary frequency in GHz -> angular frequency in rad/s."""
    return TWO_PI * 1e9 * np.asarray(value, dtype=float)[()]


def mhz(value):
    return TWO_PI * 1e6 * np.asarray(value, dtype=float)[()]


def ns(value):
    return 1e-9 * np.asarray(value, dtype=float)[()]


def to_ghz(omega):
    return np.asarray(omega, dtype=float)[()] / (TWO_PI * 1e9)


def to_mhz(omega):
    return np.asarray(omega, dtype=float)[()] / (TWO_PI * 1e6)


def to_ns(seconds):
    return np.asarray(seconds, dtype=float)[()] * 1e9


def dbm_to_mw(power_dbm):
    return 10.0 ** (np.asarray(power_dbm, dtype=float)[()] / 10.0)


def mw_to_dbm(power_mw):
    return 10.0 * np.log10(np.asarray(power_mw, dtype=float)[()])


def _format(value, fmt):
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        return '%d' % value
    if isinstance(value, str):
        return value
    value = float(value)
    if np.isnan(value):
        return 'nan'
    return fmt % value


def write_csv(path, header, rows, fmt='%.12g'):
    """Write rows with a fixed float format so reruns are byte-identical."""
    with open(path, 'w', newline='') as f:
        writer = csv.writer(f, lineterminator='\n')
        writer.writerow(header)
        for row in rows:
            writer.writerow([_format(value, fmt) for value in row])
    log.debug('wrote %s', path)
    return path


def read_csv(path, header):
    """Read a numeric CSV with the expected ``header``.

    Returns
    -------
    columns : list of ndarray
      One float array per header column.
    """
    try:
        with open(path, newline='') as f:
            reader = csv.reader(f)
            found = [name.strip() for name in next(reader, [])]
            if found != list(header):
                raise ConfigError('%s: expected header %s, got %s'
                                  % (path, ','.join(header), ','.join(found)))
            rows = [[float(value) for value in row] for row in reader if row]
    except (OSError, ValueError) as msg:
        if isinstance(msg, ConfigError):
            raise
        raise ConfigError('%s: %s' % (path, msg))
    if not rows:
        raise ConfigError('%s: no data rows' % (path,))
    if any(len(row) != len(header) for row in rows):
        raise ConfigError('%s: ragged rows' % (path,))
    data = np.array(rows, dtype=float)
    return [data[:, i] for i in range(len(header))]


def sha256_file(path, blocksize=1 << 16):
    digest = hashlib.sha256()
    with open(path, 'rb') as f:
        for block in iter(lambda: f.read(blocksize), b''):
            digest.update(block)
    return digest.hexdigest()


def write_manifest(path, command, version, config, seed, workers, wall_time,
                   outputs, results):
    """Write the JSON run manifest listing every output with its hash."""
    manifest = dict(command=command, version=version, config=config, seed=seed,
                    workers=workers, wall_time_s=round(wall_time, 3),
                    outputs=[dict(path=os.path.basename(p), sha256=sha256_file(p))
                             for p in outputs],
                    results=results)
    with open(path, 'w') as f:
        json.dump(manifest, f, indent=2, sort_keys=True, default=_jsonable)
        f.write('\n')
    return manifest


def _jsonable(value):
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    raise TypeError(repr(value))


def run_parallel(func, items, workers=1):
    """Map ``func`` over ``items`` keeping input order.

    ``workers > 1`` uses a process pool; ``func`` must then be
    picklable (a module-level function or a partial of one).
    """
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [func(item) for item in items]
    with ProcessPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(func, items))


class Options(optparse.Values):
    """Holds option keys and values.

    Examples
    --------

      >>> from ramancoupling.utils import Options
      >>> options = Options(seed=4)
      >>> options.get(seed=5)
      4
      >>> options.get(workers=1)
      1

    See also
    --------
    ramancoupling.script_options
    """

    def __init__(self, *args, **kws):
        if len(args) == 0:
            optparse.Values.__init__(self, kws)
        elif len(args) == 1:
            arg = args[0]
            if isinstance(arg, Options):
                self.__dict__ = arg.__dict__
                self.__dict__.update(**kws)
            elif isinstance(arg, optparse.Values):
                optparse.Values.__init__(self, arg.__dict__)
                self.__dict__.update(**kws)
            elif arg is None:
                optparse.Values.__init__(self, kws)
            else:
                raise NotImplementedError(repr(arg))
        else:
            raise NotImplementedError(repr(args))

    def get(self, **kws):
        """Return option value, ``options.get(key=default)``.

        A missing or None option is set to the default first.
        """
        assert len(kws) == 1, repr(kws)
        key, default = list(kws.items())[0]
        if key not in self.__dict__:
            log.debug('Options.get: adding new option: %s=%r', key, default)
            self.__dict__[key] = default
        value = self.__dict__[key]
        if value is None:
            value = self.__dict__[key] = default
        return value
