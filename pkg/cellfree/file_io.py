#!/usr/bin/env python
# -*- coding: utf-8 -*-
from __future__ import absolute_import, division, print_function
import numpy as np


def read_input(filename_input):
    """Read a JSON or YAML configuration file.

    Malformed input raises ``ConfigError`` carrying the line and column
    of the problem.
    """
    import yaml
    from cellfree.system.config import ConfigError
    try:
        with open(filename_input, 'r') as f:
            dict_input = yaml.safe_load(f)
    except IOError as e:
        raise ConfigError('{}: {}'.format(filename_input, e.strerror))
    except yaml.MarkedYAMLError as e:
        mark = e.problem_mark
        if mark is None:
            mark = e.context_mark
        if mark is None:
            raise ConfigError('{}: {}'.format(filename_input, e.problem))
        raise ConfigError('{}:{}:{}: {}'.format(
            filename_input, mark.line + 1, mark.column + 1, e.problem))
    except yaml.YAMLError as e:
        raise ConfigError('{}: {}'.format(filename_input, e))
    return dict_input


def write_run_hdf5(run_result, hdf5_file='run.hdf5'):
    import h5py
    with h5py.File(hdf5_file, 'w') as f:
        for key, value in run_result.to_arrays().items():
            f.create_dataset(key, data=value)


def read_run_hdf5(hdf5_file='run.hdf5'):
    import h5py
    run_data = {}
    with h5py.File(hdf5_file, 'r') as f:
        for key in f.keys():
            run_data[key] = np.array(f[key])
    return run_data


def write_message_trace(records, filename='messages.txt'):
    """One line per message: block, sender, receiver, complex scalar count."""
    with open(filename, 'w') as f:
        f.write('# {:>6s}{:>8s}{:>10s}{:>10s}\n'.format(
            'block', 'sender', 'receiver', 'scalars'))
        for block, sender, receiver, count in records:
            f.write('{:8d}{:8d}{:10d}{:10d}\n'.format(
                block, sender, receiver, count))


def write_channel_dump(channels, filename='channels.csv'):
    """Write every channel coefficient with its (b, r, k, row, col) index.

    Indices not used by a channel kind are written as -1.
    """
    with open(filename, 'w') as f:
        f.write('kind,b,r,k,row,col,real,imag\n')
        N = channels.N
        for b in range(channels.B):
            for r in range(channels.R):
                block = channels.G[b, r * N:(r + 1) * N]
                for (i, j), value in np.ndenumerate(block):
                    _write_coefficient(f, 'G', b, r, -1, i, j, value)
        for r in range(channels.R):
            for k in range(channels.K):
                for i, value in enumerate(channels.v[r, k]):
                    _write_coefficient(f, 'v', -1, r, k, i, 0, value)
        for b in range(channels.B):
            for k in range(channels.K):
                for i, value in enumerate(channels.h[b, k]):
                    _write_coefficient(f, 'h', b, -1, k, i, 0, value)


def _write_coefficient(f, kind, b, r, k, row, col, value):
    f.write('{},{},{},{},{},{},{!r},{!r}\n'.format(
        kind, b, r, k, row, col, float(value.real), float(value.imag)))
