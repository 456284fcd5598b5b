#!/usr/bin/env python
# -*- coding: utf-8 -*-
from multiprocessing import Pool

import numpy as np
from cellfree.analysis.time_measurer import TimeMeasurer
from cellfree.baselines.baselines import (
    mrt_random, mrt_maxao, local_zf_maxao, centralized_fp)
from cellfree.channel.channel_set import draw_channel_set
from cellfree.distributed.pipeline import run_distributed, resolve_threads
from cellfree.system.config import ConfigError, dbm_to_watt
from cellfree.system.scenario import build_scenario, create_rng

ALGORITHMS = ('distributed', 'centralized', 'mrt_random', 'mrt_maxao',
              'local_zf_maxao')
SWEEP_VARS = ('P_dBm', 'N', 'K', 'B', 'R', 'L', 'rho')
CSV_HEADER = ('algorithm,sweep_var,sweep_value,seed,wsr_bits,consensus_err,'
              'msg_complex_scalars,runtime_ms')


class Outcome(object):
    def __init__(self, wsr, consensus_err=0.0, msg_complex_scalars=0):
        self.wsr = float(wsr)
        self.consensus_err = float(consensus_err)
        self.msg_complex_scalars = int(msg_complex_scalars)


def _run_distributed(channels, config, seed):
    result = run_distributed(channels, config, seed=seed)
    return Outcome(result.get_final_wsr(), result.get_final_consensus_error(),
                   result.message_count)


def _run_centralized(channels, config, seed):
    output = centralized_fp(channels, config, rng=create_rng(seed, 'baseline', 0))
    return Outcome(output.wsr, 0.0, output.csi_scalars)


def _baseline_runner(function):
    def run(channels, config, seed):
        output = function(channels, config, rng=create_rng(seed, 'baseline', 0))
        return Outcome(output.wsr)
    return run


class AlgorithmFactory(object):
    def __init__(self, name):
        """

        Parameters
        ----------
        name : str
            One of ``ALGORITHMS``.
        """
        self._name = name

    def create(self):
        name = self._name
        if name == 'distributed':
            return _run_distributed
        elif name == 'centralized':
            return _run_centralized
        elif name == 'mrt_random':
            return _baseline_runner(mrt_random)
        elif name == 'mrt_maxao':
            return _baseline_runner(mrt_maxao)
        elif name == 'local_zf_maxao':
            return _baseline_runner(local_zf_maxao)
        else:
            raise ConfigError('Unknown algorithm: {}'.format(name))


class ResultRow(object):
    def __init__(self, algorithm, sweep_var, sweep_value, seed, wsr_bits,
                 consensus_err, msg_complex_scalars, runtime_ms):
        self.algorithm = algorithm
        self.sweep_var = sweep_var
        self.sweep_value = float(sweep_value)
        self.seed = int(seed)
        self.wsr_bits = float(wsr_bits)
        self.consensus_err = float(consensus_err)
        self.msg_complex_scalars = int(msg_complex_scalars)
        self.runtime_ms = float(runtime_ms)
        for name in ('sweep_value', 'wsr_bits', 'consensus_err', 'runtime_ms'):
            if not np.isfinite(getattr(self, name)):
                raise ValueError('Result field is not finite', name)

    def to_csv_line(self):
        return '{},{},{:.12g},{:d},{:.12g},{:.12g},{:d},{:.3f}'.format(
            self.algorithm, self.sweep_var, self.sweep_value, self.seed,
            self.wsr_bits, self.consensus_err, self.msg_complex_scalars,
            self.runtime_ms)


def apply_sweep(config, sweep_var, value):
    """Copy of ``config`` with the swept quantity set to ``value``."""
    if sweep_var is None or sweep_var == 'none':
        return config
    if sweep_var == 'P_dBm':
        return config.replace(P_max=float(dbm_to_watt(value)))
    if sweep_var == 'rho':
        return config.replace(rho=float(value))
    if sweep_var in ('N', 'K', 'B', 'R', 'L'):
        if float(value) != int(value):
            raise ConfigError('{} must be an integer, got {}'.format(sweep_var, value))
        return config.replace(**{sweep_var: int(value)})
    raise ConfigError('Unknown sweep variable: {}'.format(sweep_var))


class ExperimentSpec(object):
    """One sweep: every algorithm on every (value, seed) pair."""
    def __init__(self, config, sweep_var=None, values=None, seeds=(0,),
                 algorithms=ALGORITHMS, record_runtime=False, threads=None):
        if sweep_var is not None and sweep_var not in SWEEP_VARS:
            raise ConfigError('Unknown sweep variable: {}'.format(sweep_var))
        if sweep_var is not None and not values:
            raise ConfigError('A sweep needs at least one value')
        if not algorithms:
            raise ConfigError('An experiment needs at least one algorithm')
        for name in algorithms:
            AlgorithmFactory(name).create()
        self.config = config
        self.sweep_var = sweep_var
        self.values = [0.0] if sweep_var is None else [float(v) for v in values]
        self.seeds = [int(s) for s in seeds]
        self.algorithms = list(algorithms)
        self.record_runtime = record_runtime
        self.threads = threads
        # validate every swept configuration up front
        for value in self.values:
            apply_sweep(config, sweep_var, value)

    def create_tasks(self):
        return [(self.config, self.sweep_var, value, seed, self.algorithms,
                 self.record_runtime)
                for value in self.values for seed in self.seeds]


def run_task(task):
    config, sweep_var, value, seed, algorithms, record_runtime = task
    swept = apply_sweep(config, sweep_var, value).replace(seed=seed)
    scenario = build_scenario(swept, seed)
    channels = draw_channel_set(scenario, seed)
    rows = []
    for name in algorithms:
        runner = AlgorithmFactory(name).create()
        with TimeMeasurer(name, verbose=False) as tm:
            outcome = runner(channels, swept, seed)
        rows.append(ResultRow(
            name, 'none' if sweep_var is None else sweep_var, value, seed,
            outcome.wsr, outcome.consensus_err, outcome.msg_complex_scalars,
            tm.get_interval_ms() if record_runtime else 0.0))
    return rows


def run_experiment(spec, verbose=False):
    """Run all tasks of ``spec``; rows come back in (value, seed, algorithm) order."""
    tasks = spec.create_tasks()
    n_workers = min(resolve_threads(spec.threads, default=1), len(tasks))
    with TimeMeasurer('Experiment', verbose=verbose):
        if n_workers > 1:
            with Pool(processes=n_workers) as pool:
                results = pool.map(run_task, tasks)
        else:
            results = [run_task(task) for task in tasks]
    return [row for rows in results for row in rows]
