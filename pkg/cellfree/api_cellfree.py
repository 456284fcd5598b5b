import numpy as np
from cellfree.baselines.baselines import centralized_fp
from cellfree.channel.channel_set import draw_channel_set
from cellfree.distributed.pipeline import (
    run_distributed, make_tuning_batch, tune_rho, DEFAULT_RHO_GRID)
from cellfree.harness.experiment import AlgorithmFactory
from cellfree.system.scenario import build_scenario, create_rng


class CellFreeSimulation(object):
    """One deployment and channel draw with the algorithms run on it.

    config : SystemConfig; its seed drives positions, channels and RIS
    initialization unless ``seed`` is given.
    """
    def __init__(self, config, seed=None, log_level=0):
        if seed is not None:
            config = config.replace(seed=seed)
        self._config = config
        self._log_level = log_level

        self._scenario = build_scenario(config)
        self._channels = draw_channel_set(self._scenario)

        # run_distributed
        self._run_result = None

        # run_centralized
        self._centralized = None

    def get_config(self):
        return self._config

    def get_scenario(self):
        return self._scenario

    def get_channels(self):
        return self._channels

    def set_rho(self, rho):
        self._config = self._config.replace(rho=tuple(float(x) for x in rho))

    # Distributed
    def run_distributed(self, threads=None, sequential=False):
        self._run_result = run_distributed(
            self._channels, self._config, threads=threads,
            sequential=sequential, verbose=(self._log_level > 0))
        return self._run_result

    def get_run_result(self):
        return self._run_result

    # Centralized
    def run_centralized(self):
        self._centralized = centralized_fp(
            self._channels, self._config,
            rng=create_rng(self._config.seed, 'baseline', 0),
            verbose=(self._log_level > 1))
        return self._centralized

    def run_baseline(self, name):
        """WSR of a named algorithm (see ``AlgorithmFactory``)."""
        runner = AlgorithmFactory(name).create()
        return runner(self._channels, self._config, self._config.seed).wsr

    # Penalty selection
    def tune_rho(self, batch_size=8, grid=DEFAULT_RHO_GRID, max_rounds=3):
        if self._log_level > 0:
            print('Tuning rho on {} held-out draws'.format(batch_size))
        batch = make_tuning_batch(self._config, batch_size)
        rho, best_loss = tune_rho(batch, self._config, grid=grid,
                                  max_rounds=max_rounds,
                                  verbose=(self._log_level > 0))
        self.set_rho(rho)
        return np.array(rho), best_loss

    def write_hdf5(self, filename='run.hdf5'):
        if self._run_result is None:
            print('Warning: distributed run has not been done yet.')
            return False
        self._run_result.write_hdf5(filename)
        return True
