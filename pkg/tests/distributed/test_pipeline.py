import os
import unittest
from unittest import mock
import numpy as np
from cellfree.channel.channel_set import (
    ChannelSet, draw_channel_set, draw_iid_channel_set)
from cellfree.distributed.exchange import count_overhead
from cellfree.distributed.pipeline import (
    PipelineError, block_kind, fuse_theta, resolve_threads, run_block,
    run_distributed, evaluate_rho, tune_rho)
from cellfree.system.config import SystemConfig, create_default_config
from cellfree.system.scenario import build_scenario


class TestBlockKinds(unittest.TestCase):
    def test_four_bss(self):
        kinds = [block_kind(l, 4, 6) for l in range(1, 7)]
        self.assertEqual(kinds, ['Ini', 'Mid1', 'Mid1', 'Mid2', 'Mid3', 'Out'])

    def test_two_bss(self):
        kinds = [block_kind(l, 2, 4) for l in range(1, 5)]
        self.assertEqual(kinds, ['Ini', 'Mid2', 'Mid3', 'Out'])

    def test_invalid(self):
        with self.assertRaises(ValueError):
            block_kind(1, 4, 3)
        with self.assertRaises(ValueError):
            block_kind(0, 2, 4)


class TestHelpers(unittest.TestCase):
    def test_fuse_theta(self):
        theta = np.array([[np.exp(0.1j), 1.0], [np.exp(0.3j), -1.0]])
        fused = fuse_theta(theta)
        self.assertTrue(abs(fused[0] - np.exp(0.2j)) < 1e-12)
        # exact cancellation falls back to phase zero
        self.assertTrue(fused[1] == 1.0)

    def test_resolve_threads(self):
        with mock.patch.dict(os.environ, {}, clear=True):
            self.assertEqual(resolve_threads(None, default=4), 4)
            self.assertEqual(resolve_threads(2, default=4), 2)
        with mock.patch.dict(os.environ, {'CELLFREE_THREADS': '3'}):
            self.assertEqual(resolve_threads(None, default=4), 3)
            self.assertEqual(resolve_threads(8, default=4), 3)
        with mock.patch.dict(os.environ, {'CELLFREE_THREADS': 'many'}):
            with self.assertRaises(ValueError):
                resolve_threads(None)


class TestRunDistributed(unittest.TestCase):
    def setUp(self):
        self._config = SystemConfig(B=3, R=2, K=2, N=4, N_t=2, noise_power=1.0,
                                    seed=1)
        rng = np.random.default_rng(3)
        self._channels = draw_iid_channel_set(rng, 3, 2, 2, 4, 2)
        self._prec = 1e-9

    def test_feasible_outputs(self):
        result = run_distributed(self._channels, self._config)
        L = self._config.get_number_of_blocks()
        self.assertEqual(len(result.wsr_trace), L)
        self.assertEqual(len(result.consensus_trace), L)
        for b in range(3):
            power = np.sum(np.abs(result.W_final[b]) ** 2)
            self.assertTrue(abs(power - 1.0) < self._prec)
        self.assertTrue(np.all(np.abs(np.abs(result.theta_by_bs) - 1.0) < self._prec))
        self.assertTrue(np.all(np.abs(np.abs(result.theta_final) - 1.0) < self._prec))
        self.assertTrue(np.all(result.wsr_trace >= 0.0))
        self.assertEqual(result.degenerate_count, 0)

    def test_message_count(self):
        result = run_distributed(self._channels, self._config)
        L = self._config.get_number_of_blocks()
        self.assertEqual(result.get_number_of_messages(), 3 * (L - 1))
        self.assertEqual(result.message_count, count_overhead(3, L, 2, 2, 4))

    def test_thread_counts_agree(self):
        sequential = run_distributed(self._channels, self._config, sequential=True)
        for threads in (1, 2, 8):
            threaded = run_distributed(self._channels, self._config,
                                       threads=threads)
            self.assertTrue(np.array_equal(threaded.W_final, sequential.W_final))
            self.assertTrue(np.array_equal(threaded.theta_by_bs,
                                           sequential.theta_by_bs))
            self.assertTrue(np.array_equal(threaded.wsr_trace,
                                           sequential.wsr_trace))
            self.assertEqual(threaded.message_trace, sequential.message_trace)

    def test_power_after_every_block(self):
        powers = []

        def recorder(state, l, kind, inbox, channels, config):
            state, outbox = run_block(state, l, kind, inbox, channels, config)
            powers.append(np.sum(np.abs(state.W) ** 2))
            return state, outbox

        with mock.patch('cellfree.distributed.pipeline.run_block',
                        side_effect=recorder):
            run_distributed(self._channels, self._config, sequential=True)
        L = self._config.get_number_of_blocks()
        self.assertEqual(len(powers), 3 * L)
        for power in powers:
            self.assertTrue(power <= 1.0 + self._prec)

    def test_seed_changes_initialization(self):
        first = run_distributed(self._channels, self._config, seed=1)
        second = run_distributed(self._channels, self._config, seed=2)
        self.assertFalse(np.array_equal(first.theta_by_bs, second.theta_by_bs))

    def test_single_bs(self):
        config = self._config.replace(B=1)
        channels = draw_iid_channel_set(np.random.default_rng(4), 1, 2, 2, 4, 2)
        result = run_distributed(channels, config)
        self.assertEqual(result.message_count, 0)
        self.assertEqual(result.get_number_of_messages(), 0)
        self.assertTrue(np.all(result.consensus_trace == 0.0))

    def test_non_finite_channels(self):
        channels = self._channels
        h = np.array(channels.h)
        h[1] = np.nan
        broken = ChannelSet(channels.G, channels.v, h)
        with self.assertRaises(PipelineError) as cm:
            run_distributed(broken, self._config, sequential=True)
        self.assertEqual(cm.exception.b, 1)
        self.assertEqual(cm.exception.block, 1)


class TestConsensus(unittest.TestCase):
    def setUp(self):
        self._config = create_default_config()

    def _run(self, config, seed):
        channels = draw_channel_set(build_scenario(config, seed), seed)
        return run_distributed(channels, config.replace(seed=seed), seed=seed,
                               sequential=True)

    def test_consensus_decays(self):
        seeds = range(5)
        decayed = 0
        for seed in seeds:
            trace = self._run(self._config, seed).consensus_trace
            if trace[-1] < 0.1 * trace[0]:
                decayed += 1
        self.assertTrue(decayed >= 0.9 * len(seeds), decayed)

    def test_common_target_reached(self):
        result = self._run(self._config, 0)
        spread = np.max(np.abs(result.theta_by_bs - result.theta_final))
        self.assertTrue(spread < 0.5, spread)

    def test_single_bs_ascent(self):
        config = self._config.replace(B=1, N=4, L=8)
        seeds = range(10)
        ascending = 0
        for seed in seeds:
            trace = self._run(config, seed).wsr_trace[1:]
            steps = np.diff(trace)
            if np.all(steps >= -1e-9 * np.maximum(1.0, trace[:-1])):
                ascending += 1
        self.assertTrue(ascending >= 0.9 * len(seeds), ascending)


class TestTuneRho(unittest.TestCase):
    def setUp(self):
        self._config = SystemConfig(B=2, R=1, K=2, N=4, N_t=2, noise_power=1.0,
                                    rho=0.5)
        rng = np.random.default_rng(8)
        self._batch = [draw_iid_channel_set(rng, 2, 1, 2, 4, 2) for _ in range(2)]

    def test_improves_on_start(self):
        grid = (0.1, 1.0)
        rho, best_loss = tune_rho(self._batch, self._config, grid=grid,
                                  max_rounds=2)
        self.assertEqual(rho.shape, (2,))
        self.assertTrue(all(value in grid for value in rho))
        start = evaluate_rho(self._batch, self._config, (1.0, 1.0))
        self.assertTrue(best_loss <= start)
        self.assertTrue(abs(best_loss - evaluate_rho(self._batch, self._config,
                                                     rho)) < 1e-12)

    def test_single_value_grid(self):
        rho, best_loss = tune_rho(self._batch, self._config, grid=(2.0,))
        self.assertTrue(np.all(rho == 2.0))

    def test_invalid_grid(self):
        with self.assertRaises(ValueError):
            tune_rho(self._batch, self._config, grid=(0.0, 1.0))
        with self.assertRaises(ValueError):
            tune_rho(self._batch, self._config, grid=())


if __name__ == "__main__":
    unittest.main()
