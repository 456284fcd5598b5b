import unittest
import numpy as np
from cellfree.channel.channel_set import (
    ChannelSet, PathParams, composite_channel, draw_channel_set,
    draw_iid_channel_set, draw_path_params, draw_sv_channel)
from cellfree.channel.steering import ula_response, upa_response
from cellfree.system.config import SystemConfig
from cellfree.system.scenario import build_scenario


class TestSalehValenzuela(unittest.TestCase):
    def setUp(self):
        self._prec = 1e-12

    def test_single_los_path(self):
        N = 16
        N_t = 2
        params = PathParams([1.0], [0.3], [0.7], [-0.2])
        G = draw_sv_channel('G', (N, N_t), params)
        expected = np.sqrt(N * N_t) * np.outer(
            upa_response(0.3, 0.7, 4, 4), ula_response(-0.2, N_t).conj())
        self.assertTrue(np.all(np.abs(G - expected) < self._prec))
        self.assertTrue(abs(np.linalg.norm(G) - np.sqrt(N * N_t)) < 1e-10)

    def test_zero_gains(self):
        params = PathParams(np.zeros(3), np.zeros(3), np.zeros(3), np.zeros(3))
        self.assertTrue(np.all(draw_sv_channel('G', (4, 2), params) == 0.0))
        self.assertTrue(np.all(draw_sv_channel('v', (4,), params) == 0.0))
        self.assertTrue(np.all(draw_sv_channel('h', (2,), params) == 0.0))

    def test_errors(self):
        params = PathParams([1.0], [0.0])
        with self.assertRaises(ValueError):
            draw_sv_channel('x', (2,), params)
        with self.assertRaises(ValueError):
            PathParams([1.0, 1.0], [0.0])
        with self.assertRaises(ValueError):
            PathParams([1.0], [2.0])
        with self.assertRaises(ValueError):
            draw_sv_channel('v', (4,), PathParams([], []))

    def test_mean_gain(self):
        rng = np.random.default_rng(0)
        N_t = 2
        gain = 3e-7
        n_draws = 4000
        total = 0.0
        for _ in range(n_draws):
            params = draw_path_params(rng, 3, gain, los=(0.1, 0.0, 0.0))
            h = draw_sv_channel('h', (N_t,), params)
            total += np.linalg.norm(h) ** 2
        ratio = total / n_draws / (N_t * gain)
        print('mean gain ratio {:.4f}'.format(ratio))
        self.assertTrue(abs(ratio - 1.0) < 0.05)


class TestChannelSet(unittest.TestCase):
    def setUp(self):
        self._config = SystemConfig(B=3, R=2, K=2, N=4, N_t=2, seed=5)
        self._channels = draw_channel_set(build_scenario(self._config))
        self._prec = 1e-12

    def test_shapes(self):
        channels = self._channels
        self.assertEqual(channels.G.shape, (3, 8, 2))
        self.assertEqual(channels.v.shape, (2, 2, 4))
        self.assertEqual(channels.h.shape, (3, 2, 2))
        self.assertEqual(channels.v_stack.shape, (2, 8))
        self.assertTrue(np.array_equal(channels.get_G_br(1, 1), channels.G[1, 4:]))

    def test_deterministic(self):
        again = draw_channel_set(build_scenario(self._config))
        self.assertTrue(np.array_equal(self._channels.G, again.G))
        self.assertTrue(np.array_equal(self._channels.v, again.v))
        self.assertTrue(np.array_equal(self._channels.h, again.h))
        other = draw_channel_set(build_scenario(self._config, seed=6), seed=6)
        self.assertFalse(np.array_equal(self._channels.G, other.G))

    def test_composite(self):
        channels = self._channels
        rng = np.random.default_rng(1)
        theta = np.exp(2j * np.pi * rng.random(channels.NR))
        H_hat = channels.get_composite(2, theta)
        for k in range(channels.K):
            h_hat = composite_channel(channels.get_h(2, k), channels.get_G(2),
                                      channels.get_V(k), theta)
            scale = np.linalg.norm(h_hat)
            self.assertTrue(np.all(np.abs(H_hat[:, k] - h_hat) < 1e-12 * scale))

    def test_composite_without_ris(self):
        channels = self._channels.without_ris()
        theta = np.ones(channels.NR, dtype=complex)
        h_hat = composite_channel(channels.get_h(0, 1), channels.get_G(0),
                                  channels.get_V(1), theta)
        self.assertTrue(np.array_equal(h_hat, channels.get_h(0, 1)))

    def test_composite_errors(self):
        channels = self._channels
        theta = np.ones(channels.NR, dtype=complex)
        with self.assertRaises(ValueError):
            composite_channel(channels.get_h(0, 0), channels.get_G(0),
                              channels.get_V(0), 1.5 * theta)
        with self.assertRaises(ValueError):
            composite_channel(channels.get_h(0, 0), channels.get_G(0),
                              channels.get_V(0), theta[:-1])

    def test_merge_bss(self):
        rng = np.random.default_rng(2)
        channels = draw_iid_channel_set(rng, 3, 2, 2, 3, 2)
        merged = channels.merge_bss()
        self.assertEqual((merged.B, merged.N_t), (1, 6))
        theta = np.exp(2j * np.pi * rng.random(channels.NR))
        W = rng.standard_normal((3, 2, 2)) + 1j * rng.standard_normal((3, 2, 2))
        A = sum(channels.get_received(b, theta, W[b]) for b in range(3))
        A_merged = merged.get_received(0, theta, np.concatenate(list(W), axis=0))
        self.assertTrue(np.all(np.abs(A - A_merged) < 1e-10))

    def test_invalid_shapes(self):
        with self.assertRaises(ValueError):
            ChannelSet(np.zeros((1, 5, 2)), np.zeros((2, 1, 2)), np.zeros((1, 1, 2)))


if __name__ == "__main__":
    unittest.main()
