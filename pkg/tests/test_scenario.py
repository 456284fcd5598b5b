import unittest
import numpy as np
from cellfree.system.config import SystemConfig
from cellfree.system.scenario import (
    build_scenario, create_bs_positions, create_ris_positions,
    create_ue_positions, create_rng, path_loss)


class TestScenario(unittest.TestCase):
    def setUp(self):
        self._prec = 1e-12

    def test_bs_positions(self):
        positions = create_bs_positions(4)
        self.assertTrue(np.all(
            np.abs(positions[:, 0] - [50.0, 100.0, 150.0, 200.0]) < self._prec))
        self.assertTrue(np.all(positions[:, 1] == -50.0))
        self.assertTrue(np.all(positions[:, 2] == 3.0))

    def test_ris_positions(self):
        positions = create_ris_positions(2)
        expected = [[75.0, 10.0, 6.0], [125.0, 10.0, 6.0]]
        self.assertTrue(np.all(np.abs(positions - expected) < self._prec))
        positions = create_ris_positions(1)
        self.assertTrue(np.all(np.abs(positions - [[100.0, 10.0, 6.0]]) < self._prec))
        positions = create_ris_positions(3)
        self.assertTrue(abs(positions[1, 0] - 100.0) < self._prec)

    def test_ue_positions(self):
        positions = create_ue_positions(50, seed=3)
        radii = np.hypot(positions[:, 0] - 75.0, positions[:, 1])
        self.assertTrue(np.all(radii <= 5.0))
        self.assertTrue(np.all(positions[:, 2] == 1.5))

    def test_ue_streams_are_independent(self):
        positions_4 = create_ue_positions(4, seed=7)
        positions_5 = create_ue_positions(5, seed=7)
        self.assertTrue(np.array_equal(positions_4, positions_5[:4]))
        self.assertFalse(np.array_equal(positions_4, create_ue_positions(4, seed=8)))

    def test_path_loss(self):
        self.assertTrue(abs(path_loss(1.0, G0=1e-3, d0=1.0, alpha=2.8) - 1e-3) < 1e-15)
        self.assertTrue(abs(path_loss(10.0, alpha=2.0) - 1e-5) < 1e-17)
        with self.assertRaises(ValueError):
            path_loss(0.0)

    def test_build_scenario(self):
        config = SystemConfig(B=3, R=2, K=5)
        scenario = build_scenario(config, seed=11)
        self.assertEqual(scenario.ue_positions.shape, (5, 3))
        d = np.linalg.norm(scenario.bs_positions[0] - scenario.ris_positions[1])
        gain = scenario.get_bs_ris_gain(0, 1)
        self.assertTrue(abs(gain - 1e-3 * d ** -2.0) < 1e-12 * gain)
        again = build_scenario(config, seed=11)
        self.assertTrue(np.array_equal(scenario.ue_positions, again.ue_positions))

    def test_rng_streams(self):
        a = create_rng(0, 'G', 1, 2).random(3)
        b = create_rng(0, 'G', 1, 2).random(3)
        c = create_rng(0, 'G', 2, 1).random(3)
        self.assertTrue(np.array_equal(a, b))
        self.assertFalse(np.array_equal(a, c))


if __name__ == "__main__":
    unittest.main()
