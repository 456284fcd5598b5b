import os
import shutil
import tempfile
import unittest
import numpy as np
from cellfree.api_cellfree import CellFreeSimulation
from cellfree.system.config import SystemConfig


class TestCellFreeSimulation(unittest.TestCase):
    def setUp(self):
        config = SystemConfig(B=2, R=1, K=2, N=4, N_t=2, bcd_max_sweeps=20,
                              fp_max_iters=10)
        self._simulation = CellFreeSimulation(config, seed=4)
        self._tmpdir = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self._tmpdir)

    def test_seed(self):
        self.assertEqual(self._simulation.get_config().seed, 4)
        channels = self._simulation.get_channels()
        self.assertEqual(channels.G.shape, (2, 4, 2))

    def test_distributed_and_hdf5(self):
        filename = os.path.join(self._tmpdir, 'run.hdf5')
        self.assertFalse(self._simulation.write_hdf5(filename))
        result = self._simulation.run_distributed(sequential=True)
        self.assertIs(self._simulation.get_run_result(), result)
        self.assertTrue(self._simulation.write_hdf5(filename))
        self.assertTrue(os.path.exists(filename))

    def test_baselines(self):
        centralized = self._simulation.run_centralized()
        self.assertTrue(centralized.wsr >= self._simulation.run_baseline('mrt_maxao')
                        - 1e-9)

    def test_set_rho(self):
        self._simulation.set_rho([0.1, 10.0])
        self.assertTrue(np.all(self._simulation.get_config().get_rho()
                               == np.array([0.1, 10.0])))


if __name__ == "__main__":
    unittest.main()
