import os
import tempfile
import unittest
import numpy as np
from cellfree.system.config import (
    SystemConfig, ConfigError, create_default_config, dbm_to_watt,
    watt_to_dbm, load_config)


class TestSystemConfig(unittest.TestCase):
    def setUp(self):
        self._prec = 1e-12

    def test_defaults(self):
        config = create_default_config()
        self.assertEqual((config.B, config.R, config.K, config.N, config.N_t),
                         (4, 2, 4, 16, 2))
        self.assertEqual(config.get_number_of_blocks(), 6)
        self.assertTrue(np.all(np.abs(config.get_P_max() - 1.0) < self._prec))
        self.assertTrue(abs(config.noise_power - 1e-11) < 1e-23)
        self.assertEqual(create_default_config(paper_scale=True).N, 50)

    def test_dbm(self):
        self.assertTrue(abs(dbm_to_watt(30.0) - 1.0) < self._prec)
        self.assertTrue(abs(dbm_to_watt(-80.0) - 1e-11) < 1e-23)
        self.assertTrue(abs(watt_to_dbm(1e-3)) < 1e-9)

    def test_broadcast(self):
        config = SystemConfig(B=3, K=2, P_max=2.0, weights=(1.0, 3.0))
        self.assertTrue(np.all(config.get_P_max() == 2.0))
        self.assertTrue(np.all(config.get_weights() == [1.0, 3.0]))
        self.assertTrue(np.all(config.get_rho() == 1.0))

    def test_invalid(self):
        with self.assertRaises(ConfigError):
            SystemConfig(B=4, L=3)
        with self.assertRaises(ConfigError):
            SystemConfig(B=0)
        with self.assertRaises(ConfigError):
            SystemConfig(noise_power=0.0)
        with self.assertRaises(ConfigError):
            SystemConfig(B=2, P_max=(1.0, 2.0, 3.0))
        with self.assertRaises(ConfigError):
            SystemConfig(rho=-1.0)
        with self.assertRaises(ConfigError):
            SystemConfig(rho=0.0)
        with self.assertRaises(ConfigError):
            SystemConfig(K=2, weights=(1.0, 0.0))
        with self.assertRaises(ConfigError):
            SystemConfig(K=2.5)

    def test_from_dict(self):
        config = SystemConfig.from_dict(
            {'B': 2, 'P_dBm': 20.0, 'noise_dBm': -90.0, 'rho': [0.1, 10.0]})
        self.assertTrue(np.all(np.abs(config.get_P_max() - 0.1) < self._prec))
        self.assertTrue(abs(config.noise_power - 1e-12) < 1e-24)
        self.assertTrue(np.all(config.get_rho() == [0.1, 10.0]))
        with self.assertRaises(ConfigError):
            SystemConfig.from_dict({'antennas': 4})
        with self.assertRaises(ConfigError):
            SystemConfig.from_dict({'P_dBm': 20.0, 'P_max': 1.0})

    def test_load_config(self):
        with tempfile.TemporaryDirectory() as tmpdir:
            filename = os.path.join(tmpdir, 'config.json')
            with open(filename, 'w') as f:
                f.write('{\n  "B": 2,\n  "K": 3,\n  "P_dBm": 10\n}\n')
            config = load_config(filename)
            self.assertEqual((config.B, config.K, config.N), (2, 3, 16))
            self.assertTrue(abs(config.get_P_max()[0] - 0.01) < self._prec)
            self.assertEqual(load_config(filename, paper_scale=True).N, 50)

    def test_malformed_config(self):
        with tempfile.TemporaryDirectory() as tmpdir:
            filename = os.path.join(tmpdir, 'config.json')
            with open(filename, 'w') as f:
                f.write('{\n  "B": 2,\n  "K": [3,\n}\n')
            with self.assertRaises(ConfigError) as cm:
                load_config(filename)
            print(cm.exception)
            self.assertTrue(str(cm.exception).startswith(filename + ':'))

    def test_missing_file(self):
        with self.assertRaises(ConfigError):
            load_config('/nonexistent/config.json')


if __name__ == "__main__":
    unittest.main()
