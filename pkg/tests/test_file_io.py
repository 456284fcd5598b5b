import os
import shutil
import tempfile
import unittest
import numpy as np
from cellfree.channel.channel_set import draw_iid_channel_set
from cellfree.distributed.pipeline import run_distributed
from cellfree.file_io import (
    read_input, read_run_hdf5, write_channel_dump, write_message_trace)
from cellfree.harness.experiment import ResultRow
from cellfree.harness.result_writer import ResultWriterCSV, ResultWriterHDF5
from cellfree.system.config import ConfigError, SystemConfig


class TestFileIO(unittest.TestCase):
    def setUp(self):
        self._tmpdir = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self._tmpdir)

    def _path(self, name):
        return os.path.join(self._tmpdir, name)

    def test_read_json_and_yaml(self):
        with open(self._path('config.json'), 'w') as f:
            f.write('{"B": 3, "P_dBm": [30, 27, 24]}\n')
        with open(self._path('config.yaml'), 'w') as f:
            f.write('B: 3\nP_dBm: [30, 27, 24]\n')
        self.assertEqual(read_input(self._path('config.json')),
                         read_input(self._path('config.yaml')))

    def test_malformed_input(self):
        with open(self._path('broken.yaml'), 'w') as f:
            f.write('B: 3\nK: [1, 2\n')
        with self.assertRaises(ConfigError) as cm:
            read_input(self._path('broken.yaml'))
        self.assertTrue(str(cm.exception).startswith(self._path('broken.yaml') + ':'))
        with self.assertRaises(ConfigError):
            read_input(self._path('missing.yaml'))

    def test_run_hdf5(self):
        config = SystemConfig(B=2, R=1, K=2, N=4, N_t=2, noise_power=1.0)
        channels = draw_iid_channel_set(np.random.default_rng(0), 2, 1, 2, 4, 2)
        result = run_distributed(channels, config)
        result.write_hdf5(self._path('run.hdf5'))
        data = read_run_hdf5(self._path('run.hdf5'))
        self.assertTrue(np.array_equal(data['wsr_trace'], result.wsr_trace))
        self.assertTrue(np.array_equal(data['theta_final'], result.theta_final))
        self.assertEqual(data['message_trace'].shape, (6, 4))
        self.assertEqual(int(data['message_count']), result.message_count)

    def test_message_trace(self):
        write_message_trace([(1, 0, 1, 20), (1, 1, 0, 20)], self._path('trace.txt'))
        with open(self._path('trace.txt')) as f:
            lines = f.readlines()
        self.assertTrue(lines[0].startswith('#'))
        self.assertEqual([int(x) for x in lines[2].split()], [1, 1, 0, 20])

    def test_channel_dump(self):
        channels = draw_iid_channel_set(np.random.default_rng(1), 2, 2, 3, 4, 2)
        write_channel_dump(channels, self._path('channels.csv'))
        with open(self._path('channels.csv')) as f:
            lines = f.readlines()[1:]
        n_G = 2 * 2 * 4 * 2
        n_v = 2 * 3 * 4
        n_h = 2 * 3 * 2
        self.assertEqual(len(lines), n_G + n_v + n_h)
        kind, b, r, k, row, col, real, imag = lines[n_G].strip().split(',')
        self.assertEqual((kind, b, r, k, row, col), ('v', '-1', '0', '0', '0', '0'))
        self.assertEqual(complex(float(real), float(imag)), channels.v[0, 0, 0])

    def test_result_writers(self):
        rows = [ResultRow('mrt_random', 'K', 2.0, 0, 1.5, 0.0, 0, 0.0),
                ResultRow('distributed', 'K', 2.0, 0, 2.5, 0.1, 100, 0.0)]
        ResultWriterCSV(self._path('rows.csv'), rows)
        ResultWriterHDF5(self._path('rows.hdf5'), rows)
        with open(self._path('rows.csv')) as f:
            self.assertEqual(len(f.readlines()), 3)
        import h5py
        with h5py.File(self._path('rows.hdf5'), 'r') as f:
            self.assertEqual(list(f['msg_complex_scalars'][:]), [0, 100])
            self.assertEqual(f['algorithm'][1], b'distributed')


if __name__ == "__main__":
    unittest.main()
