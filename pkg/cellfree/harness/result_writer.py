#!/usr/bin/env python
# -*- coding: utf-8 -*-
import numpy as np
from cellfree.harness.experiment import CSV_HEADER

COLUMNS = CSV_HEADER.split(',')


class ResultWriter(object):
    """Write result rows to ``filename`` on construction."""
    def __init__(self, filename, rows):
        self._filename = filename
        self._rows = list(rows)
        self._run()

    def _run(self):
        raise NotImplementedError


class ResultWriterCSV(ResultWriter):
    def _run(self):
        with open(self._filename, 'w') as f:
            self._print_header(f)
            self._write(f)

    def _print_header(self, file_output):
        file_output.write(CSV_HEADER + '\n')

    def _write(self, file_output):
        for row in self._rows:
            file_output.write(row.to_csv_line() + '\n')


class ResultWriterHDF5(ResultWriter):
    def _run(self):
        import h5py
        with h5py.File(self._filename, 'w') as f:
            for column in COLUMNS:
                values = [getattr(row, column) for row in self._rows]
                if column in ('algorithm', 'sweep_var'):
                    data = np.array(values, dtype='S')
                else:
                    data = np.array(values)
                f.create_dataset(column, data=data)


def read_results_csv(filename):
    """Rows of a result CSV as a list of dicts of strings."""
    with open(filename, 'r') as f:
        header = f.readline().rstrip('\n').split(',')
        return [dict(zip(header, line.rstrip('\n').split(','))) for line in f]
