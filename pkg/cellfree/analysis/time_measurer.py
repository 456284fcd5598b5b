#!/usr/bin/env python
# -*- coding: utf-8 -*-
from __future__ import (absolute_import, division,
                        print_function, unicode_literals)

import time


class TimeMeasurer(object):
    """Measure execution time of a ``with`` block.

    The elapsed time is always kept in ``interval`` (sec.) so that callers
    can store it; the fixed-width report line is printed only when verbose.

    Parameters
    ----------
    time_string : str
        Label of the measured section.
    verbose : bool
    """
    def __init__(self, time_string, verbose=True):
        self._time_string = time_string
        self._verbose = verbose
        self.interval = 0.0

    def __enter__(self):
        self._start = time.perf_counter()
        return self

    def __exit__(self, *args):
        self._finish = time.perf_counter()
        self.interval = self._finish - self._start

        if self._verbose:
            print('{:36s} (sec.):  {:12.4f}'.format(
                self._time_string, self.interval))

    def get_interval_ms(self):
        return 1000.0 * self.interval
