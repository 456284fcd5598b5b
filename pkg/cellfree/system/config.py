#!/usr/bin/env python
# -*- coding: utf-8 -*-
import dataclasses
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np


class ConfigError(ValueError):
    pass


def dbm_to_watt(p_dbm):
    return 10.0 ** ((np.asarray(p_dbm, dtype=float) - 30.0) / 10.0)


def watt_to_dbm(p_watt):
    return 10.0 * np.log10(np.asarray(p_watt, dtype=float)) + 30.0


Number = Union[int, float]


@dataclass(frozen=True)
class SystemConfig:
    """System dimensions, budgets and solver settings.

    Powers are kept in linear units (W). ``P_max`` and ``rho`` accept either
    a scalar (shared by all BSs) or one value per BS, ``weights`` either a
    scalar or one value per UE. ``L = None`` means ``B + 2`` blocks.
    """
    B: int = 4
    R: int = 2
    K: int = 4
    N: int = 16
    N_t: int = 2
    L: Optional[int] = None
    P_max: Union[Number, Sequence[Number]] = 1.0
    noise_power: float = 1e-11
    weights: Union[Number, Sequence[Number]] = 1.0
    rho: Union[Number, Sequence[Number]] = 1.0
    seed: int = 0
    n_paths: int = 3
    pathloss_G0: float = 1e-3
    pathloss_d0: float = 1.0
    alpha_bs_ris: float = 2.0
    alpha_ris_ue: float = 2.8
    alpha_bs_ue: float = 2.8
    ue_radius: float = 5.0
    bcd_max_sweeps: int = 50
    bcd_tol: float = 1e-8
    fp_max_iters: int = 100
    fp_tol: float = 1e-6

    def __post_init__(self):
        for name in ('B', 'R', 'K', 'N', 'N_t', 'n_paths', 'bcd_max_sweeps',
                     'fp_max_iters'):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
                raise ConfigError('{} must be an integer, got {!r}'.format(name, value))
            if value < 1:
                raise ConfigError('{} must be >= 1, got {}'.format(name, value))
        if self.L is not None:
            if isinstance(self.L, bool) or not isinstance(self.L, (int, np.integer)):
                raise ConfigError('L must be an integer, got {!r}'.format(self.L))
            if self.L < self.B:
                raise ConfigError(
                    'L must be >= B (got L={}, B={})'.format(self.L, self.B))
        if not np.isfinite(self.noise_power) or self.noise_power <= 0.0:
            raise ConfigError('noise_power must be positive')
        if self.seed < 0:
            raise ConfigError('seed must be non-negative')

        p_max = self._broadcast('P_max', self.P_max, self.B)
        if np.any(p_max <= 0.0):
            raise ConfigError('P_max must be positive')
        weights = self._broadcast('weights', self.weights, self.K)
        if np.any(weights <= 0.0):
            raise ConfigError('weights must be positive')
        rho = self._broadcast('rho', self.rho, self.B)
        if np.any(rho <= 0.0):
            raise ConfigError('rho must be positive')
        for name in ('pathloss_G0', 'pathloss_d0', 'ue_radius'):
            if getattr(self, name) <= 0.0:
                raise ConfigError('{} must be positive'.format(name))

    @staticmethod
    def _broadcast(name, value, n):
        try:
            array = np.array(value, dtype=float)
        except (TypeError, ValueError):
            raise ConfigError('{} must be numeric, got {!r}'.format(name, value))
        if array.ndim == 0:
            array = np.full(n, float(array))
        if array.shape != (n,):
            raise ConfigError(
                '{} has {} entries, expected {}'.format(name, array.size, n))
        if not np.all(np.isfinite(array)):
            raise ConfigError('{} must be finite'.format(name))
        return array

    def get_number_of_blocks(self):
        return self.B + 2 if self.L is None else self.L

    def get_P_max(self):
        return self._broadcast('P_max', self.P_max, self.B)

    def get_weights(self):
        return self._broadcast('weights', self.weights, self.K)

    def get_rho(self):
        return self._broadcast('rho', self.rho, self.B)

    def get_NR(self):
        return self.N * self.R

    def replace(self, **changes):
        try:
            return dataclasses.replace(self, **changes)
        except TypeError as e:
            raise ConfigError(str(e))

    def to_dict(self):
        d = dataclasses.asdict(self)
        for key, value in d.items():
            if isinstance(value, (tuple, np.ndarray)):
                d[key] = list(value)
        return d

    @classmethod
    def from_dict(cls, dict_input):
        """Build a config from a mapping of field names.

        ``P_dBm`` and ``noise_dBm`` are accepted in place of ``P_max`` and
        ``noise_power``.
        """
        if dict_input is None:
            dict_input = {}
        if not isinstance(dict_input, dict):
            raise ConfigError('configuration must be a mapping')
        d = dict(dict_input)
        if 'P_dBm' in d:
            if 'P_max' in d:
                raise ConfigError('give either P_dBm or P_max, not both')
            p = dbm_to_watt(d.pop('P_dBm'))
            d['P_max'] = float(p) if p.ndim == 0 else [float(x) for x in p]
        if 'noise_dBm' in d:
            if 'noise_power' in d:
                raise ConfigError('give either noise_dBm or noise_power, not both')
            d['noise_power'] = float(dbm_to_watt(d.pop('noise_dBm')))

        names = {f.name for f in dataclasses.fields(cls)}
        unknown = sorted(set(d) - names)
        if unknown:
            raise ConfigError('unknown configuration keys: {}'.format(
                ', '.join(unknown)))
        for key, value in d.items():
            if isinstance(value, list):
                d[key] = tuple(value)
        return cls(**d)


def create_default_config(paper_scale=False):
    """Desk-scale defaults: B=4, R=2, K=4, N=16, N_t=2, P=30 dBm, noise -80 dBm.

    ``paper_scale`` switches to N=50 elements per RIS.
    """
    config = SystemConfig(P_max=float(dbm_to_watt(30.0)),
                          noise_power=float(dbm_to_watt(-80.0)))
    if paper_scale:
        config = config.replace(N=50)
    return config


def load_config(filename, paper_scale=False):
    from cellfree.file_io import read_input
    dict_input = read_input(filename)
    base = create_default_config(paper_scale=paper_scale).to_dict()
    if dict_input:
        if not isinstance(dict_input, dict):
            raise ConfigError('{}: configuration must be a mapping'.format(filename))
        if 'P_dBm' in dict_input:
            base.pop('P_max')
        if 'noise_dBm' in dict_input:
            base.pop('noise_power')
        base.update(dict_input)
    return SystemConfig.from_dict(base)
