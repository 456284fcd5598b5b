#!/usr/bin/env python
# -*- coding: utf-8 -*-
import numpy as np

# Stream identifiers of the splittable random generator.
STREAMS = {
    'ue': 0,
    'G': 1,
    'v': 2,
    'h': 3,
    'theta_init': 4,
    'baseline': 5,
    'tune': 6,
}

RIS_ENDPOINTS = np.array([
    [75.0, 10.0, 6.0],
    [125.0, 10.0, 6.0],
])
UE_CENTER = np.array([75.0, 0.0, 1.5])


def create_rng(seed, stream, *indices):
    """Return an independent generator for ``(seed, stream, indices)``.

    Draws of one stream never shift those of another, e.g. adding a UE
    leaves the positions of the existing UEs unchanged.
    """
    key = (STREAMS[stream],) + tuple(int(i) for i in indices)
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=key))


def derive_seed(seed, stream, *indices):
    return int(create_rng(seed, stream, *indices).integers(2 ** 31 - 1))


def path_loss(d, G0=1e-3, d0=1.0, alpha=2.8):
    """Large-scale gain ``G0 * (d / d0) ** (-alpha)``."""
    d = np.asarray(d, dtype=float)
    if np.any(d <= 0.0):
        raise ValueError('Link distance must be positive', d)
    return G0 * (d / d0) ** (-alpha)


def create_bs_positions(B):
    b = np.arange(1, B + 1)
    positions = np.zeros((B, 3))
    positions[:, 0] = 200.0 * b / B
    positions[:, 1] = -50.0
    positions[:, 2] = 3.0
    return positions


def create_ris_positions(R):
    if R == 1:
        fractions = np.array([0.5])
    else:
        fractions = np.linspace(0.0, 1.0, R)
    start, stop = RIS_ENDPOINTS
    return start + fractions[:, None] * (stop - start)


def create_ue_positions(K, seed, radius=5.0, center=UE_CENTER):
    positions = np.zeros((K, 3))
    for k in range(K):
        rng = create_rng(seed, 'ue', k)
        u_r, u_phi = rng.random(2)
        r = radius * np.sqrt(u_r)
        phi = 2.0 * np.pi * u_phi
        positions[k] = center + [r * np.cos(phi), r * np.sin(phi), 0.0]
    return positions


class Scenario(object):
    """Node positions and large-scale gains of one deployment."""
    def __init__(self, config, bs_positions, ris_positions, ue_positions):
        self._config = config
        self.bs_positions = np.asarray(bs_positions, dtype=float)
        self.ris_positions = np.asarray(ris_positions, dtype=float)
        self.ue_positions = np.asarray(ue_positions, dtype=float)
        self._check()

    def _check(self):
        for name, n in (('bs_positions', self._config.B),
                        ('ris_positions', self._config.R),
                        ('ue_positions', self._config.K)):
            positions = getattr(self, name)
            if positions.shape != (n, 3):
                raise ValueError(
                    '{} must have shape ({}, 3)'.format(name, n), positions.shape)
            if not np.all(np.isfinite(positions)):
                raise ValueError('{} must be finite'.format(name))

    def get_config(self):
        return self._config

    def _path_loss(self, p, q, alpha):
        d = np.linalg.norm(p - q)
        return path_loss(d, self._config.pathloss_G0,
                         self._config.pathloss_d0, alpha)

    def get_bs_ris_gain(self, b, r):
        return self._path_loss(self.bs_positions[b], self.ris_positions[r],
                               self._config.alpha_bs_ris)

    def get_ris_ue_gain(self, r, k):
        return self._path_loss(self.ris_positions[r], self.ue_positions[k],
                               self._config.alpha_ris_ue)

    def get_bs_ue_gain(self, b, k):
        return self._path_loss(self.bs_positions[b], self.ue_positions[k],
                               self._config.alpha_bs_ue)


def build_scenario(config, seed=None):
    if seed is None:
        seed = config.seed
    return Scenario(
        config,
        create_bs_positions(config.B),
        create_ris_positions(config.R),
        create_ue_positions(config.K, seed, radius=config.ue_radius))
