#!/usr/bin/env python
# -*- coding: utf-8 -*-
import numpy as np


def upa_shape(N):
    """Return ``(N_x, N_y)`` with ``N_x * N_y == N`` and ``N_x >= sqrt(N)``.

    ``N_x`` is the smallest divisor of ``N`` not below ``sqrt(N)``, so square
    panels stay square (16 -> 4 x 4) and 50 becomes 10 x 5.
    """
    if N < 1:
        raise ValueError('Number of elements must be positive', N)
    n_x = int(np.ceil(np.sqrt(N)))
    while N % n_x != 0:
        n_x += 1
    return n_x, N // n_x


def _check_count(name, value):
    if value < 1:
        raise ValueError('{} must be positive'.format(name), value)


def ula_response(psi, N_L):
    """Half-wavelength ULA response of ``N_L`` antennas, unit norm."""
    _check_count('N_L', N_L)
    n = np.arange(N_L)
    return np.exp(1j * np.pi * n * np.sin(psi)) / np.sqrt(N_L)


def upa_response(psi, sigma, N_x, N_y):
    """Half-wavelength ``N_x`` by ``N_y`` UPA response, unit norm.

    Element ``n_x + N_x * n_y`` (``n_x`` fastest) has phase
    ``pi * (n_x * sin(psi) * sin(sigma) + n_y * cos(sigma))``. A panel of
    ``N`` elements is laid out as ``upa_shape(N)``.
    """
    _check_count('N_x', N_x)
    _check_count('N_y', N_y)
    n_x = np.tile(np.arange(N_x), N_y)
    n_y = np.repeat(np.arange(N_y), N_x)
    phase = n_x * np.sin(psi) * np.sin(sigma) + n_y * np.cos(sigma)
    return np.exp(1j * np.pi * phase) / np.sqrt(N_x * N_y)


def ula_angle(direction):
    """Angle seen by a ULA laid along the x axis."""
    u = np.asarray(direction, dtype=float)
    u = u / np.linalg.norm(u)
    return float(np.arcsin(np.clip(u[0], -1.0, 1.0)))


def upa_angles(direction):
    """``(psi, sigma)`` seen by a UPA in the x-z plane.

    The panel axes are x (horizontal) and z (vertical). The sign of the
    vertical direction cosine is folded so both angles stay in
    ``[-pi/2, pi/2]``.
    """
    u = np.asarray(direction, dtype=float)
    u = u / np.linalg.norm(u)
    sigma = float(np.arccos(np.clip(abs(u[2]), 0.0, 1.0)))
    s = np.sin(sigma)
    if s < 1e-12:
        return 0.0, sigma
    psi = float(np.arcsin(np.clip(u[0] / s, -1.0, 1.0)))
    return psi, sigma
