#!/usr/bin/env python
# -*- coding: utf-8 -*-
import numpy as np
from cellfree.channel.steering import (
    upa_shape, ula_response, upa_response, ula_angle, upa_angles)
from cellfree.system.scenario import create_rng


def check_unit_modulus(theta, prec=1e-9):
    theta = np.asarray(theta)
    if not np.all(np.abs(np.abs(theta) - 1.0) < prec):
        raise ValueError('RIS phase vector must be unit modulus')


class PathParams(object):
    """Gains and angles of the paths of one link.

    ``psi``/``sigma`` are the UPA azimuth/elevation at the RIS (``psi`` is
    also the ULA angle of a BS-UE link), ``chi`` the ULA angle at the BS.
    """
    def __init__(self, beta, psi, sigma=None, chi=None):
        self.beta = np.atleast_1d(np.asarray(beta, dtype=complex))
        n = len(self.beta)
        self.psi = self._angles(psi, n)
        self.sigma = self._angles(sigma, n)
        self.chi = self._angles(chi, n)

    @staticmethod
    def _angles(angles, n):
        if angles is None:
            return np.zeros(n)
        angles = np.atleast_1d(np.asarray(angles, dtype=float))
        if angles.shape != (n,):
            raise ValueError('Number of angles does not match number of paths')
        if np.any(np.abs(angles) > 0.5 * np.pi + 1e-12):
            raise ValueError('Path angles must lie in [-pi/2, pi/2]', angles)
        return angles

    def get_number_of_paths(self):
        return len(self.beta)


def draw_path_params(rng, n_paths, gain, los=(0.0, 0.0, 0.0)):
    """Path 0 is the line-of-sight path at the geometric angles ``los``.

    The other paths get angles uniform in ``[-pi/2, pi/2]``. All gains are
    circularly-symmetric complex Gaussian with variance ``gain``.
    """
    beta = np.sqrt(0.5 * gain) * (
        rng.standard_normal(n_paths) + 1j * rng.standard_normal(n_paths))
    angles = rng.uniform(-0.5 * np.pi, 0.5 * np.pi, size=(3, n_paths))
    angles[:, 0] = los
    return PathParams(beta, angles[0], angles[1], angles[2])


def draw_sv_channel(kind, dims, path_params, scale=1.0):
    """Saleh-Valenzuela channel of a BS-RIS ('G'), RIS-UE ('v') or BS-UE ('h') link.

    Parameters
    ----------
    kind : str
    dims : tuple
        ``(N, N_t)`` for 'G', ``(N,)`` for 'v', ``(N_t,)`` for 'h'.
    path_params : PathParams
    scale : float
        Extra multiplier applied to the result.
    """
    n_paths = path_params.get_number_of_paths()
    if n_paths == 0:
        raise ValueError('A link needs at least one path')
    p = path_params
    if kind == 'G':
        N, N_t = dims
        panel = upa_shape(N)
        channel = np.zeros((N, N_t), dtype=complex)
        for l in range(n_paths):
            channel += p.beta[l] * np.outer(
                upa_response(p.psi[l], p.sigma[l], *panel),
                ula_response(p.chi[l], N_t).conj())
        size = N * N_t
    elif kind == 'v':
        N, = dims
        panel = upa_shape(N)
        channel = np.zeros(N, dtype=complex)
        for l in range(n_paths):
            channel += p.beta[l] * upa_response(p.psi[l], p.sigma[l], *panel)
        size = N
    elif kind == 'h':
        N_t, = dims
        channel = np.zeros(N_t, dtype=complex)
        for l in range(n_paths):
            channel += p.beta[l] * ula_response(p.psi[l], N_t)
        size = N_t
    else:
        raise ValueError('Unknown kind', kind)
    return scale * np.sqrt(size / n_paths) * channel


class ChannelSet(object):
    """All channels of one realization.

    Attributes
    ----------
    G : (B, NR, N_t) complex
        ``G[b]`` stacks the BS-RIS channels of all RISs vertically.
    v : (R, K, N) complex
    h : (B, K, N_t) complex
    v_stack : (K, NR) complex
        Diagonal of ``V_k`` for every UE.
    """
    def __init__(self, G, v, h):
        self.G = np.asarray(G, dtype=complex)
        self.v = np.asarray(v, dtype=complex)
        self.h = np.asarray(h, dtype=complex)
        self.R, self.K, self.N = self.v.shape
        self.B, self.NR, self.N_t = self.G.shape
        if self.NR != self.N * self.R:
            raise ValueError('G rows do not match the RIS elements', self.G.shape)
        if self.h.shape != (self.B, self.K, self.N_t):
            raise ValueError('h has an unexpected shape', self.h.shape)
        self.v_stack = np.concatenate(
            [self.v[r] for r in range(self.R)], axis=1)

    def get_G(self, b):
        return self.G[b]

    def get_G_br(self, b, r):
        return self.G[b, r * self.N:(r + 1) * self.N]

    def get_V(self, k):
        return np.diag(self.v_stack[k])

    def get_h(self, b, k):
        return self.h[b, k]

    def get_composite(self, b, theta):
        """Columns are the composite channels ``h_hat_{b,k}`` of BS ``b``."""
        return (self.h[b].T
                + self.G[b].conj().T @ (self.v_stack * theta).T)

    def get_received(self, b, theta, W_b):
        """``A[k, j] = h_hat_{b,k}^H w_{b,j}`` for BS ``b``."""
        return self.get_composite(b, theta).conj().T @ W_b

    def merge_bss(self):
        """View all BSs as one BS with ``B * N_t`` antennas."""
        G = np.concatenate([self.G[b] for b in range(self.B)], axis=1)
        h = np.concatenate([self.h[b] for b in range(self.B)], axis=1)
        return ChannelSet(G[None], self.v, h[None])

    def without_ris(self):
        return ChannelSet(self.G, np.zeros_like(self.v), self.h)


def composite_channel(h_bk, G_b, V_k, theta):
    """``h_hat = h + G_b^H V_k theta``."""
    h_bk = np.asarray(h_bk)
    G_b = np.asarray(G_b)
    V_k = np.asarray(V_k)
    theta = np.asarray(theta)
    NR, N_t = G_b.shape
    if h_bk.shape != (N_t,) or V_k.shape != (NR, NR) or theta.shape != (NR,):
        raise ValueError('Dimension mismatch in composite channel')
    check_unit_modulus(theta)
    return h_bk + G_b.conj().T @ (V_k @ theta)


def draw_channel_set(scenario, seed=None):
    config = scenario.get_config()
    if seed is None:
        seed = config.seed
    B, R, K, N, N_t = config.B, config.R, config.K, config.N, config.N_t
    n_paths = config.n_paths
    bs = scenario.bs_positions
    ris = scenario.ris_positions
    ue = scenario.ue_positions

    G = np.zeros((B, N * R, N_t), dtype=complex)
    for b in range(B):
        for r in range(R):
            psi, sigma = upa_angles(bs[b] - ris[r])
            chi = ula_angle(ris[r] - bs[b])
            params = draw_path_params(
                create_rng(seed, 'G', b, r), n_paths,
                scenario.get_bs_ris_gain(b, r), los=(psi, sigma, chi))
            G[b, r * N:(r + 1) * N] = draw_sv_channel('G', (N, N_t), params)

    v = np.zeros((R, K, N), dtype=complex)
    for r in range(R):
        for k in range(K):
            psi, sigma = upa_angles(ue[k] - ris[r])
            params = draw_path_params(
                create_rng(seed, 'v', r, k), n_paths,
                scenario.get_ris_ue_gain(r, k), los=(psi, sigma, 0.0))
            v[r, k] = draw_sv_channel('v', (N,), params)

    h = np.zeros((B, K, N_t), dtype=complex)
    for b in range(B):
        for k in range(K):
            psi = ula_angle(ue[k] - bs[b])
            params = draw_path_params(
                create_rng(seed, 'h', b, k), n_paths,
                scenario.get_bs_ue_gain(b, k), los=(psi, 0.0, 0.0))
            h[b, k] = draw_sv_channel('h', (N_t,), params)

    return ChannelSet(G, v, h)


def draw_iid_channel_set(rng, B, R, K, N, N_t, scale=1.0):
    """Channels with i.i.d. CN(0, scale^2) entries, for checks without geometry."""
    def cn(*shape):
        return scale * np.sqrt(0.5) * (
            rng.standard_normal(shape) + 1j * rng.standard_normal(shape))
    return ChannelSet(cn(B, N * R, N_t), cn(R, K, N), cn(B, K, N_t))
