#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""Rates, fractional-programming surrogates and consensus error.

Receiver-index convention: ``A[k, j] = sum_b h_hat_{b,k}^H w_{b,j}`` is the
signal of stream ``j`` seen by UE ``k``.
"""
import numpy as np


class CrossTermTable(object):
    """Direct (``varpi``) and reflected (``vartheta``) cross-terms, K x K."""
    def __init__(self, varpi, vartheta):
        self.varpi = np.array(varpi, dtype=complex)
        self.vartheta = np.array(vartheta, dtype=complex)
        if self.varpi.shape != self.vartheta.shape:
            raise ValueError('Cross-term tables differ in shape')

    @classmethod
    def zeros(cls, K):
        return cls(np.zeros((K, K)), np.zeros((K, K)))

    def total(self):
        return self.varpi + self.vartheta

    def is_finite(self):
        return bool(np.all(np.isfinite(self.varpi))
                    and np.all(np.isfinite(self.vartheta)))

    def get_number_of_ues(self):
        return self.varpi.shape[0]

    def __add__(self, other):
        return CrossTermTable(self.varpi + other.varpi,
                              self.vartheta + other.vartheta)

    def __sub__(self, other):
        return CrossTermTable(self.varpi - other.varpi,
                              self.vartheta - other.vartheta)


class AuxVars(object):
    """A-Layer variables of one BS: auxiliary SINRs and quadratic-transform weights."""
    def __init__(self, gamma, eta):
        self.gamma = np.asarray(gamma, dtype=float)
        self.eta = np.asarray(eta, dtype=complex)


def local_contribution(channels, b, theta_b, W_b):
    """Cross-terms contributed by BS ``b`` alone."""
    varpi = channels.h[b].conj() @ W_b
    reflection = (channels.v_stack * theta_b).conj() @ channels.G[b]
    vartheta = reflection @ W_b
    return CrossTermTable(varpi, vartheta)


def global_cross_terms(channels, W, theta):
    """Sum of all BS contributions.

    ``theta`` is either one RIS configuration or one per BS, shape (B, NR).
    """
    theta = np.asarray(theta)
    table = CrossTermTable.zeros(channels.K)
    for b in range(channels.B):
        theta_b = theta[b] if theta.ndim == 2 else theta
        table = table + local_contribution(channels, b, theta_b, W[b])
    return table


def _check_noise(noise_power):
    if not noise_power > 0.0:
        raise ValueError('Noise power must be positive', noise_power)


def sinr_from_table(table, noise_power):
    _check_noise(noise_power)
    A = table.total()
    power = np.abs(A) ** 2
    signal = np.diag(power)
    interference = power.sum(axis=1) - signal
    return signal / (interference + noise_power)


def sinr(W, theta, channels, k, noise_power):
    """SINR of UE ``k``."""
    table = global_cross_terms(channels, W, theta)
    return sinr_from_table(table, noise_power)[k]


def wsr_from_table(table, weights, noise_power):
    return float(np.sum(np.asarray(weights)
                        * np.log2(1.0 + sinr_from_table(table, noise_power))))


def wsr(W, theta, channels, weights, noise_power):
    """Weighted sum rate in bit/s/Hz."""
    table = global_cross_terms(channels, W, theta)
    return wsr_from_table(table, weights, noise_power)


def _log(x, base):
    return np.log(x) / np.log(base)


def f1_from_table(table, gamma, weights, noise_power, log_base=2.0):
    _check_noise(noise_power)
    gamma = np.asarray(gamma, dtype=float)
    if np.any(gamma < 0.0):
        raise ValueError('Auxiliary SINR variables must be non-negative')
    A = table.total()
    power = np.abs(A) ** 2
    total = power.sum(axis=1) + noise_power
    ratio = np.diag(power) / total
    return float(np.sum(np.asarray(weights) * (
        gamma - _log(1.0 + gamma, log_base) - (1.0 + gamma) * ratio)))


def f1(theta, W, gamma, channels, weights, noise_power, log_base=2.0):
    """Lagrangian-dual surrogate of the negative WSR.

    With ``gamma`` equal to the SINRs it equals ``-wsr`` for any base; its
    minimizer over ``gamma`` is the SINR vector when ``log_base`` is e.
    """
    table = global_cross_terms(channels, W, theta)
    return f1_from_table(table, gamma, weights, noise_power, log_base)


def f2_from_table(table, gamma, eta, weights, noise_power):
    _check_noise(noise_power)
    gamma = np.asarray(gamma, dtype=float)
    eta = np.asarray(eta, dtype=complex)
    weights = np.asarray(weights, dtype=float)
    A = table.total()
    total = (np.abs(A) ** 2).sum(axis=1) + noise_power
    a = np.sqrt((1.0 + gamma) * weights)
    value = (np.abs(eta) ** 2 * total
             - 2.0 * a * np.real(eta * np.diag(A))
             + weights * gamma
             - weights * np.log2(1.0 + gamma))
    return float(np.sum(value))


def f2(theta, W, gamma, eta, channels, weights, noise_power):
    """Quadratic-transform surrogate; equals ``f1`` at the optimal ``eta``."""
    table = global_cross_terms(channels, W, theta)
    return f2_from_table(table, gamma, eta, weights, noise_power)


def ring_topology(B):
    """Neighbour ``b_bar`` of every BS: the one it receives from."""
    return [(b + 1) % B for b in range(B)]


def consensus_error(theta_by_bs, topology=None):
    """``sum_b ||theta_b - theta_{b_bar}||^2``."""
    theta_by_bs = np.asarray(theta_by_bs)
    B = theta_by_bs.shape[0]
    if topology is None:
        topology = ring_topology(B)
    if len(topology) != B:
        raise ValueError('Topology does not match the number of BSs')
    diff = theta_by_bs - theta_by_bs[np.asarray(topology)]
    return float(np.sum(np.abs(diff) ** 2))


def loss(theta_by_bs, wsr_value, topology=None):
    """Consensus error minus WSR, averaged over a batch.

    A single sample is ``(B, NR)`` with a scalar WSR, a batch is
    ``(Q, B, NR)`` with ``Q`` WSR values.
    """
    theta_by_bs = np.asarray(theta_by_bs)
    wsr_value = np.atleast_1d(np.asarray(wsr_value, dtype=float))
    if theta_by_bs.ndim == 2:
        theta_by_bs = theta_by_bs[None]
    if len(theta_by_bs) != len(wsr_value):
        raise ValueError('Batch sizes of theta and WSR differ')
    errors = np.array([consensus_error(t, topology) for t in theta_by_bs])
    return float(np.mean(errors - wsr_value))
