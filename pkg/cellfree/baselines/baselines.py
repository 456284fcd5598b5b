#!/usr/bin/env python
# -*- coding: utf-8 -*-
import numpy as np
import scipy.linalg
from cellfree.distributed.pipeline import random_phases
from cellfree.optimization.fp_updates import (
    update_gamma, update_eta, update_w_constrained, normalize_power,
    mrt_precoder)
from cellfree.optimization.objective import (
    global_cross_terms, local_contribution, wsr_from_table)
from cellfree.optimization.theta_solver import (
    ThetaQuadratic, assemble_S, assemble_Z, solve_theta_bcd)
from cellfree.system.scenario import create_rng


class BaselineOutput(object):
    def __init__(self, W, theta, wsr, wsr_trace=None, csi_scalars=0):
        self.W = W
        self.theta = theta
        self.wsr = wsr
        self.wsr_trace = [] if wsr_trace is None else list(wsr_trace)
        self.csi_scalars = csi_scalars


def _baseline_theta(channels, config, rng):
    if rng is None:
        rng = create_rng(config.seed, 'baseline', 0)
    return random_phases(rng, channels.NR)


def _mrt(channels, config, theta):
    P_max = config.get_P_max()
    return np.array([mrt_precoder(channels.get_composite(b, theta), P_max[b])
                     for b in range(channels.B)])


def _evaluate(channels, config, W, theta):
    table = global_cross_terms(channels, W, theta)
    return wsr_from_table(table, config.get_weights(), config.noise_power)


def mrt_random(channels, config, rng=None):
    """Random RIS phases, maximum-ratio precoders on the composite channels."""
    theta = _baseline_theta(channels, config, rng)
    W = _mrt(channels, config, theta)
    return BaselineOutput(W, theta, _evaluate(channels, config, W, theta))


def gain_quadratic(channels):
    """Negated total channel gain ``sum_{b,k} ||h_hat_{b,k}||^2`` as a theta quadratic."""
    NR = channels.NR
    P = np.zeros((NR, NR), dtype=complex)
    q = np.zeros(NR, dtype=complex)
    for b in range(channels.B):
        G = channels.G[b]
        GG = G @ G.conj().T
        Gh = G @ channels.h[b].T
        for k in range(channels.K):
            v = channels.v_stack[k]
            P += v.conj()[:, None] * GG * v[None, :]
            q += v.conj() * Gh[:, k]
    return ThetaQuadratic(-P, q)


def maxao_theta(channels, theta_init, max_sweeps=50, tol=1e-8):
    """RIS phases maximizing the total composite channel gain."""
    return solve_theta_bcd(gain_quadratic(channels), theta_init,
                           max_sweeps=max_sweeps, tol=tol)


def _maxao_or_start(channels, config, rng):
    """MaxAO phases, or the random start when its MRT rate is higher.

    The total gain counts interference as well, so a higher gain does not
    always mean a higher rate; the start of the search is kept in that case.
    """
    start = _baseline_theta(channels, config, rng)
    theta = maxao_theta(channels, start, config.bcd_max_sweeps, config.bcd_tol)
    W_start = _mrt(channels, config, start)
    W = _mrt(channels, config, theta)
    if (_evaluate(channels, config, W_start, start)
            > _evaluate(channels, config, W, theta)):
        return start
    return theta


def mrt_maxao(channels, config, rng=None):
    theta = _maxao_or_start(channels, config, rng)
    W = _mrt(channels, config, theta)
    return BaselineOutput(W, theta, _evaluate(channels, config, W, theta))


def zero_forcing_precoder(H_hat, sigma, P_max):
    """Regularized zero-forcing ``H (H^H H + sigma I)^-1``, equal column power."""
    K = H_hat.shape[1]
    gram = H_hat.conj().T @ H_hat + sigma * np.eye(K)
    W = H_hat @ scipy.linalg.solve(gram, np.eye(K), assume_a='her')
    norms = np.linalg.norm(W, axis=0)
    W = W / np.where(norms > 0.0, norms, 1.0) * np.sqrt(P_max / K)
    W, _ = normalize_power(W, P_max)
    return W


def local_zf_maxao(channels, config, rng=None):
    """MaxAO phases, then zero-forcing computed by each BS on its own channels.

    Plain ZF when ``K <= N_t``. Otherwise a BS cannot null all UEs and is
    limited by interference at any power, so the regularizer is the mean
    per-UE gain ``||H_hat_b||_F^2 / K`` and the precoder direction does not
    depend on ``P_max``. The phases are the MaxAO ones, which do not depend
    on ``P_max`` either.
    """
    theta = maxao_theta(channels, _baseline_theta(channels, config, rng),
                        config.bcd_max_sweeps, config.bcd_tol)
    P_max = config.get_P_max()
    W = []
    for b in range(channels.B):
        H_hat = channels.get_composite(b, theta)
        if channels.K <= channels.N_t:
            sigma = 0.0
        else:
            sigma = np.sum(np.abs(H_hat) ** 2) / channels.K
        W.append(zero_forcing_precoder(H_hat, sigma, P_max[b]))
    W = np.array(W)
    return BaselineOutput(W, theta, _evaluate(channels, config, W, theta))


def csi_upload_size(channels):
    """Complex scalars of all CSI sent to a central processor."""
    return (channels.B * (channels.K * channels.N_t + channels.NR * channels.N_t)
            + channels.K * channels.NR)


def centralized_fp(channels, config, rng=None, max_iters=None, tol=None,
                   start=None, freeze_theta=False, verbose=False):
    """Centralized fractional-programming ascent with full CSI.

    Each iteration refreshes gamma and eta, updates every BS's precoders
    under its power budget with exact cross-terms, then the RIS phases on
    the merged view of all BSs. The WSR never decreases.

    Parameters
    ----------
    start : BaselineOutput
        Starting point; ``mrt_maxao`` when None.
    freeze_theta : bool
        Keep the starting RIS phases and only update the precoders.
    """
    if max_iters is None:
        max_iters = config.fp_max_iters
    if tol is None:
        tol = config.fp_tol
    weights = config.get_weights()
    noise_power = config.noise_power
    P_max = config.get_P_max()
    merged = channels.merge_bss()
    zeros = np.zeros(channels.NR, dtype=complex)

    if start is None:
        start = mrt_maxao(channels, config, rng)
    W = np.array(start.W)
    theta = np.array(start.theta)
    table = global_cross_terms(channels, W, theta)
    current = wsr_from_table(table, weights, noise_power)
    trace = [current]

    for i in range(max_iters):
        gamma = update_gamma(table, noise_power)
        eta = update_eta(table, gamma, weights, noise_power)

        for b in range(channels.B):
            W_b = update_w_constrained(b, channels, theta, gamma, eta, table,
                                       W[b], weights, P_max[b])
            table = (table - local_contribution(channels, b, theta, W[b])
                     + local_contribution(channels, b, theta, W_b))
            W[b] = W_b

        if not freeze_theta:
            W_merged = np.concatenate(list(W), axis=0)
            q = ThetaQuadratic(
                assemble_S(0, merged, W_merged, eta, 0.0),
                assemble_Z(0, merged, W_merged, eta, gamma, weights, table,
                           zeros, 0.0, zeros, theta))
            theta = solve_theta_bcd(q, theta, max_sweeps=config.bcd_max_sweeps,
                                    tol=config.bcd_tol)

        table = global_cross_terms(channels, W, theta)
        previous, current = current, wsr_from_table(table, weights, noise_power)
        trace.append(current)
        if verbose:
            print('{:4d} WSR {:12.6f}'.format(i + 1, current))
        if abs(current - previous) <= tol * max(1.0, abs(previous)):
            break

    return BaselineOutput(W, theta, current, wsr_trace=trace,
                          csi_scalars=csi_upload_size(channels))
