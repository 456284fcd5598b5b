#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""Closed-form updates of the A-Layer (gamma, eta) and W-Layer."""
import numpy as np
import scipy.linalg
import scipy.optimize
from cellfree.optimization.objective import sinr_from_table

RELATIVE_JITTER = 1e-12


class DegenerateUpdateError(ArithmeticError):
    pass


def _check_table(cross):
    if not cross.is_finite():
        raise ValueError('Cross-term table has non-finite entries')


def update_gamma(cross, noise_power):
    """Optimal auxiliary SINRs for the given cross-terms."""
    _check_table(cross)
    return sinr_from_table(cross, noise_power)


def update_eta(cross, gamma, weights, noise_power):
    """Optimal quadratic-transform variables.

    ``eta_k = conj(A_kk) sqrt((1 + gamma_k) w_k) / (sum_j |A_kj|^2 + noise)``
    """
    _check_table(cross)
    A = cross.total()
    total = (np.abs(A) ** 2).sum(axis=1) + noise_power
    a = np.sqrt((1.0 + np.asarray(gamma)) * np.asarray(weights))
    return np.diag(A).conj() * a / total


def _precoding_system(b, channels, theta_b, gamma, eta, cross, W_b_prev, weights):
    """Return ``(M, rhs)`` of the stationarity condition ``M W = rhs``."""
    H_hat = channels.get_composite(b, theta_b)
    eta2 = np.abs(eta) ** 2
    M = (H_hat * eta2) @ H_hat.conj().T
    others = cross.total() - H_hat.conj().T @ W_b_prev
    omega = H_hat @ (eta2[:, None] * others)
    a = np.sqrt((1.0 + np.asarray(gamma)) * np.asarray(weights))
    rhs = H_hat * (a * eta.conj()) - omega
    return M, rhs


def _jitter(M):
    scale = np.real(np.trace(M)) / M.shape[0]
    if scale > 0.0:
        return RELATIVE_JITTER * scale
    return RELATIVE_JITTER


def _solve(M, rhs, mu=0.0):
    eye = np.eye(M.shape[0])
    epsilon = _jitter(M)
    for rescue in (1.0, 1e3, 1e6):
        try:
            W = scipy.linalg.solve(M + (mu + rescue * epsilon) * eye, rhs,
                                   assume_a='pos')
        except (scipy.linalg.LinAlgError, ValueError):
            continue
        if np.all(np.isfinite(W)):
            return W
    raise DegenerateUpdateError('Precoder solve failed after jitter rescue')


def update_w(b, channels, theta_b, gamma, eta, cross, W_b_prev, weights, mu=0.0):
    """Unnormalized precoders of BS ``b``.

    ``w_{b,k} = (M + mu I)^-1 (sqrt((1 + gamma_k) w_k) conj(eta_k) h_hat_{b,k}
    - Omega_{b,k})`` where ``Omega`` removes the stale own contribution
    from the received cross-terms.

    Parameters
    ----------
    b : int
    channels : ChannelSet
    theta_b : (NR,) complex
        RIS configuration held by BS ``b``.
    gamma, eta : (K,) arrays
    cross : CrossTermTable
        Used cross-terms, including the contribution of ``W_b_prev``.
    W_b_prev : (N_t, K) complex
    weights : (K,) array
    mu : float
        Power multiplier; zero for the normalized W-Layer.

    Returns
    -------
    W_b : (N_t, K) complex
    """
    _check_table(cross)
    M, rhs = _precoding_system(
        b, channels, theta_b, gamma, eta, cross, W_b_prev, weights)
    return _solve(M, rhs, mu)


def normalize_power(W_b, P_max):
    """Scale ``W_b`` to total power ``P_max``.

    Returns
    -------
    W_b : ndarray
    is_degenerate : bool
        True when ``W_b`` is zero; it is then returned unchanged.
    """
    norm = np.linalg.norm(W_b)
    if norm == 0.0:
        return W_b, True
    return W_b * (np.sqrt(P_max) / norm), False


def update_w_constrained(b, channels, theta_b, gamma, eta, cross, W_b_prev,
                         weights, P_max):
    """Exact minimizer under ``sum_k ||w_{b,k}||^2 <= P_max``.

    The multiplier ``mu >= 0`` is the root of the power equation and is
    found on the eigenbasis of ``M``.
    """
    _check_table(cross)
    M, rhs = _precoding_system(
        b, channels, theta_b, gamma, eta, cross, W_b_prev, weights)
    eigvals, U = scipy.linalg.eigh(M)
    eigvals = np.maximum(eigvals, 0.0) + _jitter(M)
    c = U.conj().T @ rhs
    c2 = np.sum(np.abs(c) ** 2, axis=1)

    def power(mu):
        return np.sum(c2 / (eigvals + mu) ** 2)

    mu = 0.0
    if power(0.0) > P_max:
        mu_max = np.sqrt(np.sum(c2) / P_max)
        mu = scipy.optimize.brentq(
            lambda x: power(x) - P_max, 0.0, mu_max, xtol=1e-300, rtol=1e-14)
        # brentq may land slightly on the infeasible side
        while power(mu) > P_max:
            mu = np.nextafter(mu, np.inf) * (1.0 + 1e-12)
    return U @ (c / (eigvals + mu)[:, None])


def local_precoding_objective(b, channels, theta_b, gamma, eta, cross, W_b_prev,
                              W_b, weights):
    """Part of the quadratic-transform surrogate that depends on ``W_b``.

    The other BSs' cross-terms are frozen at ``cross`` minus the own
    contribution formed with ``W_b_prev``.
    """
    H_hat = channels.get_composite(b, theta_b)
    others = cross.total() - H_hat.conj().T @ W_b_prev
    A = others + H_hat.conj().T @ W_b
    a = np.sqrt((1.0 + np.asarray(gamma)) * np.asarray(weights))
    value = (np.abs(eta) ** 2 * (np.abs(A) ** 2).sum(axis=1)
             - 2.0 * a * np.real(eta * np.diag(A)))
    return float(np.sum(value))


def mrt_precoder(H_hat, P_max):
    """Maximum-ratio precoders with equal per-UE power.

    Parameters
    ----------
    H_hat : (N_t, K) complex
        Columns are the channels the precoders are matched to.
    P_max : float

    Returns
    -------
    W : (N_t, K) complex
        Zero columns are kept for zero channels.
    """
    K = H_hat.shape[1]
    norms = np.linalg.norm(H_hat, axis=0)
    safe = np.where(norms > 0.0, norms, 1.0)
    W = H_hat / safe * np.sqrt(P_max / K)
    W, _ = normalize_power(W, P_max)
    return W
