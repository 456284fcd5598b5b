#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""Unit-modulus quadratic ``theta^H S theta - 2 Re(theta^H Z)`` of the RIS
phases: assembly for one BS and block-coordinate descent."""
import numpy as np
import scipy.linalg
from cellfree.channel.channel_set import check_unit_modulus


class ThetaQuadratic(object):
    def __init__(self, S, Z, prec=1e-9):
        S = np.asarray(S, dtype=complex)
        Z = np.asarray(Z, dtype=complex)
        if S.ndim != 2 or S.shape[0] != S.shape[1] or Z.shape != (S.shape[0],):
            raise ValueError('S must be NR x NR and Z of length NR')
        if not (np.all(np.isfinite(S)) and np.all(np.isfinite(Z))):
            raise ValueError('Theta quadratic has non-finite entries')
        scale = max(np.max(np.abs(S)), 1e-300)
        if np.max(np.abs(S - S.conj().T)) > prec * scale:
            raise ValueError('S must be Hermitian')
        self.S = 0.5 * (S + S.conj().T)
        self.Z = Z

    def get_size(self):
        return len(self.Z)


def _reflected_streams(b, channels, W_b):
    """``U[k, :, j] = V_k^H G_b w_{b,j}``, shape (K, NR, K)."""
    GW = channels.G[b] @ W_b
    return channels.v_stack.conj()[:, :, None] * GW[None, :, :]


def assemble_S(b, channels, W_b, eta, rho_b):
    """``sum_k |eta_k|^2 sum_j U_kj U_kj^H + (rho_b / 2) I``."""
    U = _reflected_streams(b, channels, W_b)
    U = U * np.abs(eta)[:, None, None]
    S = np.einsum('knj,kmj->nm', U, U.conj())
    S = 0.5 * (S + S.conj().T)
    return S + 0.5 * rho_b * np.eye(channels.NR)


def assemble_Z(b, channels, W_b, eta, gamma, weights, cross, lambda_b, rho_b,
               theta_neighbor, theta_ref):
    """Linear coefficient of the local augmented Lagrangian in ``theta_b``.

    Parameters
    ----------
    cross : CrossTermTable
        Used cross-terms whose own part was formed with ``(theta_ref, W_b)``.
    lambda_b : (NR,) complex
        Dual variable of the consensus constraint with the neighbour.
    theta_neighbor : (NR,) complex
        RIS configuration last received from the neighbour.
    theta_ref : (NR,) complex
        RIS configuration the own part of ``cross`` was formed with.
    """
    eta = np.asarray(eta, dtype=complex)
    U = _reflected_streams(b, channels, W_b)
    GW = channels.G[b] @ W_b
    reflected = (channels.v_stack * theta_ref).conj() @ GW
    d = cross.total() - reflected
    a = np.sqrt((1.0 + np.asarray(gamma)) * np.asarray(weights))
    U_diag = channels.v_stack.conj() * GW.T
    Z = (np.einsum('kn,k->n', U_diag, a * eta)
         - np.einsum('knj,kj->n', U, (np.abs(eta) ** 2)[:, None] * d.conj()))
    return Z + 0.5 * (rho_b * np.asarray(theta_neighbor) - np.asarray(lambda_b))


def theta_objective(q, theta):
    theta = np.asarray(theta)
    return float(np.real(theta.conj() @ q.S @ theta)
                 - 2.0 * np.real(theta.conj() @ q.Z))


def _candidate_starts(q, theta_init):
    """``theta_init`` first, then phase projections of ``Z``, of the
    least-squares point ``S^+ Z``, of the regularized point
    ``(S + lambda_max I)^{-1} Z`` and of the weakest eigenvector of ``S``."""
    starts = [np.array(theta_init, dtype=complex)]
    vectors = [q.Z]
    vectors.append(scipy.linalg.lstsq(q.S, q.Z, cond=None,
                                      lapack_driver='gelsy')[0])
    w, U = scipy.linalg.eigh(q.S)
    shift = max(w[-1], 0.0)
    if w[0] + shift > 0.0:
        vectors.append(U @ ((U.conj().T @ q.Z) / (w + shift)))
    u = U[:, 0]
    alignment = np.vdot(u, q.Z)
    if alignment != 0.0:
        u = u * (alignment / abs(alignment))
    vectors.append(u)
    for vector in vectors:
        magnitude = np.abs(vector)
        if np.all(magnitude > 0.0) and np.all(np.isfinite(vector)):
            starts.append(vector / magnitude)
    return starts


def _sweep(q, theta, max_sweeps, tol, objective_trace):
    S = q.S
    Z = q.Z
    columns = np.ascontiguousarray(S.T)
    diagonal = np.real(np.diag(S))
    scale = np.sum(np.abs(S)) + 2.0 * np.sum(np.abs(Z))
    s = S @ theta
    objective = theta_objective(q, theta)
    objective_trace.append(objective)

    for _ in range(max_sweeps):
        for n in range(len(theta)):
            argument = Z[n] - (s[n] - diagonal[n] * theta[n])
            magnitude = abs(argument)
            if magnitude == 0.0:
                continue
            updated = argument / magnitude
            delta = updated - theta[n]
            if delta != 0.0:
                s += columns[n] * delta
                theta[n] = updated
        s = S @ theta
        new_objective = theta_objective(q, theta)
        if new_objective > objective + 1e-10 * scale:
            raise ArithmeticError('BCD sweep increased the objective')
        objective_trace.append(new_objective)
        decrease = objective - new_objective
        objective = new_objective
        if decrease <= tol * abs(objective):
            break
    return theta, objective


def solve_theta_bcd(q, theta_init, max_sweeps=50, tol=1e-8,
                    objective_trace=None):
    """Element-wise block-coordinate descent on the unit circle.

    Each element moves to ``exp(j arg(Z_n - sum_{m != n} S_nm theta_m))``;
    an element whose argument is exactly zero is kept. Sweeps stop when the
    relative decrease drops below ``tol``.

    The descent runs from ``theta_init`` and from the deterministic
    starts of ``_candidate_starts``; the lowest final objective wins and
    ties go to the earlier start, so the result is never worse than the
    descent from ``theta_init`` alone. The per-sweep objectives of the
    winning run are appended to ``objective_trace`` when a list is given.
    """
    theta_init = np.array(theta_init, dtype=complex)
    if theta_init.shape != (q.get_size(),):
        raise ValueError('theta_init does not match the quadratic')
    check_unit_modulus(theta_init)

    best = None
    for start in _candidate_starts(q, theta_init):
        trace = []
        theta, objective = _sweep(q, np.array(start), max_sweeps, tol, trace)
        if best is None or objective < best[1]:
            best = (theta, objective, trace)
    theta, _, trace = best
    if objective_trace is not None:
        objective_trace.extend(trace)
    return theta
