#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""Unrolled distributed optimization over ``L`` blocks.

Every block runs, at each BS in parallel, the A-Layer (gamma, eta), the
W-Layer, the theta-Block, the lambda-Layer and the I-Layer, and ends with
a ring exchange behind a barrier.
"""
import os
from multiprocessing.pool import ThreadPool

import numpy as np
from cellfree.analysis.time_measurer import TimeMeasurer
from cellfree.distributed.exchange import (
    ConsensusRelay, CrossTermExchanger, RingFabric, unit_phase)
from cellfree.optimization.fp_updates import (
    update_gamma, update_eta, update_w_constrained, normalize_power,
    mrt_precoder)
from cellfree.optimization.objective import (
    AuxVars, local_contribution, consensus_error, loss, wsr)
from cellfree.optimization.theta_solver import (
    ThetaQuadratic, assemble_S, assemble_Z, solve_theta_bcd)
from cellfree.system.scenario import create_rng, derive_seed, build_scenario

BLOCK_KINDS = ('Ini', 'Mid1', 'Mid2', 'Mid3', 'Out')
DEFAULT_RHO_GRID = (0.01, 0.1, 1.0, 10.0)


class PipelineError(RuntimeError):
    def __init__(self, b, block, error):
        super(PipelineError, self).__init__(
            'BS {} failed in block {}: {!r}'.format(b, block, error))
        self.b = b
        self.block = block
        self.error = error


def resolve_threads(requested=None, default=1):
    """Worker count: ``requested``, else ``CELLFREE_THREADS``, else ``default``.

    ``CELLFREE_THREADS`` also caps an explicit request.
    """
    cap = os.environ.get('CELLFREE_THREADS')
    n = default if requested is None else requested
    if cap:
        try:
            n = min(n, int(cap)) if requested is not None else int(cap)
        except ValueError:
            raise ValueError('CELLFREE_THREADS must be an integer', cap)
    return max(1, int(n))


def block_kind(l, B, L):
    """Kind of block ``l`` (1-based) among ``L`` blocks for ``B`` BSs."""
    if L < B:
        raise ValueError('Number of blocks must be at least B', (L, B))
    if not 1 <= l <= L:
        raise ValueError('Block index out of range', l)
    if l == L:
        return 'Out'
    if l == 1:
        return 'Ini'
    if l < B:
        return 'Mid1'
    if l == B:
        return 'Mid2'
    return 'Mid3'


def fuse_theta(theta_by_bs):
    """Element-wise phase average of the BSs' RIS configurations."""
    return unit_phase(np.asarray(theta_by_bs).sum(axis=0))


def random_phases(rng, n):
    return np.exp(2j * np.pi * rng.random(n))


class BsState(object):
    """Variables held by one BS between blocks.

    ``target`` is the consensus target of the RIS phases; it stays None
    until the first ring sum of proposals has completed.
    """
    def __init__(self, b, W, theta, rho, P_max, exchanger, relay=None):
        self.b = b
        self.W = W
        self.theta = theta
        self.lam = np.zeros_like(theta)
        self.rho = rho
        self.P_max = P_max
        self.exchanger = exchanger
        self.relay = relay
        self.target = None
        self.aux = None
        self.degenerate_count = 0

    def get_proposal(self):
        return self.theta + self.lam / self.rho


def init_bs_state(channels, config, b, seed):
    """Random RIS phases and maximum-ratio precoders on the direct channel."""
    theta = random_phases(create_rng(seed, 'theta_init', b), channels.NR)
    P_max = config.get_P_max()[b]
    W = mrt_precoder(channels.h[b].T, P_max)
    exchanger = CrossTermExchanger(channels, b, config.B, theta, W)
    relay = ConsensusRelay(config.B) if config.B > 1 else None
    return BsState(b, W, theta, config.get_rho()[b], P_max, exchanger, relay)


def run_block(state, l, kind, inbox, channels, config):
    """Run block ``l`` at one BS.

    ``inbox`` is the successor message of block ``l - 1`` (None in block 1
    or without exchange). Returns ``(state, outbox)``.
    """
    b = state.b
    noise_power = config.noise_power
    weights = config.get_weights()
    exchanger = state.exchanger

    if l > 1:
        previous_kind = block_kind(l - 1, config.B, config.get_number_of_blocks())
        exchanger.absorb(previous_kind, l - 1, inbox)
        if inbox is not None:
            state.target = state.relay.absorb(l - 1, inbox.ris)
    used = exchanger.get_used()

    # A-Layer
    gamma = update_gamma(used, noise_power)
    eta = update_eta(used, gamma, weights, noise_power)
    state.aux = AuxVars(gamma, eta)

    # W-Layer
    W = update_w_constrained(b, channels, state.theta, gamma, eta, used,
                             state.W, weights, state.P_max)
    W, is_degenerate = normalize_power(W, state.P_max)
    if is_degenerate:
        state.degenerate_count += 1
        W = state.W

    # theta-Block on the used table refreshed with the new own precoders and
    # its auxiliary variables; without a consensus target the anchor is the
    # own previous phases
    used = (used - local_contribution(channels, b, state.theta, state.W)
            + local_contribution(channels, b, state.theta, W))
    gamma = update_gamma(used, noise_power)
    eta = update_eta(used, gamma, weights, noise_power)
    anchor = state.theta if state.target is None else state.target
    q = ThetaQuadratic(
        assemble_S(b, channels, W, eta, state.rho),
        assemble_Z(b, channels, W, eta, gamma, weights, used, state.lam,
                   state.rho, anchor, state.theta))
    theta = solve_theta_bcd(q, state.theta, max_sweeps=config.bcd_max_sweeps,
                            tol=config.bcd_tol)

    # lambda-Layer
    if kind != 'Out' and state.target is not None:
        state.lam = state.lam + state.rho * (theta - state.target)

    state.W = W
    state.theta = theta

    # I-Layer, process 1
    if kind == 'Out' or state.relay is None:
        ris = theta
    else:
        ris = state.relay.emit(l, state.get_proposal())
    outbox = exchanger.emit(kind, l, W, theta, ris)
    return state, outbox


class RunResult(object):
    """Traces and final variables of one distributed run.

    ``wsr_trace[l-1]`` is the WSR of the block-``l`` precoders with the
    fused RIS configuration, ``consensus_trace[l-1]`` the ring consensus
    error of the block-``l`` RIS configurations.
    """
    def __init__(self, wsr_trace, consensus_trace, W_final, theta_by_bs,
                 message_count, message_trace, wall_clock, degenerate_count=0):
        self.wsr_trace = np.asarray(wsr_trace)
        self.consensus_trace = np.asarray(consensus_trace)
        self.W_final = W_final
        self.theta_by_bs = np.asarray(theta_by_bs)
        self.theta_final = fuse_theta(self.theta_by_bs)
        self.message_count = message_count
        self.message_trace = list(message_trace)
        self.wall_clock = wall_clock
        self.degenerate_count = degenerate_count

    def get_final_wsr(self):
        return float(self.wsr_trace[-1])

    def get_final_consensus_error(self):
        return float(self.consensus_trace[-1])

    def get_number_of_messages(self):
        return len(self.message_trace)

    def to_arrays(self):
        return {
            'wsr_trace': self.wsr_trace,
            'consensus_trace': self.consensus_trace,
            'W_final': self.W_final,
            'theta_final': self.theta_final,
            'theta_by_bs': self.theta_by_bs,
            'message_count': self.message_count,
            'message_trace': np.array(self.message_trace, dtype=int).reshape(-1, 4),
            'wall_clock': self.wall_clock,
        }

    def write_hdf5(self, filename='run.hdf5'):
        from cellfree.file_io import write_run_hdf5
        write_run_hdf5(self, filename)


def run_distributed(channels, config, seed=None, threads=None, sequential=False,
                    verbose=False):
    """Run the unrolled distributed pipeline.

    Parameters
    ----------
    channels : ChannelSet
    config : SystemConfig
    seed : int
        Seed of the RIS initialization; ``config.seed`` if None.
    threads : int
        Size of the BS worker pool.
    sequential : bool
        Run the BSs one after another in the calling thread. Results are
        identical to the threaded run.
    """
    if seed is None:
        seed = config.seed
    B = config.B
    L = config.get_number_of_blocks()
    weights = config.get_weights()
    noise_power = config.noise_power

    states = [init_bs_state(channels, config, b, seed) for b in range(B)]
    fabric = RingFabric(B)
    inboxes = [None] * B
    wsr_trace = []
    consensus_trace = []

    pool = None
    if not sequential and B > 1:
        pool = ThreadPool(processes=resolve_threads(threads, default=B))

    with TimeMeasurer('Distributed pipeline', verbose=verbose) as tm:
        try:
            for l in range(1, L + 1):
                kind = block_kind(l, B, L)

                def work(b):
                    try:
                        return run_block(states[b], l, kind, inboxes[b],
                                         channels, config)
                    except Exception as e:
                        raise PipelineError(b, l, e)

                if pool is None:
                    results = [work(b) for b in range(B)]
                else:
                    results = pool.map(work, range(B))

                # barrier
                for _, outbox in results:
                    if outbox is not None:
                        fabric.post(outbox)
                fabric.close_block(l)
                if kind != 'Out' and B > 1:
                    inboxes = [fabric.receive(b, l) for b in range(B)]

                W = np.array([state.W for state in states])
                theta_by_bs = np.array([state.theta for state in states])
                wsr_trace.append(wsr(W, fuse_theta(theta_by_bs), channels,
                                     weights, noise_power))
                consensus_trace.append(consensus_error(theta_by_bs))
                if verbose:
                    print('{:4d} {:4s} WSR {:12.6f} consensus {:14.6e}'.format(
                        l, kind, wsr_trace[-1], consensus_trace[-1]))
        finally:
            if pool is not None:
                pool.close()
                pool.join()

    return RunResult(
        wsr_trace, consensus_trace,
        W_final=np.array([state.W for state in states]),
        theta_by_bs=np.array([state.theta for state in states]),
        message_count=fabric.total_scalars,
        message_trace=fabric.trace,
        wall_clock=tm.interval,
        degenerate_count=sum(state.degenerate_count for state in states))


def make_tuning_batch(config, batch_size, seed=None):
    """Held-out channel draws, independent of the evaluation seeds."""
    from cellfree.channel.channel_set import draw_channel_set
    if seed is None:
        seed = config.seed
    batch = []
    for q in range(batch_size):
        sample_seed = derive_seed(seed, 'tune', q)
        scenario = build_scenario(config, sample_seed)
        batch.append(draw_channel_set(scenario, sample_seed))
    return batch


def evaluate_rho(channels_batch, config, rho, threads=None):
    """Loss of the final block averaged over ``channels_batch``."""
    trial = config.replace(rho=tuple(float(x) for x in rho))
    thetas = []
    wsrs = []
    for channels in channels_batch:
        result = run_distributed(channels, trial, threads=threads)
        thetas.append(result.theta_by_bs)
        wsrs.append(result.get_final_wsr())
    return loss(np.array(thetas), np.array(wsrs))


def tune_rho(channels_batch, config, grid=DEFAULT_RHO_GRID, max_rounds=3,
             threads=None, verbose=False):
    """Coordinate descent of the per-BS penalties over ``grid``.

    Starts from ``config.rho`` where it lies on the grid (else the grid
    value closest in log scale) and accepts only strict improvements.

    Returns
    -------
    rho : (B,) ndarray
    best_loss : float
    """
    grid = [float(x) for x in grid]
    if not grid or any(x <= 0.0 for x in grid):
        raise ValueError('rho grid must hold positive values', grid)
    log_grid = np.log(grid)
    rho = []
    for value in config.get_rho():
        if value in grid:
            rho.append(value)
        else:
            rho.append(grid[int(np.argmin(np.abs(log_grid - np.log(max(value, 1e-300)))))])

    cache = {}

    def evaluate(candidate):
        key = tuple(candidate)
        if key not in cache:
            cache[key] = evaluate_rho(channels_batch, config, candidate, threads)
            if verbose:
                print('rho {} loss {:14.6f}'.format(list(key), cache[key]))
        return cache[key]

    best_loss = evaluate(rho)
    for _ in range(max_rounds):
        improved = False
        for b in range(config.B):
            for candidate in grid:
                if candidate == rho[b]:
                    continue
                trial = list(rho)
                trial[b] = candidate
                trial_loss = evaluate(trial)
                if trial_loss < best_loss:
                    rho, best_loss = trial, trial_loss
                    improved = True
        if not improved:
            break
    return np.array(rho), best_loss
