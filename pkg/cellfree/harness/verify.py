#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""Oracle and property checks behind the ``verify`` subcommand."""
import itertools

import numpy as np
import scipy.optimize
from cellfree.channel.channel_set import draw_channel_set, draw_iid_channel_set
from cellfree.distributed.exchange import (
    CrossTermExchanger, RingFabric, count_overhead, ring_route)
from cellfree.distributed.pipeline import (
    block_kind, run_distributed, random_phases)
from cellfree.harness.experiment import ExperimentSpec, run_experiment
from cellfree.optimization.fp_updates import (
    update_gamma, update_eta, update_w, local_precoding_objective)
from cellfree.optimization.objective import (
    global_cross_terms, local_contribution, wsr_from_table, f1_from_table,
    f2_from_table)
from cellfree.optimization.theta_solver import (
    ThetaQuadratic, solve_theta_bcd, theta_objective)
from cellfree.system.config import (
    SystemConfig, create_default_config, dbm_to_watt)
from cellfree.system.scenario import build_scenario

TIGHTNESS_GRID = tuple(itertools.product((1, 2, 4), (1, 2, 4)))


def _random_precoders(rng, B, N_t, K):
    return (rng.standard_normal((B, N_t, K))
            + 1j * rng.standard_normal((B, N_t, K))) / np.sqrt(2.0)


def _random_instance(rng, B=3, R=2, K=3, N=4, N_t=2):
    channels = draw_iid_channel_set(rng, B, R, K, N, N_t)
    W = _random_precoders(rng, B, N_t, K)
    theta = random_phases(rng, channels.NR)
    weights = rng.uniform(0.5, 2.0, K)
    return channels, W, theta, weights


def transform_gap(channels, W, theta, weights, noise_power):
    """Relative gaps of f1 at gamma against -WSR and of f2 at eta against f1."""
    table = global_cross_terms(channels, W, theta)
    gamma = update_gamma(table, noise_power)
    eta = update_eta(table, gamma, weights, noise_power)
    rate = wsr_from_table(table, weights, noise_power)
    value1 = f1_from_table(table, gamma, weights, noise_power)
    value2 = f2_from_table(table, gamma, eta, weights, noise_power)
    scale = max(1.0, abs(rate))
    return max(abs(value1 + rate), abs(value2 - value1)) / scale


def check_transform_tightness(n_instances=200, noise_power=0.5, seed=0):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for i in range(n_instances):
        B, K = TIGHTNESS_GRID[i % len(TIGHTNESS_GRID)]
        channels, W, theta, weights = _random_instance(rng, B=B, R=1, K=K, N=8)
        worst = max(worst, transform_gap(channels, W, theta, weights,
                                         noise_power))
    return worst <= 1e-9, 'max relative gap {:.3e}'.format(worst)


def check_gamma_closed_form(n_instances=100, noise_power=0.5, seed=1):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_instances):
        channels, W, theta, weights = _random_instance(rng)
        table = global_cross_terms(channels, W, theta)
        gamma = update_gamma(table, noise_power)
        for k in range(channels.K):
            def fun(x):
                trial = np.array(gamma)
                trial[k] = x
                return f1_from_table(table, trial, weights, noise_power,
                                     log_base=np.e)
            res = scipy.optimize.minimize_scalar(
                fun, bounds=(0.0, 10.0 * (gamma[k] + 1.0)), method='bounded',
                options={'xatol': 1e-10})
            worst = max(worst, abs(res.x - gamma[k]) / max(1.0, gamma[k]))
    return worst <= 1e-6, 'max relative deviation {:.3e}'.format(worst)


def eta_gradient(table, gamma, eta, weights, noise_power, step=1e-6):
    """Central-difference gradient of ``f2`` in the quadratic-transform variables."""
    gradient = np.zeros(eta.shape, dtype=complex)
    for k in range(eta.size):
        for unit in (1.0, 1j):
            plus = np.array(eta)
            minus = np.array(eta)
            plus[k] += unit * step
            minus[k] -= unit * step
            diff = (f2_from_table(table, gamma, plus, weights, noise_power)
                    - f2_from_table(table, gamma, minus, weights, noise_power))
            gradient[k] += unit * diff / (2.0 * step)
    return gradient


def check_eta_stationarity(n_instances=100, noise_power=0.5, seed=6):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_instances):
        channels, W, theta, weights = _random_instance(rng)
        table = global_cross_terms(channels, W, theta)
        gamma = update_gamma(table, noise_power)
        eta = update_eta(table, gamma, weights, noise_power)
        scale = max(1.0, abs(f2_from_table(table, gamma, eta, weights,
                                           noise_power)))
        gradient = eta_gradient(table, gamma, eta, weights, noise_power)
        worst = max(worst, np.linalg.norm(gradient) / scale)
    return worst <= 1e-5, 'max scaled gradient norm {:.3e}'.format(worst)


def precoding_gradient(b, channels, theta, gamma, eta, cross, W_prev, W_b,
                       weights, step=1e-6):
    """Central-difference gradient of the local precoding objective."""
    gradient = np.zeros(W_b.shape, dtype=complex)
    for index in np.ndindex(*W_b.shape):
        for unit in (1.0, 1j):
            plus = np.array(W_b)
            minus = np.array(W_b)
            plus[index] += unit * step
            minus[index] -= unit * step
            diff = (local_precoding_objective(b, channels, theta, gamma, eta,
                                              cross, W_prev, plus, weights)
                    - local_precoding_objective(b, channels, theta, gamma, eta,
                                                cross, W_prev, minus, weights))
            gradient[index] += unit * diff / (2.0 * step)
    return gradient


def check_w_stationarity(n_instances=100, noise_power=1.0, seed=2):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_instances):
        channels, W, theta, weights = _random_instance(rng, K=3, N_t=4)
        b = int(rng.integers(channels.B))
        table = global_cross_terms(channels, W, theta)
        gamma = update_gamma(table, noise_power)
        eta = update_eta(table, gamma, weights, noise_power)
        W_b = update_w(b, channels, theta, gamma, eta, table, W[b], weights)
        gradient = precoding_gradient(b, channels, theta, gamma, eta, table,
                                      W[b], W_b, weights)
        reference = np.linalg.norm(precoding_gradient(
            b, channels, theta, gamma, eta, table, W[b], W[b], weights))
        worst = max(worst, np.linalg.norm(gradient) / max(reference, 1e-300))
    return worst <= 1e-5, 'max gradient ratio {:.3e}'.format(worst)


def grid_minimum(q, n_grid=400):
    phases = np.exp(2j * np.pi * np.arange(n_grid) / n_grid)
    t1 = phases[:, None]
    t2 = phases[None, :]
    S = q.S
    Z = q.Z
    values = (np.real(S[0, 0]) + np.real(S[1, 1])
              + 2.0 * np.real(t1.conj() * S[0, 1] * t2)
              - 2.0 * np.real(t1.conj() * Z[0] + t2.conj() * Z[1]))
    return float(values.min())


def check_theta_against_grid(n_instances=50, seed=3):
    """Single-start BCD against the 400 x 400 phase grid, NR = 2."""
    rng = np.random.default_rng(seed)
    worst = -np.inf
    monotone = True
    for _ in range(n_instances):
        X = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
        Z = rng.standard_normal(2) + 1j * rng.standard_normal(2)
        q = ThetaQuadratic(X @ X.conj().T, Z)
        trace = []
        theta = solve_theta_bcd(q, random_phases(rng, 2), objective_trace=trace)
        monotone = monotone and all(
            b <= a + 1e-10 * max(1.0, abs(a))
            for a, b in zip(trace[:-1], trace[1:]))
        worst = max(worst, theta_objective(q, theta) - grid_minimum(q))
    return (worst <= 1e-3 and monotone,
            'max excess over grid {:.3e}'.format(worst))


def expected_used_table(channels, b, l, B, snapshots):
    """Used table of block ``l + 1`` replayed from the central variables.

    ``snapshots[l][b] = (W_b, theta_b)``; BS ``b + i`` is known with the
    variables of block ``l - i + 1`` (own ones of block ``l``).
    """
    W_b, theta_b = snapshots[l][b]
    table = local_contribution(channels, b, theta_b, W_b)
    for i in range(1, min(l, B - 1) + 1):
        other = (b + i) % B
        W_o, theta_o = snapshots[l - i + 1][other]
        table = table + local_contribution(channels, other, theta_o, W_o)
    return table


def replay_exchange(channels, B, L, snapshots):
    """Drive the exchangers with prescribed variables.

    Returns the used tables ``used[l][b]`` of blocks 2..L and the fabric.
    """
    exchangers = [CrossTermExchanger(channels, b, B, snapshots[0][b][1],
                                     snapshots[0][b][0]) for b in range(B)]
    fabric = RingFabric(B)
    used = {}
    for l in range(1, L):
        kind = block_kind(l, B, L)
        for b in range(B):
            W_b, theta_b = snapshots[l][b]
            message = exchangers[b].emit(kind, l, W_b, theta_b, theta_b)
            if message is not None:
                fabric.post(message)
        fabric.close_block(l)
        used[l + 1] = []
        for b in range(B):
            message = fabric.receive(b, l) if B > 1 else None
            used[l + 1].append(exchangers[b].absorb(kind, l, message))
    return used, fabric


def random_snapshots(rng, channels, B, L):
    return {l: [(_random_precoders(rng, 1, channels.N_t, channels.K)[0],
                 random_phases(rng, channels.NR)) for _ in range(B)]
            for l in range(L)}


def replay_error(channels, B, L, snapshots):
    """Largest entrywise gap between replayed and expected used tables."""
    used, fabric = replay_exchange(channels, B, L, snapshots)
    worst = 0.0
    for l in range(1, L):
        for b in range(B):
            expected = expected_used_table(channels, b, l, B, snapshots)
            diff = (used[l + 1][b] - expected).total()
            worst = max(worst, np.max(np.abs(diff)))
    return worst, fabric


def check_exchange_replay(Bs=(2, 3, 4), seed=4):
    rng = np.random.default_rng(seed)
    passed = True
    worst = 0.0
    for B in Bs:
        L = B + 2
        channels = draw_iid_channel_set(rng, B, 2, 3, 4, 2)
        snapshots = random_snapshots(rng, channels, B, L)
        error, fabric = replay_error(channels, B, L, snapshots)
        worst = max(worst, error)
        expected_count = count_overhead(B, L, channels.K, channels.R, channels.N)
        passed = passed and fabric.total_scalars == expected_count
        for block, sender, receiver, _ in fabric.trace:
            passed = passed and ring_route(sender, B)[0] == receiver
    passed = passed and worst <= 1e-10
    return passed, 'max table error {:.3e} over B = {}'.format(worst, list(Bs))


def check_overhead_constant():
    count = count_overhead(4, 6, 4, 2, 50)
    return count == 2640, 'B=4 L=6 K=4 R=2 N=50 gives {}'.format(count)


def check_determinism(seed=5, thread_counts=(1, 2, 8)):
    config = SystemConfig(B=3, R=2, K=2, N=4, N_t=2, seed=seed,
                          noise_power=1e-11)
    channels = draw_channel_set(build_scenario(config), seed)
    reference = run_distributed(channels, config, sequential=True)
    passed = True
    for threads in thread_counts:
        result = run_distributed(channels, config, threads=threads)
        passed = (passed
                  and np.array_equal(result.W_final, reference.W_final)
                  and np.array_equal(result.theta_by_bs, reference.theta_by_bs)
                  and np.array_equal(result.wsr_trace, reference.wsr_trace))
    return passed, 'runs at {} threads {}'.format(
        list(thread_counts), 'identical' if passed else 'differ')


CHECKS = (
    ('transform tightness', check_transform_tightness),
    ('gamma closed form', check_gamma_closed_form),
    ('eta stationarity', check_eta_stationarity),
    ('W-Layer stationarity', check_w_stationarity),
    ('theta BCD against grid', check_theta_against_grid),
    ('exchange replay', check_exchange_replay),
    ('overhead constant', check_overhead_constant),
    ('thread determinism', check_determinism),
)


ORDERING = ('centralized', 'distributed', 'local_zf_maxao', 'mrt_maxao',
            'mrt_random')
STATISTICAL_P_DBM = (10.0, 20.0, 30.0)


def mean_wsr_table(rows):
    """Mean WSR per ``(algorithm, sweep_value)`` over the seeds in ``rows``."""
    values = {}
    for row in rows:
        values.setdefault((row.algorithm, row.sweep_value), []).append(row.wsr_bits)
    return {key: float(np.mean(wsr)) for key, wsr in values.items()}


def check_consensus_decay(config, seeds):
    """Count seeds whose final consensus error drops below 10% of block 1."""
    decayed = 0
    for seed in seeds:
        swept = config.replace(seed=seed)
        channels = draw_channel_set(build_scenario(swept, seed), seed)
        trace = run_distributed(channels, swept, seed=seed).consensus_trace
        if trace[-1] < 0.1 * trace[0]:
            decayed += 1
    return decayed


def check_ordering(means, powers):
    """Mean WSR ordering at every power, ties allowed."""
    failures = []
    for p in powers:
        chain = [means[(name, p)] for name in ORDERING]
        if any(upper < lower for upper, lower in zip(chain[:-1], chain[1:])):
            failures.append(p)
    return failures


def check_monotone_in_power(means, powers):
    """Algorithms whose mean WSR is not strictly increasing in P."""
    powers = sorted(powers)
    return [name for name in ORDERING
            if any(means[(name, lo)] >= means[(name, hi)]
                   for lo, hi in zip(powers[:-1], powers[1:]))]


def statistical_checks(n_seeds=50, powers=STATISTICAL_P_DBM, threads=None,
                       verbose=False):
    """Reproduce the headline comparisons at desk scale.

    Returns a list of ``(name, passed, detail)``.
    """
    config = create_default_config()
    seeds = range(n_seeds)
    spec = ExperimentSpec(config, 'P_dBm', powers, seeds, ORDERING,
                          threads=threads)
    means = mean_wsr_table(run_experiment(spec, verbose=verbose))
    powers = [float(p) for p in powers]
    top = max(powers)
    if verbose:
        for p in powers:
            print('  P {:5.1f} dBm: '.format(p) + '  '.join(
                '{} {:.4f}'.format(name, means[(name, p)]) for name in ORDERING))

    decayed = check_consensus_decay(
        config.replace(P_max=float(dbm_to_watt(top))), seeds)
    disordered = check_ordering(means, powers)
    flat = check_monotone_in_power(means, powers)
    share = means[('distributed', top)] / means[('centralized', top)]
    gain = means[('distributed', top)] / max(means[('local_zf_maxao', top)],
                                             1e-300)
    return [
        ('consensus decay', decayed >= 0.9 * n_seeds,
         '{}/{} seeds below 10% of block 1'.format(decayed, n_seeds)),
        ('algorithm ordering', not disordered,
         'violated at P = {}'.format(disordered) if disordered
         else 'holds at every P'),
        ('monotone in power', not flat,
         'not increasing: {}'.format(', '.join(flat)) if flat
         else 'every algorithm increasing'),
        ('share of centralized WSR', share >= 0.8, '{:.3f}'.format(share)),
        ('gain over local ZF', gain >= 1.5, '{:.3f}'.format(gain)),
    ]


def run_verification(statistical=False, n_seeds=50, threads=None,
                     verbose=False):
    """Print one line per check; return True when every check passes."""
    results = []
    for name, check in CHECKS:
        passed, detail = check()
        results.append((name, passed, detail))
    if statistical:
        results.extend(statistical_checks(n_seeds=n_seeds, threads=threads,
                                          verbose=verbose))
    for name, passed, detail in results:
        print('[{}] {:28s} {}'.format('PASS' if passed else 'FAIL', name, detail))
    return all(passed for _, passed, _ in results)
