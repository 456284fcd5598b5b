#!/usr/bin/env python
# -*- coding: utf-8 -*-
from __future__ import print_function
import argparse
import sys

from cellfree.harness.experiment import (
    ALGORITHMS, SWEEP_VARS, AlgorithmFactory, ExperimentSpec, ResultRow,
    run_experiment)
from cellfree.harness.result_writer import ResultWriterCSV, ResultWriterHDF5
from cellfree.system.config import (
    ConfigError, create_default_config, dbm_to_watt, load_config)

EXIT_SUCCESS = 0
EXIT_FAILURE = 1
EXIT_CONFIG_ERROR = 2

OVERRIDES = (
    # flag, config field, type
    ('--B', 'B', int),
    ('--R', 'R', int),
    ('--K', 'K', int),
    ('--N', 'N', int),
    ('--Nt', 'N_t', int),
    ('--L', 'L', int),
    ('--rho', 'rho', float),
    ('--paths', 'n_paths', int),
    ('--bcd-max-sweeps', 'bcd_max_sweeps', int),
    ('--fp-max-iters', 'fp_max_iters', int),
)


def _create_common_parser():
    parser = argparse.ArgumentParser(add_help=False)
    parser.add_argument('--config', help='JSON/YAML configuration file')
    parser.add_argument('--seed', type=int, help='Global seed')
    parser.add_argument('--paper-scale', action='store_true',
                        help='Use N=50 elements per RIS (default N=16)')
    parser.add_argument('--P-dBm', dest='P_dBm', type=float,
                        help='BS power budget in dBm')
    parser.add_argument('--noise-dBm', dest='noise_dBm', type=float,
                        help='Noise power in dBm')
    for flag, field, type_ in OVERRIDES:
        parser.add_argument(flag, dest=field, type=type_)
    parser.add_argument('--threads', type=int,
                        help='Worker pool size (capped by CELLFREE_THREADS)')
    parser.add_argument('-v', '--verbose', action='store_true')
    return parser


def create_parser():
    common = _create_common_parser()
    parser = argparse.ArgumentParser(
        prog='cellfree',
        description='Distributed RIS-assisted cell-free downlink simulator')
    subparsers = parser.add_subparsers(dest='command')
    subparsers.required = True

    run = subparsers.add_parser('run', parents=[common],
                                help='Run algorithms on one channel draw')
    run.add_argument('--algo', nargs='+', default=['distributed'],
                     choices=ALGORITHMS)
    run.add_argument('--out', help='Result CSV')
    run.add_argument('--hdf5', help='HDF5 dump of the distributed run')
    run.add_argument('--trace', help='Message trace of the distributed run')
    run.add_argument('--channel-dump', help='CSV dump of all channels')
    run.add_argument('--timing', action='store_true',
                     help='Record runtimes (makes output non-reproducible)')
    run.add_argument('--sequential', action='store_true',
                     help='Run BS workers in the calling thread')

    sweep = subparsers.add_parser('sweep', parents=[common],
                                  help='Sweep one quantity over seeds')
    sweep.add_argument('--var', required=True, choices=SWEEP_VARS)
    sweep.add_argument('--values', required=True, nargs='+', type=float)
    sweep.add_argument('--seeds', type=int, default=1,
                       help='Number of seeds, starting at --seed')
    sweep.add_argument('--algo', nargs='+', default=list(ALGORITHMS),
                       choices=ALGORITHMS)
    sweep.add_argument('--out', default='results.csv')
    sweep.add_argument('--hdf5', help='Also write the rows to HDF5')
    sweep.add_argument('--timing', action='store_true')

    tune = subparsers.add_parser('tune-rho', parents=[common],
                                 help='Select per-BS penalty parameters')
    tune.add_argument('--batch', type=int, default=8,
                      help='Held-out channel draws')
    tune.add_argument('--grid', nargs='+', type=float,
                      default=[0.01, 0.1, 1.0, 10.0])
    tune.add_argument('--rounds', type=int, default=3)

    verify = subparsers.add_parser('verify', parents=[common],
                                   help='Run the oracle and property checks')
    verify.add_argument('--statistical', action='store_true',
                        help='Also reproduce the headline comparisons')
    verify.add_argument('--stat-seeds', type=int, default=50)
    return parser


def build_config(args):
    paper_scale = getattr(args, 'paper_scale', False)
    if args.config:
        config = load_config(args.config, paper_scale=paper_scale)
    else:
        config = create_default_config(paper_scale=paper_scale)
    changes = {}
    if args.seed is not None:
        changes['seed'] = args.seed
    if args.P_dBm is not None:
        changes['P_max'] = float(dbm_to_watt(args.P_dBm))
    if args.noise_dBm is not None:
        changes['noise_power'] = float(dbm_to_watt(args.noise_dBm))
    for _, field, _ in OVERRIDES:
        value = getattr(args, field)
        if value is not None:
            changes[field] = value
    return config.replace(**changes)


def _run(args, config):
    from cellfree.channel.channel_set import draw_channel_set
    from cellfree.distributed.pipeline import run_distributed
    from cellfree.analysis.time_measurer import TimeMeasurer
    from cellfree.file_io import write_channel_dump, write_message_trace
    from cellfree.harness.experiment import Outcome
    from cellfree.system.scenario import build_scenario

    scenario = build_scenario(config)
    channels = draw_channel_set(scenario)
    if args.channel_dump:
        write_channel_dump(channels, args.channel_dump)

    rows = []
    for name in args.algo:
        with TimeMeasurer(name, verbose=args.verbose) as tm:
            if name == 'distributed':
                result = run_distributed(
                    channels, config, threads=args.threads,
                    sequential=args.sequential, verbose=args.verbose)
                outcome = Outcome(result.get_final_wsr(),
                                  result.get_final_consensus_error(),
                                  result.message_count)
                if args.hdf5:
                    result.write_hdf5(args.hdf5)
                if args.trace:
                    write_message_trace(result.message_trace, args.trace)
            else:
                outcome = AlgorithmFactory(name).create()(
                    channels, config, config.seed)
        print('{:16s} WSR {:12.6f} bit/s/Hz  consensus {:12.6e}  '
              'scalars {:8d}'.format(name, outcome.wsr, outcome.consensus_err,
                                     outcome.msg_complex_scalars))
        rows.append(ResultRow(
            name, 'none', 0.0, config.seed, outcome.wsr, outcome.consensus_err,
            outcome.msg_complex_scalars,
            tm.get_interval_ms() if args.timing else 0.0))
    if args.out:
        ResultWriterCSV(args.out, rows)
    return EXIT_SUCCESS


def _sweep(args, config):
    if args.seeds < 1:
        raise ConfigError('--seeds must be >= 1')
    seeds = range(config.seed, config.seed + args.seeds)
    spec = ExperimentSpec(config, args.var, args.values, seeds, args.algo,
                          record_runtime=args.timing, threads=args.threads)
    rows = run_experiment(spec, verbose=args.verbose)
    ResultWriterCSV(args.out, rows)
    if args.hdf5:
        ResultWriterHDF5(args.hdf5, rows)
    print('{} rows written to {}'.format(len(rows), args.out))
    return EXIT_SUCCESS


def _tune_rho(args, config):
    from cellfree.distributed.pipeline import make_tuning_batch, tune_rho
    if args.batch < 1:
        raise ConfigError('--batch must be >= 1')
    batch = make_tuning_batch(config, args.batch)
    rho, best_loss = tune_rho(batch, config, grid=args.grid,
                              max_rounds=args.rounds, threads=args.threads,
                              verbose=args.verbose)
    print('rho  ' + ' '.join('{:g}'.format(x) for x in rho))
    print('loss {:.6f}'.format(best_loss))
    return EXIT_SUCCESS


def _verify(args, config):
    from cellfree.harness.verify import run_verification
    passed = run_verification(statistical=args.statistical,
                              n_seeds=args.stat_seeds, threads=args.threads,
                              verbose=args.verbose)
    return EXIT_SUCCESS if passed else EXIT_FAILURE


COMMANDS = {
    'run': _run,
    'sweep': _sweep,
    'tune-rho': _tune_rho,
    'verify': _verify,
}


def main(argv=None):
    parser = create_parser()
    args = parser.parse_args(argv)
    try:
        config = build_config(args)
        return COMMANDS[args.command](args, config)
    except ConfigError as e:
        print('cellfree: configuration error: {}'.format(e), file=sys.stderr)
        return EXIT_CONFIG_ERROR
    except Exception as e:
        print('cellfree: error: {}'.format(e), file=sys.stderr)
        return EXIT_FAILURE
