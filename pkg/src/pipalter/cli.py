"""The pipalter command line.

Subcommands:

- solve: Round-and-alter a JSON instance and write a solution JSON.
- gen: Generate random, knapsack, MIS or standard suite instances.
- experiment: Run a sweep spec and write a CSV report.
- verify-bounds: Check the inequalities and Chernoff bound on grids.
- oracle: Solve a small instance exactly.

Exit codes are 0 on success, 1 on runtime failures, 2 on usage or
validation errors and 3 when a width one instance is refused without
--force-heuristic. All randomness flows from --seed; without it a seed is
drawn from system entropy and printed to stderr.

Typical usage example:

    pipalter gen --kind mis --graph k 6 --out k6.json
    pipalter solve --input k6.json --force-heuristic --seed 7
"""

import argparse
import json
import logging
from pathlib import Path
import sys
from typing import Dict, List, Optional, Sequence

import numpy as np

from pipalter import __version__
from pipalter.bounds.inequalities import TABLE_HEADER, verify_bounds
from pipalter.core import streams
from pipalter.core.errors import PipalterError, WidthOneError
from pipalter.core.resources import default_workers
from pipalter.experiments.sweep import SweepSpec, sweep
from pipalter.instances import generators, graphs, io
from pipalter.instances.normalization import normalize
from pipalter.rounding.framework import round_and_alter
from pipalter.rounding.regimes import config_for, select_regime
from pipalter.solvers.oracle import brute_force_opt, exhaustive_opt
from pipalter.solvers.simplex import BoundedSimplex

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2
EXIT_WIDTH_ONE = 3

GRAPH_KINDS = {'k': 'complete', 'complete': 'complete', 'path': 'path',
               'random': 'random'}


def _positive_int(text: str) -> int:
    """Parses a strictly positive integer flag value."""

    try:
        value = int(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(
                'expected an integer not {!r}'.format(text)) from exc
    if value < 1:
        raise argparse.ArgumentTypeError(
                'expected a positive integer not {}'.format(value))
    return value


def _nonnegative_int(text: str) -> int:
    """Parses a nonnegative integer flag value."""

    try:
        value = int(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(
                'expected an integer not {!r}'.format(text)) from exc
    if value < 0:
        raise argparse.ArgumentTypeError(
                'expected a nonnegative integer not {}'.format(value))
    return value


def _common(parser: argparse.ArgumentParser, seeded: bool = True) -> None:
    """Adds the flags every subcommand accepts."""

    if seeded:
        parser.add_argument('--seed', type=_nonnegative_int, default=None,
                            help='experiment seed; drawn from entropy if '
                                 'omitted')
    parser.add_argument('--deterministic', action='store_true',
                        help='omit timestamps and wall-clock times')
    parser.add_argument('-v', '--verbose', action='count', default=0,
                        help='-v for info, -vv for debug logging')


def build_parser() -> argparse.ArgumentParser:
    """Returns the argument parser of the pipalter command."""

    parser = argparse.ArgumentParser(
            prog='pipalter',
            description='Round-and-alter approximation of packing integer '
                        'programs.')
    parser.add_argument('--version', action='version',
                        version='%(prog)s {}'.format(__version__))
    subparsers = parser.add_subparsers(dest='command', required=True)

    solve = subparsers.add_parser('solve', help='round and alter an instance')
    solve.add_argument('--input', required=True, type=Path)
    solve.add_argument('--regime', default='auto',
                       choices=('auto', 'weak', 'strong', 'largew',
                                'smallwidth'))
    solve.add_argument('--eps', type=float, default=None,
                       help='accuracy target enabling the large width regime')
    solve.add_argument('--trials', type=_positive_int, default=1000)
    solve.add_argument('--out', type=Path, default=None,
                       help='solution JSON path; stdout if omitted')
    solve.add_argument('--force-heuristic', action='store_true',
                       help='run without a guarantee on width one instances')
    solve.add_argument('--baseline', choices=('sorted', 'unsorted'),
                       default='sorted')
    solve.add_argument('--trials-csv', type=Path, default=None,
                       help='write per-trial statistics to this CSV')
    solve.add_argument('--dump-basis', type=Path, default=None,
                       help='write the final simplex basis to this file')
    _common(solve)

    gen = subparsers.add_parser('gen', help='generate instances')
    gen.add_argument('--kind', required=True,
                     choices=('random', 'knapsack', 'mis', 'suite'))
    gen.add_argument('--n', type=_positive_int, default=20)
    gen.add_argument('--m', type=_positive_int, default=5)
    gen.add_argument('--width', type=float, default=2.0)
    gen.add_argument('--density', type=float, default=0.5)
    gen.add_argument('--profile', choices=generators.PROFILES,
                     default='uniform')
    gen.add_argument('--graph', nargs=2, metavar=('KIND', 'N'), default=None,
                     help='graph for --kind mis: k|complete|path|random and '
                          'a vertex count')
    gen.add_argument('--p', type=float, default=0.5,
                     help='edge probability of random graphs')
    gen.add_argument('--edges', type=Path, default=None,
                     help='edge list file for --kind mis')
    gen.add_argument('--format', choices=('sparse', 'dense'),
                     default='sparse')
    gen.add_argument('--out', type=Path, default=None,
                     help='instance path, or directory for --kind suite')
    _common(gen)

    experiment = subparsers.add_parser('experiment', help='run a sweep')
    experiment.add_argument('--spec', required=True, type=Path)
    experiment.add_argument('--out', required=True, type=Path)
    experiment.add_argument('--threads', type=_positive_int, default=None,
                            help='worker processes (default: all cores)')
    _common(experiment)

    bounds = subparsers.add_parser('verify-bounds',
                                   help='verify inequalities on grids')
    bounds.add_argument('--step', type=float, default=1e-3)
    bounds.add_argument('--draws', type=_positive_int, default=500)
    bounds.add_argument('--samples', type=_positive_int, default=2000)
    _common(bounds)

    oracle = subparsers.add_parser('oracle', help='solve exactly')
    oracle.add_argument('--input', required=True, type=Path)
    oracle.add_argument('--limit', type=_positive_int, default=10 ** 7)
    oracle.add_argument('--exhaustive', action='store_true',
                        help='enumerate all 2^n vectors (n <= 20)')
    oracle.add_argument('--out', type=Path, default=None)
    _common(oracle, seeded=False)

    return parser


def _emit(doc: Dict, out: Optional[Path]) -> None:
    """Writes a JSON document to out or stdout."""

    if out is None:
        json.dump(doc, sys.stdout, indent=1)
        sys.stdout.write('\n')
    else:
        io.write_json(doc, out)


def _seed(args: argparse.Namespace) -> int:
    """Returns the seed flag or a fresh seed, printing the latter."""

    if args.seed is None:
        seed = streams.fresh_seed()
        print('seed: {}'.format(seed), file=sys.stderr)
        return seed
    return args.seed


def run_solve(args: argparse.Namespace) -> int:
    """Rounds and alters an instance file."""

    raw = io.read_instance(args.input)
    inst = normalize(raw)
    if args.regime == 'auto':
        cfg = select_regime(inst, args.eps, args.force_heuristic)
    else:
        cfg = config_for(inst, args.regime, args.eps)

    seed = _seed(args)
    simplex = BoundedSimplex(inst)
    lp = simplex.solve()
    if args.dump_basis:
        simplex.dump_basis(args.dump_basis)

    best, stats = round_and_alter(inst, cfg, args.trials, seed, lp=lp,
                                  ordered=args.baseline == 'sorted')
    if args.trials_csv:
        stats.to_csv(args.trials_csv)

    x = best.x_doubleprime.astype(int).tolist()
    if not io.check_solution(raw, x):
        logger.error('Altered solution failed the independent check')
        return EXIT_FAILURE

    doc = {'value': best.value, 'x': x, 'regime': str(cfg.regime),
           'alpha': cfg.alpha, 'eps': cfg.eps,
           'guarantee': None if np.isnan(cfg.guarantee) else cfg.guarantee,
           'lpOpt': lp.objective, 'trials': args.trials, 'seed': seed,
           'bestTrial': best.trial, 'meanValue': stats.mean,
           'baseline': args.baseline}
    _emit(doc, args.out)
    return EXIT_OK


def _generate_graph(args: argparse.Namespace, seed: int) -> graphs.Graph:
    """Builds the graph of gen --kind mis."""

    if args.edges is not None:
        return io.read_edge_list(args.edges)
    if args.graph is None:
        raise ValueError('--kind mis requires --graph KIND N or --edges FILE')

    kind, count = args.graph
    if kind not in GRAPH_KINDS or not count.isdigit():
        msg = '--graph expects one of {} and a vertex count not {} {}'
        raise ValueError(msg.format(sorted(GRAPH_KINDS), kind, count))
    kind, n = GRAPH_KINDS[kind], int(count)
    if kind == 'complete':
        return graphs.complete_graph(n)
    if kind == 'path':
        return graphs.path_graph(n)
    return graphs.random_graph(n, args.p, seed)


def run_gen(args: argparse.Namespace) -> int:
    """Generates instance files."""

    seed = _seed(args) if args.kind in ('random', 'knapsack', 'suite') or (
            args.graph and args.graph[0] == 'random') else 0

    if args.kind == 'suite':
        directory = args.out if args.out else Path('.')
        directory.mkdir(parents=True, exist_ok=True)
        for name, inst in generators.standard_suite(seed):
            io.write_instance(inst, directory.joinpath(name + '.json'),
                              args.format)
        return EXIT_OK

    if args.kind == 'random':
        inst = generators.random_instance(args.n, args.m, args.width,
                                          args.density, seed)
    elif args.kind == 'knapsack':
        inst = generators.knapsack_instance(args.n, args.width, args.profile,
                                            seed)
    else:
        inst = generators.mis_to_pip(_generate_graph(args, seed))

    _emit(io.instance_to_dict(inst, args.format), args.out)
    return EXIT_OK


def run_experiment(args: argparse.Namespace) -> int:
    """Runs a sweep spec."""

    spec = SweepSpec.read(args.spec)
    seed = _seed(args)
    workers = args.threads if args.threads else default_workers()
    sweep(spec, seed, args.out, workers, args.deterministic)
    return EXIT_OK


def run_verify_bounds(args: argparse.Namespace) -> int:
    """Prints the grid verification table."""

    seed = _seed(args)
    checks = verify_bounds(args.step, args.draws, args.samples, seed)
    print(TABLE_HEADER)
    for check in checks:
        print(check.row())
    return EXIT_OK if all(check.passed for check in checks) else EXIT_FAILURE


def run_oracle(args: argparse.Namespace) -> int:
    """Solves an instance exactly."""

    raw = io.read_instance(args.input)
    if args.exhaustive:
        result = exhaustive_opt(raw)
    else:
        result = brute_force_opt(raw, args.limit)

    doc = {'value': result.value, 'x': result.argmax.astype(int).tolist(),
           'nodesExplored': result.nodes_explored}
    _emit(doc, args.out)
    return EXIT_OK


COMMANDS = {'solve': run_solve, 'gen': run_gen, 'experiment': run_experiment,
            'verify-bounds': run_verify_bounds, 'oracle': run_oracle}


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Runs the pipalter command and returns its exit code."""

    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK

    levels: List[int] = [logging.WARNING, logging.INFO, logging.DEBUG]
    logging.basicConfig(level=levels[min(args.verbose, 2)],
                        format='%(levelname)s %(name)s: %(message)s')

    try:
        return COMMANDS[args.command](args)
    except WidthOneError as exc:
        print('error: {}'.format(exc), file=sys.stderr)
        return EXIT_WIDTH_ONE
    except (ValueError, OSError) as exc:
        print('error: {}'.format(exc), file=sys.stderr)
        return EXIT_USAGE
    except (PipalterError, RuntimeError, MemoryError) as exc:
        print('error: {}'.format(exc), file=sys.stderr)
        return EXIT_FAILURE


if __name__ == '__main__':
    sys.exit(main())
