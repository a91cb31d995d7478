"""Regime sweeps over instance collections with CSV reports.

A sweep is described by a JSON document:

    {"trials": [1000, 10000],
     "regimes": ["auto", "weak", "strong"],
     "instances": [{"kind": "random", "n": 30, "m": 10, "width": 2,
                    "density": 0.5, "seed": 1},
                   {"kind": "knapsack", "n": 20, "width": 1.5,
                    "profile": "mixedBigSmall", "seed": 2},
                   {"kind": "mis", "graph": "complete", "vertices": 6},
                   {"kind": "file", "path": "inst.json"},
                   {"kind": "suite", "seed": 0}],
     "eps": 0.25, "mode": "isolated", "baseline": "sorted",
     "oracle_max_n": 30}

Only "instances" is required. The cells of a sweep are the product
instances x regimes x trials in that nesting order. Each cell runs
round-and-alter and the rejection estimator on one instance and yields
one CSV row; cells run in a process pool and rows are written in cell
order as soon as every earlier cell has finished, so a failing cell
never loses the rows before it. Errors are recorded in the row's error
column.
"""

from concurrent.futures import ProcessPoolExecutor
import csv
from dataclasses import dataclass, field
import datetime
import functools
import json
import logging
from pathlib import Path
import time
from typing import Dict, Iterator, List, Optional, Sequence, Tuple, Union

from pipalter.core import mixins
from pipalter.core.errors import NodeLimitError
from pipalter.experiments.rejections import MODES, estimate_rejections
from pipalter.instances import generators, graphs, io
from pipalter.instances.bases import PipInstance
from pipalter.instances.normalization import normalize
from pipalter.rounding.framework import round_and_alter
from pipalter.rounding.regimes import config_for, select_regime
from pipalter.solvers.oracle import MAX_SEARCH_ITEMS, brute_force_opt
from pipalter.solvers.simplex import solve_lp

logger = logging.getLogger(__name__)

COLUMNS = ('cell', 'instance', 'regime', 'trials', 'n', 'm', 'W', 'delta0',
           'delta1', 'alpha', 'guarantee', 'lpOpt', 'ipOpt', 'meanValue',
           'stderr', 'ratioVsIp', 'ratioVsLp', 'maxItemRejectionSum',
           'wallClock', 'error')

KINDS = ('random', 'knapsack', 'mis', 'file', 'suite')
REGIMES = ('auto', 'weak', 'strong', 'largew', 'smallwidth', 'heuristic')
BASELINES = ('sorted', 'unsorted')


@dataclass(frozen=True)
class SweepCell:
    """One instance x regime x trials combination of a sweep."""

    index: int
    name: str
    instance: Dict
    regime: str
    trials: int


@dataclass(frozen=True, repr=False)
class SweepSpec(mixins.ViewContainer):
    """A validated sweep description.

    Attributes:
        instances:
            Instance descriptions; see the module docstring.
        regimes:
            Regime names or 'auto'.
        trials:
            Trial counts.
        eps:
            The accuracy hint for 'auto' and the eps of 'largew'.
        mode:
            The rejection estimation mode.
        baseline:
            'sorted' or 'unsorted' alteration.
        oracle_max_n:
            Instances with at most this many items are solved exactly.
        base_dir:
            Directory that relative instance file paths resolve against.
    """

    instances: Tuple[Dict, ...]
    regimes: Tuple[str, ...] = ('auto',)
    trials: Tuple[int, ...] = (1000,)
    eps: Optional[float] = None
    mode: str = 'isolated'
    baseline: str = 'sorted'
    oracle_max_n: int = 20
    base_dir: Path = field(default_factory=Path)

    def __post_init__(self):
        """Validates the description."""

        for inst in self.instances:
            if inst.get('kind') not in KINDS:
                msg = 'Instance kind must be one of {} not {}'
                raise ValueError(msg.format(KINDS, inst.get('kind')))
        for regime in self.regimes:
            if regime not in REGIMES:
                msg = 'Regime must be one of {} not {}'
                raise ValueError(msg.format(REGIMES, regime))
        if any(int(t) < 1 for t in self.trials):
            msg = 'Trial counts must be positive not {}'
            raise ValueError(msg.format(self.trials))
        if self.mode not in MODES:
            msg = 'mode must be one of {} not {}'
            raise ValueError(msg.format(MODES, self.mode))
        if self.baseline not in BASELINES:
            msg = 'baseline must be one of {} not {}'
            raise ValueError(msg.format(BASELINES, self.baseline))
        if self.oracle_max_n > MAX_SEARCH_ITEMS:
            msg = 'oracle_max_n may be at most {} not {}'
            raise ValueError(msg.format(MAX_SEARCH_ITEMS, self.oracle_max_n))

    @classmethod
    def from_dict(cls, doc: Dict, base_dir: Union[str, Path] = '.'
    ) -> 'SweepSpec':
        """Builds a SweepSpec from a parsed JSON document."""

        if not isinstance(doc, dict) or 'instances' not in doc:
            raise ValueError("A sweep spec requires an 'instances' list")

        for key in ('instances', 'regimes', 'trials'):
            if key in doc and not isinstance(doc[key], list):
                msg = "Sweep spec key '{}' must be a list not {}"
                raise ValueError(msg.format(key, type(doc[key]).__name__))
        if not all(isinstance(inst, dict) for inst in doc['instances']):
            raise ValueError('Every sweep spec instance must be an object')
        if not all(isinstance(t, int) for t in doc.get('trials', [])):
            msg = 'Trial counts must be integers not {}'
            raise ValueError(msg.format(doc['trials']))

        known = {'instances', 'regimes', 'trials', 'eps', 'mode', 'baseline',
                 'oracle_max_n'}
        unknown = set(doc) - known
        if unknown:
            msg = 'Unknown sweep spec keys {}'
            raise ValueError(msg.format(sorted(unknown)))

        kwargs = {key: tuple(doc[key]) for key in
                  ('instances', 'regimes', 'trials') if key in doc}
        kwargs.update({key: doc[key] for key in
                       ('eps', 'mode', 'baseline', 'oracle_max_n')
                       if key in doc})
        return cls(base_dir=Path(base_dir), **kwargs)

    @classmethod
    def read(cls, path: Union[str, Path]) -> 'SweepSpec':
        """Reads a SweepSpec from a JSON file."""

        with open(path, 'r', encoding='utf-8') as infile:
            doc = json.load(infile)
        return cls.from_dict(doc, Path(path).parent)

    def _expand(self) -> Iterator[Tuple[str, Dict]]:
        """Yields (name, description) of every instance, expanding suites."""

        for k, inst in enumerate(self.instances):
            if inst['kind'] == 'suite':
                seed = int(inst.get('seed', 0))
                for name, _ in generators.standard_suite(seed):
                    yield name, {'kind': 'suite', 'seed': seed,
                                 'member': name}
            else:
                yield inst.get('name', '{}-{}'.format(inst['kind'], k)), inst

    def cells(self) -> List[SweepCell]:
        """Returns the cells of this sweep in report order."""

        result = []
        for name, inst in self._expand():
            for regime in self.regimes:
                for trials in self.trials:
                    result.append(SweepCell(len(result), name, inst, regime,
                                            int(trials)))
        return result


@functools.lru_cache(maxsize=4)
def _suite(seed: int) -> Dict[str, PipInstance]:
    """Returns the standard suite of seed keyed by member name."""

    return dict(generators.standard_suite(seed))


def build_instance(desc: Dict, base_dir: Path = Path('.')) -> PipInstance:
    """Builds the PipInstance an instance description names."""

    kind = desc['kind']
    if kind == 'random':
        return generators.random_instance(desc['n'], desc['m'],
                                          desc['width'],
                                          desc.get('density', 0.5),
                                          desc.get('seed', 0))
    if kind == 'knapsack':
        return generators.knapsack_instance(desc['n'], desc['width'],
                                            desc.get('profile', 'uniform'),
                                            desc.get('seed', 0))
    if kind == 'mis':
        graph_kind = desc.get('graph', 'random')
        vertices = desc['vertices']
        if graph_kind == 'complete':
            graph = graphs.complete_graph(vertices)
        elif graph_kind == 'path':
            graph = graphs.path_graph(vertices)
        else:
            graph = graphs.random_graph(vertices, desc.get('p', 0.5),
                                        desc.get('seed', 0))
        return generators.mis_to_pip(graph)
    if kind == 'file':
        return io.read_instance(base_dir.joinpath(desc['path']))
    if kind == 'suite':
        return _suite(desc['seed'])[desc['member']]

    msg = 'Unknown instance kind {}'
    raise ValueError(msg.format(kind))


def _fmt(value) -> str:
    """Formats a cell value reproducibly."""

    if value is None:
        return ''
    if isinstance(value, float):
        return repr(value)
    return str(value)


def run_cell(cell: SweepCell, spec: SweepSpec, seed: int,
             deterministic: bool = False) -> Dict[str, str]:
    """Runs one sweep cell and returns its CSV row.

    Exceptions raised while running the cell are caught and recorded in
    the error column with whatever columns were already known.
    """

    row: Dict = {'cell': cell.index, 'instance': cell.name,
                 'regime': cell.regime, 'trials': cell.trials}
    start = time.perf_counter()
    try:
        inst = normalize(build_instance(cell.instance, spec.base_dir))
        row.update(n=inst.n, m=inst.m, W=float(inst.W), delta0=inst.delta0,
                   delta1=float(inst.delta1))

        if cell.regime == 'auto':
            cfg = select_regime(inst, spec.eps)
        else:
            eps = spec.eps if cell.regime == 'largew' else None
            cfg = config_for(inst, cell.regime, eps)
        row.update(regime=str(cfg.regime), alpha=cfg.alpha,
                   guarantee=cfg.guarantee)

        lp = solve_lp(inst)
        row['lpOpt'] = lp.objective
        ip_opt = None
        if inst.n <= spec.oracle_max_n:
            try:
                ip_opt = brute_force_opt(inst.base).value
            except NodeLimitError:
                logger.warning('Cell %d: exact search hit its node limit',
                               cell.index)
        row['ipOpt'] = ip_opt

        ordered = spec.baseline == 'sorted'
        _, stats = round_and_alter(inst, cfg, cell.trials, seed, lp=lp,
                                   ordered=ordered)
        row.update(meanValue=stats.mean, stderr=stats.stderr)
        if ip_opt is not None:
            row['ratioVsIp'] = stats.mean / ip_opt if ip_opt > 0 else 1.0
        row['ratioVsLp'] = (stats.mean / lp.objective if lp.objective > 0
                            else 1.0)

        report = estimate_rejections(inst, cfg, cell.trials, spec.mode, seed,
                                     ordered, lp=lp)
        row['maxItemRejectionSum'] = report.max_item_sum

    except Exception as exc:  # pylint: disable=broad-except
        logger.warning('Cell %d failed: %s', cell.index, exc)
        row['error'] = '{}: {}'.format(type(exc).__name__, exc)

    elapsed = time.perf_counter() - start
    row['wallClock'] = 0.0 if deterministic else elapsed
    return {col: _fmt(row.get(col)) for col in COLUMNS}


def header_line(seed: int) -> str:
    """Returns the timestamped comment line opening a report."""

    stamp = datetime.datetime.now().isoformat(timespec='seconds')
    return '# pipalter sweep seed={} generated {}'.format(seed, stamp)


def sweep(spec: SweepSpec,
          seed: int = 0,
          out: Optional[Union[str, Path]] = None,
          workers: int = 1,
          deterministic: bool = False,
) -> List[Dict[str, str]]:
    """Runs every cell of a sweep.

    Args:
        spec:
            A SweepSpec.
        seed:
            The experiment seed shared by every cell.
        out:
            If given, the CSV report path. The header is written before
            any cell runs and each row is flushed in cell order.
        workers:
            The number of worker processes; 1 runs cells in this process.
        deterministic:
            If True, omit the timestamp line and write wall-clock times as
            0 so equal specs and seeds produce identical bytes.

    Returns:
        The report rows in cell order.
    """

    cells = spec.cells()
    logger.info('Sweeping %d cells with %d workers', len(cells), workers)
    runner = functools.partial(run_cell, spec=spec, seed=seed,
                               deterministic=deterministic)

    outfile = open(out, 'w', newline='', encoding='utf-8') if out else None
    try:
        writer = None
        if outfile:
            if not deterministic:
                outfile.write(header_line(seed) + '\n')
            writer = csv.DictWriter(outfile, COLUMNS, lineterminator='\n')
            writer.writeheader()
            outfile.flush()

        rows = []
        for row in _map(runner, cells, workers):
            rows.append(row)
            logger.info('Finished cell %s (%s)', row['cell'], row['instance'])
            if writer:
                writer.writerow(row)
                outfile.flush()
        return rows

    finally:
        if outfile:
            outfile.close()


def _map(func, cells: Sequence[SweepCell], workers: int
) -> Iterator[Dict[str, str]]:
    """Maps func over cells preserving order, in a pool if workers > 1."""

    if workers <= 1 or len(cells) <= 1:
        yield from map(func, cells)
        return

    with ProcessPoolExecutor(max_workers=workers) as executor:
        yield from executor.map(func, cells)
