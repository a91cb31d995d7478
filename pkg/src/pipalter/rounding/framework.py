"""The round-and-alter loop and its per-trial statistics.

round_and_alter solves (or accepts) the LP relaxation of a normalized
instance, then repeats independent rounding and the regime's alteration
for a number of trials. Trials draw from their own counter-based streams
(see pipalter.core.streams) and are processed in memory-bounded batches,
so results do not depend on the batch size.

Items whose column is empty consume no capacity; they are set to one in
both the rounded and the altered vectors of every trial.

Examples:
    >>> from pipalter.instances.bases import PipInstance
    >>> from pipalter.instances.normalization import normalize
    >>> from pipalter.rounding.regimes import select_regime
    >>> inst = normalize(PipInstance.from_dense([[1, 1, 1]], [3], [1, 2, 3]))
    >>> best, stats = round_and_alter(inst, select_regime(inst), 50, seed=0)
    >>> len(stats), bool(stats.feasible.all())
    (50, True)
"""

import csv
from dataclasses import dataclass, replace
import logging
from pathlib import Path
from typing import Iterator, Optional, Tuple, Union

import numpy as np
import numpy.typing as npt

from pipalter.core import mixins, streams
from pipalter.core.batching import Batches
from pipalter.core.errors import RegimeMismatchError
from pipalter.core.resources import batch_size
from pipalter.instances.bases import NormalizedInstance
from pipalter.rounding.alteration import (CAPACITY_TOL, SMALL_WIDTH, SORTING,
                                          RoundingOutcome, alter_batch,
                                          alter_by_sorting, alter_small_width,
                                          round_batch)
from pipalter.rounding.regimes import RegimeConfig
from pipalter.solvers.simplex import FractionalSolution, solve_lp

logger = logging.getLogger(__name__)

TRIAL_COLUMNS = ('trial', 'seed', 'value', 'numRounded', 'numRejected',
                 'feasible')


@dataclass(frozen=True, repr=False, eq=False)
class TrialStatistics(mixins.ViewContainer):
    """Per-trial records of a round-and-alter run.

    Attributes:
        seed:
            The experiment seed every trial stream derives from.
        values:
            The objective c.x'' of each trial.
        num_rounded:
            The number of items rounded to one in each trial.
        num_rejected:
            The number of rounded items discarded in each trial.
        feasible:
            Whether Ax'' <= W + 1e-9 held in each trial.
        lp_objective:
            The optimum of the LP relaxation that was rounded.
    """

    seed: int
    values: npt.NDArray[np.float64]
    num_rounded: npt.NDArray[np.int64]
    num_rejected: npt.NDArray[np.int64]
    feasible: npt.NDArray[np.bool_]
    lp_objective: float

    def __len__(self) -> int:
        return self.values.size

    @property
    def mean(self) -> float:
        """Returns the mean objective over trials."""

        return float(self.values.mean())

    @property
    def stderr(self) -> float:
        """Returns the standard error of the mean objective."""

        if len(self) < 2:
            return 0.0
        return float(self.values.std(ddof=1) / np.sqrt(len(self)))

    @property
    def best_trial(self) -> int:
        """Returns the first trial attaining the maximum objective."""

        return int(np.argmax(self.values))

    def rows(self) -> Iterator[Tuple]:
        """Yields one (trial, seed, value, numRounded, numRejected,
        feasible) tuple per trial."""

        for t in range(len(self)):
            yield (t, self.seed, repr(float(self.values[t])),
                   int(self.num_rounded[t]), int(self.num_rejected[t]),
                   int(self.feasible[t]))

    def to_csv(self, path: Union[str, Path]) -> None:
        """Writes the per-trial records to a CSV file with a header."""

        with open(path, 'w', newline='', encoding='utf-8') as outfile:
            writer = csv.writer(outfile, lineterminator='\n')
            writer.writerow(TRIAL_COLUMNS)
            writer.writerows(self.rows())


def _alter_one(inst: NormalizedInstance,
               cfg: RegimeConfig,
               x_prime: npt.NDArray[np.bool_],
               ordered: bool,
) -> RoundingOutcome:
    """Alters a single rounded vector with the scheme of cfg."""

    if cfg.alteration == SMALL_WIDTH:
        return alter_small_width(inst, cfg.eps, x_prime, ordered)
    return alter_by_sorting(inst, x_prime, ordered)


def round_and_alter(inst: NormalizedInstance,
                    cfg: RegimeConfig,
                    trials: int,
                    seed: int,
                    lp: Optional[FractionalSolution] = None,
                    ordered: bool = True,
                    chunksize: int = 4096,
) -> Tuple[RoundingOutcome, TrialStatistics]:
    """Runs independent round-and-alter trials and keeps the best.

    Args:
        inst:
            A NormalizedInstance.
        cfg:
            A RegimeConfig built for inst.
        trials:
            The number of trials, at least 1.
        seed:
            The experiment seed. Trial t uses the stream keyed by
            (seed, t).
        lp:
            An LP solution of inst. If None, the relaxation is solved.
        ordered:
            If False, use the unsorted baseline alteration.
        chunksize:
            The preferred number of trials per batch. Batches shrink if
            memory is short; results never depend on this value.

    Returns:
        The RoundingOutcome of the first trial with maximum objective and
        the TrialStatistics of all trials.

    Raises:
        ValueError: if trials < 1.
        RegimeMismatchError: if cfg was built for another width.
    """

    if trials < 1:
        msg = 'trials must be a positive integer not {}'
        raise ValueError(msg.format(trials))
    if abs(cfg.W - inst.W) > CAPACITY_TOL:
        msg = 'Configuration built for W={} used on an instance with W={}'
        raise RegimeMismatchError(msg.format(cfg.W, inst.W))

    lp = solve_lp(inst) if lp is None else lp
    scheme = SMALL_WIDTH if cfg.alteration == SMALL_WIDTH else SORTING
    zero_cols = inst.zero_columns()

    n = inst.n
    values = np.empty(trials)
    rounded_counts = np.empty(trials, dtype=np.int64)
    rejected_counts = np.empty(trials, dtype=np.int64)
    feasible = np.empty(trials, dtype=bool)

    chunk = batch_size(n, chunksize)
    logger.info('Running %d trials in batches of %d; %s', trials, chunk,
                cfg.header())
    for start, stop in Batches(trials, chunk):
        uniforms = streams.batch_uniforms(seed, start, stop, n)
        x_prime = round_batch(lp.x, cfg.alpha, uniforms)
        x_prime[:, zero_cols] = True
        altered = alter_batch(inst, x_prime, scheme, cfg.eps, ordered)

        x_dp = altered.x_doubleprime
        loads = inst.A @ x_dp.T.astype(float)
        values[start:stop] = x_dp @ inst.c
        rounded_counts[start:stop] = x_prime.sum(axis=1)
        rejected_counts[start:stop] = altered.rejected_counts()
        feasible[start:stop] = np.all(loads <= inst.W + CAPACITY_TOL, axis=0)
        logger.debug('Finished trials [%d, %d)', start, stop)

    stats = TrialStatistics(seed, values, rounded_counts, rejected_counts,
                            feasible, lp.objective)
    if not feasible.all():
        # alteration guarantees feasibility; reaching here is a bug
        logger.error('%d infeasible trials', int((~feasible).sum()))

    best = stats.best_trial
    rng = streams.trial_stream(seed, best)
    x_best = round_batch(lp.x, cfg.alpha, rng.random((1, n)))[0]
    x_best[zero_cols] = True
    outcome = replace(_alter_one(inst, cfg, x_best, ordered), seed=seed,
                      trial=best)
    logger.info('Best trial %d with value %.10g; mean %.10g (se %.3g)',
                best, outcome.value, stats.mean, stats.stderr)
    return outcome, stats
