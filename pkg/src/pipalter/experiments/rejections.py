"""Empirical rejection probabilities of round-and-alter.

The analysis of round-and-alter bounds, for every constraint i and item j,
the probability that row i rejects item j given that j was rounded to
one. This module estimates those conditional probabilities by simulation
and reports them next to the bound the regime's analysis promises.

Two measurement modes are supported:

- isolated: Every row is evaluated against the pristine rounded vector.
  The item of interest is treated as rounded and all other coordinates
  keep their drawn values; since coordinates are rounded independently
  this is a draw from the conditional law, so every trial is a
  conditioned sample for every pair.
- cascaded: The end-to-end alteration is run with rejections cascading
  across rows and only trials in which the item was actually rounded are
  counted.

Intervals are 99% Wilson score intervals. Per-item sums of estimates are
compared with the sum of per-pair bounds using the summed half widths as
slack.
"""

from dataclasses import dataclass
import logging
import math
from typing import Dict, Optional, Tuple

import numpy as np
import numpy.typing as npt
from scipy import stats

from pipalter.core import mixins, streams
from pipalter.core.batching import Batches
from pipalter.core.resources import batch_size
from pipalter.instances.bases import NormalizedInstance
from pipalter.rounding.alteration import (SMALL_WIDTH, SORTING, alter_batch,
                                          isolated_rejections, round_batch)
from pipalter.rounding.regimes import Regime, RegimeConfig
from pipalter.solvers.simplex import FractionalSolution, solve_lp

logger = logging.getLogger(__name__)

ISOLATED = 'isolated'
CASCADED = 'cascaded'
MODES = (ISOLATED, CASCADED)

CONFIDENCE = 0.99
MIN_CONDITIONED_SAMPLES = 100


def wilson_half_width(successes: npt.ArrayLike,
                      samples: npt.ArrayLike,
                      confidence: float = CONFIDENCE,
) -> npt.NDArray[np.float64]:
    """Returns the half widths of Wilson score intervals.

    Args:
        successes:
            Event counts.
        samples:
            Trial counts; zero counts give NaN.
        confidence:
            The two sided confidence level.

    Examples:
        >>> round(float(wilson_half_width(0, 100)), 5)
        0.03111
    """

    k = np.asarray(successes, dtype=float)
    n = np.asarray(samples, dtype=float)
    z = stats.norm.ppf(0.5 + confidence / 2)
    with np.errstate(divide='ignore', invalid='ignore'):
        p = k / n
        spread = np.sqrt(p * (1 - p) / n + z ** 2 / (4 * n ** 2))
        result = z / (1 + z ** 2 / n) * spread
    return np.where(n > 0, result, np.nan)


def pair_bounds(inst: NormalizedInstance,
                cfg: RegimeConfig,
                coefficients: npt.NDArray,
                ordered: bool = True,
) -> npt.NDArray[np.float64]:
    """Returns the analysed bound on each pair's rejection probability.

    The bound is A_ij / (2 delta1) for the weak, strong and small width
    regimes and e eps A_ij / delta1 in the large width regime. The
    heuristic regime and the unsorted baseline carry no bound (NaN).
    """

    if not ordered or cfg.regime is Regime.HEURISTIC:
        return np.full(coefficients.size, np.nan)
    if cfg.regime is Regime.LARGE_W:
        return math.e * cfg.eps * coefficients / inst.delta1
    return coefficients / (2 * inst.delta1)


@dataclass(frozen=True, repr=False, eq=False)
class RejectionReport(mixins.ViewContainer):
    """Per pair and per item rejection estimates with their bounds.

    Pairs are the nonzero entries of the normalized matrix in row-major
    order with ascending columns.

    Attributes:
        config:
            The RegimeConfig the trials ran with.
        mode:
            'isolated' or 'cascaded'.
        trials:
            The number of simulated trials.
        rows:
            The constraint index of each pair.
        cols:
            The item index of each pair.
        coefficients:
            The normalized coefficient A_ij of each pair.
        is_big:
            True for pairs whose coefficient exceeds eps/2 in the small
            width regime; all False otherwise.
        conditioned_samples:
            The number of trials conditioned on the item being rounded.
        rejections:
            The number of those trials in which the row rejected the item.
        estimates:
            rejections / conditioned_samples (NaN without samples).
        half_widths:
            The 99% Wilson half width of each estimate.
        bounds:
            The analysed bound of each pair (NaN if none applies).
        item_sums:
            Per item, the sum of its pair estimates.
        item_bounds:
            Per item, the sum of its pair bounds.
        item_slack:
            Per item, the sum of its pair half widths.
    """

    config: RegimeConfig
    mode: str
    trials: int
    rows: npt.NDArray[np.int64]
    cols: npt.NDArray[np.int64]
    coefficients: npt.NDArray[np.float64]
    is_big: npt.NDArray[np.bool_]
    conditioned_samples: npt.NDArray[np.int64]
    rejections: npt.NDArray[np.int64]
    estimates: npt.NDArray[np.float64]
    half_widths: npt.NDArray[np.float64]
    bounds: npt.NDArray[np.float64]
    item_sums: npt.NDArray[np.float64]
    item_bounds: npt.NDArray[np.float64]
    item_slack: npt.NDArray[np.float64]

    def per_pair(self) -> Dict[Tuple[int, int], Dict[str, float]]:
        """Returns a mapping from (i, j) to that pair's statistics."""

        result = {}
        for k, (i, j) in enumerate(zip(self.rows, self.cols)):
            result[(int(i), int(j))] = {
                    'conditioned_samples': int(self.conditioned_samples[k]),
                    'rejections': int(self.rejections[k]),
                    'estimate': float(self.estimates[k]),
                    'wilson_half_width': float(self.half_widths[k]),
                    'bound': float(self.bounds[k]),
                    'is_big': bool(self.is_big[k])}
        return result

    def per_item(self) -> Dict[int, Dict[str, float]]:
        """Returns a mapping from item j to its summed estimate and bound."""

        return {j: {'sum_estimate': float(self.item_sums[j]),
                    'sum_bound': float(self.item_bounds[j]),
                    'slack': float(self.item_slack[j])}
                for j in range(self.item_sums.size)}

    @property
    def max_item_sum(self) -> float:
        """Returns the largest per item sum of rejection estimates."""

        return float(self.item_sums.max()) if self.item_sums.size else 0.0

    def violations(self,
                   k: float = 4.0,
                   min_samples: int = MIN_CONDITIONED_SAMPLES,
    ) -> npt.NDArray[np.int64]:
        """Returns the pair positions whose estimate exceeds the bound by
        more than k half widths.

        Pairs with fewer than min_samples conditioned samples or without
        a bound are never reported.
        """

        eligible = ((self.conditioned_samples >= min_samples) &
                    np.isfinite(self.bounds))
        with np.errstate(invalid='ignore'):
            exceeded = self.estimates > self.bounds + k * self.half_widths
        return np.flatnonzero(eligible & exceeded)

    def item_violations(self, k: float = 3.0) -> npt.NDArray[np.int64]:
        """Returns the items whose summed estimate exceeds the summed bound
        by more than k summed half widths."""

        with np.errstate(invalid='ignore'):
            exceeded = self.item_sums > self.item_bounds + k * self.item_slack
        return np.flatnonzero(exceeded)


def estimate_rejections(inst: NormalizedInstance,
                        cfg: RegimeConfig,
                        trials: int,
                        mode: str = ISOLATED,
                        seed: int = 0,
                        ordered: bool = True,
                        lp: Optional[FractionalSolution] = None,
                        chunksize: int = 4096,
) -> RejectionReport:
    """Estimates Pr[row i rejects item j | item j rounded] for all pairs.

    Trials use the same streams as round_and_alter with the same seed, so
    trial t of an estimate and of a solve see the same rounded vector.

    Args:
        inst:
            A NormalizedInstance.
        cfg:
            The RegimeConfig whose alpha and alteration scheme are used.
        trials:
            The number of simulated trials.
        mode:
            'isolated' or 'cascaded'.
        seed:
            The experiment seed.
        ordered:
            If False, estimate the unsorted baseline alteration.
        lp:
            An LP solution of inst. If None, the relaxation is solved.
        chunksize:
            The preferred number of trials per batch.

    Returns:
        A RejectionReport.
    """

    if mode not in MODES:
        msg = 'mode must be one of {} not {}'
        raise ValueError(msg.format(MODES, mode))
    if trials < 1:
        msg = 'trials must be a positive integer not {}'
        raise ValueError(msg.format(trials))

    lp = solve_lp(inst) if lp is None else lp
    scheme = SMALL_WIDTH if cfg.alteration == SMALL_WIDTH else SORTING
    A = inst.A
    rows = np.repeat(np.arange(inst.m), np.diff(A.indptr))
    cols = A.indices.astype(np.int64)
    coefficients = A.data.copy()

    if mode == ISOLATED:
        expected = trials
    else:
        probs = cfg.alpha * lp.x[cols]
        positive = probs[probs > 0]
        expected = trials * positive.min() if positive.size else 0
    if expected < MIN_CONDITIONED_SAMPLES:
        logger.warning('Only %.1f expected conditioned samples for some '
                       'pairs; estimates below %d samples are unreliable',
                       expected, MIN_CONDITIONED_SAMPLES)

    conditioned = np.zeros(cols.size, dtype=np.int64)
    rejected = np.zeros(cols.size, dtype=np.int64)
    zero_cols = inst.zero_columns()
    for start, stop in Batches(trials, batch_size(inst.n, chunksize)):
        uniforms = streams.batch_uniforms(seed, start, stop, inst.n)
        x_prime = round_batch(lp.x, cfg.alpha, uniforms)
        x_prime[:, zero_cols] = True

        if mode == ISOLATED:
            per_row = isolated_rejections(inst, x_prime, scheme, cfg.eps,
                                          ordered)
            conditioned += stop - start
        else:
            per_row = alter_batch(inst, x_prime, scheme, cfg.eps,
                                  ordered).rejected
            conditioned += x_prime[:, cols].sum(axis=0)

        rejected += np.concatenate([arr.sum(axis=0) for arr in per_row])

    with np.errstate(divide='ignore', invalid='ignore'):
        estimates = np.where(conditioned > 0, rejected / conditioned, np.nan)
    half_widths = wilson_half_width(rejected, conditioned)
    bounds = pair_bounds(inst, cfg, coefficients, ordered)

    if scheme == SMALL_WIDTH:
        is_big = coefficients > cfg.eps / 2
    else:
        is_big = np.zeros(cols.size, dtype=bool)

    item_sums = np.bincount(cols, np.nan_to_num(estimates), inst.n)
    item_bounds = np.bincount(cols, bounds, inst.n)
    item_slack = np.bincount(cols, np.nan_to_num(half_widths), inst.n)

    report = RejectionReport(cfg, mode, trials, rows, cols, coefficients,
                             is_big, conditioned, rejected, estimates,
                             half_widths, bounds, item_sums, item_bounds,
                             item_slack)
    logger.info('Estimated %s rejections over %d trials; max item sum %.4g',
                mode, trials, report.max_item_sum)
    return report
