"""Chernoff tail bounds for sums of bounded independent variables.

The rejection analysis of round-and-alter bounds the load a row receives
from rounded items with a Chernoff bound in a form tailored to packing:
if X_1, ..., X_k are independent, each in [0, beta], with
E[sum X_i] <= alpha W and (1 - alpha) W >= beta then

    Pr[sum X_i > W - beta] <= (alpha e^(1 - alpha) W / (W - beta))^((W - beta) / beta).

This module contains the following:

- ChernoffParams: A validated (alpha, W, beta, mu) tuple.
- chernoff_tail: The packing form above, evaluated in log space.
- monte_carlo_tail: A sampled estimate of the same tail for concrete
  coefficients and probabilities, with its standard error.

The classical multiplicative bound is kept as a private helper for
cross-checking the packing form.

Examples:
    >>> round(chernoff_tail(ChernoffParams(0.1, 2, 1)), 4)
    0.4919
"""

from dataclasses import dataclass
import math
from typing import Optional

import numpy as np
import numpy.typing as npt

from pipalter.core import mixins
from pipalter.core.batching import Batches
from pipalter.core.errors import PreconditionViolatedError
from pipalter.core.resources import batch_size


@dataclass(frozen=True)
class ChernoffParams:
    """The inputs of the packing form Chernoff bound.

    Attributes:
        alpha:
            The scaling factor in (0, 1).
        W:
            The capacity, at least 1.
        beta:
            The largest value a summand may take, in (0, 1].
        mu:
            An upper bound on the mean of the sum, at most alpha W. If
            None, alpha W.
    """

    alpha: float
    W: float
    beta: float
    mu: Optional[float] = None

    def __post_init__(self):
        """Validates the parameters."""

        if not 0 < self.alpha < 1:
            msg = 'alpha must lie in (0, 1) not {}'
            raise PreconditionViolatedError(msg.format(self.alpha))
        if self.W < 1:
            msg = 'W must be at least 1 not {}'
            raise PreconditionViolatedError(msg.format(self.W))
        if not 0 < self.beta <= 1:
            msg = 'beta must lie in (0, 1] not {}'
            raise PreconditionViolatedError(msg.format(self.beta))
        if (1 - self.alpha) * self.W < self.beta:
            msg = 'Requires (1 - alpha) W >= beta but (1 - {}) * {} < {}'
            raise PreconditionViolatedError(msg.format(self.alpha, self.W,
                                                       self.beta))
        if self.mu is None:
            object.__setattr__(self, 'mu', self.alpha * self.W)
        elif not 0 <= self.mu <= self.alpha * self.W:
            msg = 'mu must lie in [0, alpha W] = [0, {}] not {}'
            raise PreconditionViolatedError(msg.format(self.alpha * self.W,
                                                       self.mu))

    @property
    def threshold(self) -> float:
        """Returns the load W - beta the tail is measured beyond."""

        return self.W - self.beta


def _log_tail(p: ChernoffParams) -> float:
    """Returns the natural log of the packing form bound."""

    gap = p.W - p.beta
    base = math.log(p.alpha) + 1 - p.alpha + math.log(p.W) - math.log(gap)
    return gap / p.beta * base


def chernoff_tail(p: ChernoffParams) -> float:
    """Returns the packing form bound on Pr[sum X_i > W - beta].

    The value may exceed one, in which case the bound is vacuous.

    Args:
        p:
            A ChernoffParams instance.

    Returns:
        (alpha e^(1 - alpha) W / (W - beta))^((W - beta) / beta).

    Examples:
        >>> round(chernoff_tail(ChernoffParams(0.5, 2, 1)), 4)
        1.6487
    """

    with np.errstate(over='ignore'):
        return float(np.exp(_log_tail(p)))


def _standard_tail(mu: float, delta: float, beta: float) -> float:
    """Returns the bound (e^d / (1 + d)^(1 + d))^(mu / beta) on
    Pr[X >= (1 + d) mu] for a sum X of independent variables in [0, beta]
    with mean at most mu."""

    if delta <= 0:
        msg = 'delta must be positive not {}'
        raise ValueError(msg.format(delta))

    exponent = mu / beta * (delta - (1 + delta) * math.log1p(delta))
    return math.exp(exponent)


@dataclass(frozen=True, repr=False)
class TailEstimate(mixins.ViewContainer):
    """A Monte-Carlo estimate of a tail probability.

    Attributes:
        estimate:
            The fraction of samples whose sum exceeded the threshold.
        stderr:
            The binomial standard error of estimate.
        samples:
            The number of samples drawn.
    """

    estimate: float
    stderr: float
    samples: int


def monte_carlo_tail(coeffs: npt.ArrayLike,
                     probs: npt.ArrayLike,
                     threshold: float,
                     samples: int,
                     rng: np.random.Generator,
                     chunksize: int = 10000,
) -> TailEstimate:
    """Estimates Pr[sum_l coeffs_l B_l > threshold] for independent
    Bernoulli(probs_l) variables B_l.

    Args:
        coeffs:
            Nonnegative summand values.
        probs:
            Success probabilities in [0, 1], one per coefficient.
        threshold:
            The level the weighted sum must strictly exceed.
        samples:
            The number of sampled sums.
        rng:
            A caller-owned numpy Generator.
        chunksize:
            The preferred number of samples drawn at once.

    Returns:
        A TailEstimate.
    """

    values = np.asarray(coeffs, dtype=float)
    p = np.asarray(probs, dtype=float)
    if values.shape != p.shape or values.ndim != 1:
        msg = 'coeffs and probs must be 1-D of equal length not {} and {}'
        raise ValueError(msg.format(values.shape, p.shape))
    if samples < 1:
        msg = 'samples must be a positive integer not {}'
        raise ValueError(msg.format(samples))

    exceeded = 0
    for start, stop in Batches(samples, batch_size(values.size, chunksize)):
        draws = rng.random((stop - start, values.size)) < p
        exceeded += int(np.count_nonzero(draws @ values > threshold))

    estimate = exceeded / samples
    stderr = math.sqrt(estimate * (1 - estimate) / samples)
    return TailEstimate(estimate, stderr, samples)
