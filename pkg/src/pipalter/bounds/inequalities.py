"""Elementary inequalities behind the regime constants and their grid checks.

The constants c1, c2 and c3 of the round-and-alter regimes come from three
inequalities on the unit interval:

- x-power: (1/e^(1/e))^(1/x) <= x for x in (0, 1].
- ratio: x/y >= (1/e^(2/e))^(y/(2x)) for x in (0, 1] and y >= 2.
- eps-power: eps x/2 >= (eps/e^(2/e))^(1/x) for eps and x in (0, 1].

The first two are equivalent to z ln z >= -1/e, with z = x and z = x/y,
whose minimum is attained at z = 1/e; they are evaluated in that form so
the equality cases compare within a tolerance of 1e-12. The third is
evaluated in log form. All checks accept scalars or numpy arrays.

verify_bounds runs every inequality over a dense grid and compares the
packing form Chernoff bound against Monte-Carlo tails on random
parameters.

Examples:
    >>> bool(x_power_holds(1.0))
    True
    >>> ratio_power_holds(np.array([1.0, 0.5]), 2.0).tolist()
    [True, True]
"""

from dataclasses import dataclass
import logging
import math
from typing import List, Union

import numpy as np
import numpy.typing as npt

from pipalter.bounds.chernoff import (ChernoffParams, chernoff_tail,
                                      monte_carlo_tail)
from pipalter.core import streams
from pipalter.core.errors import DomainError

logger = logging.getLogger(__name__)

INEQUALITY_TOL = 1e-12

Boolish = Union[bool, npt.NDArray[np.bool_]]


def _unit_interval(name: str, arr: npt.NDArray) -> None:
    """Raises DomainError unless every entry of arr lies in (0, 1]."""

    if np.any(~((arr > 0) & (arr <= 1))):
        msg = '{} must lie in (0, 1]'
        raise DomainError(msg.format(name))


def _result(arr: npt.NDArray[np.bool_]) -> Boolish:
    return bool(arr) if arr.ndim == 0 else arr


def _zlogz_holds(z: npt.NDArray) -> npt.NDArray[np.bool_]:
    """Returns z ln z >= -1/e up to INEQUALITY_TOL."""

    return z * np.log(z) >= -1 / math.e - INEQUALITY_TOL


def x_power_holds(x: npt.ArrayLike) -> Boolish:
    """Evaluates (1/e^(1/e))^(1/x) <= x.

    Raises:
        DomainError: if any x lies outside (0, 1].
    """

    arr = np.asarray(x, dtype=float)
    _unit_interval('x', arr)
    return _result(_zlogz_holds(arr))


def ratio_power_holds(x: npt.ArrayLike, y: npt.ArrayLike) -> Boolish:
    """Evaluates x/y >= (1/e^(2/e))^(y/(2x)).

    Raises:
        DomainError: if any x lies outside (0, 1] or any y is below 2.
    """

    xs = np.asarray(x, dtype=float)
    ys = np.asarray(y, dtype=float)
    _unit_interval('x', xs)
    if np.any(~(ys >= 2)):
        raise DomainError('y must be at least 2')

    return _result(_zlogz_holds(xs / ys))


def eps_power_holds(eps: npt.ArrayLike, x: npt.ArrayLike) -> Boolish:
    """Evaluates eps x/2 >= (eps/e^(2/e))^(1/x).

    Raises:
        DomainError: if any eps or x lies outside (0, 1].
    """

    es = np.asarray(eps, dtype=float)
    xs = np.asarray(x, dtype=float)
    _unit_interval('eps', es)
    _unit_interval('x', xs)

    lhs = np.log(es * xs / 2)
    rhs = (np.log(es) - 2 / math.e) / xs
    return _result(lhs >= rhs - INEQUALITY_TOL)


@dataclass(frozen=True)
class BoundCheck:
    """The outcome of one grid verification.

    Attributes:
        name:
            The checked inequality.
        grid:
            A description of the evaluated points.
        points:
            The number of evaluated points.
        violations:
            The number of points where the inequality failed.
    """

    name: str
    grid: str
    points: int
    violations: int

    @property
    def passed(self) -> bool:
        """Returns True if no point violated the inequality."""

        return self.violations == 0

    def row(self) -> str:
        """Returns a fixed width table row."""

        status = 'PASS' if self.passed else 'FAIL'
        return '{:<10} {:<44} {:>9} {:>10}  {}'.format(
                self.name, self.grid, self.points, self.violations, status)


TABLE_HEADER = '{:<10} {:<44} {:>9} {:>10}  {}'.format(
        'check', 'grid', 'points', 'violations', 'status')


def _grid(step: float) -> npt.NDArray:
    """Returns step, 2 step, ..., 1."""

    return np.minimum(np.arange(1, round(1 / step) + 1) * step, 1.0)


def _chernoff_draw(rng: np.random.Generator, samples: int) -> bool:
    """Checks the packing bound against sampled tails of one random sum."""

    alpha = rng.uniform(0.01, 0.5)
    W = rng.uniform(2, 12)
    beta = rng.uniform(0.05, min(1.0, (1 - alpha) * W))
    params = ChernoffParams(alpha, W, beta)

    k = int(rng.integers(2, 40))
    coeffs = rng.uniform(0, beta, size=k)
    coeffs[0] = beta
    # scale probabilities so the mean load is at most alpha W
    probs = rng.random(k)
    mean = coeffs @ probs
    probs *= min(1.0, params.mu / mean)

    tail = monte_carlo_tail(coeffs, probs, params.threshold, samples, rng)
    return tail.estimate <= chernoff_tail(params) + 4 * tail.stderr


def verify_bounds(step: float = 1e-3,
                  chernoff_draws: int = 500,
                  samples: int = 2000,
                  seed: int = 0,
) -> List[BoundCheck]:
    """Verifies every inequality on dense grids.

    Args:
        step:
            The grid spacing of x and eps. The x-power grid uses step / 10.
        chernoff_draws:
            The number of random parameter sets on which the packing
            Chernoff bound must dominate a Monte-Carlo tail plus 4
            standard errors.
        samples:
            The Monte-Carlo samples per parameter set.
        seed:
            The seed of the sampler stream.

    Returns:
        One BoundCheck per verification.
    """

    checks = []

    xs = _grid(step / 10)
    holds = x_power_holds(xs)
    checks.append(BoundCheck('x-power',
                             'x in (0, 1] step {:g}'.format(step / 10),
                             xs.size, int(np.count_nonzero(~holds))))

    x, y = np.meshgrid(_grid(step), np.arange(2, 50.5, 0.5))
    holds = ratio_power_holds(x, y)
    checks.append(BoundCheck('ratio', 'x step {:g} * y in [2, 50] step 0.5'.format(
                             step), x.size, int(np.count_nonzero(~holds))))

    e, x = np.meshgrid(_grid(step), _grid(step))
    holds = eps_power_holds(e, x)
    checks.append(BoundCheck('eps-power',
                             'eps * x in (0, 1]^2 step {:g}'.format(step),
                             e.size, int(np.count_nonzero(~holds))))

    rng = streams.stream(seed, streams.SAMPLER_DOMAIN)
    failures = sum(not _chernoff_draw(rng, samples)
                   for _ in range(chernoff_draws))
    checks.append(BoundCheck('chernoff', '{} random draws, {} samples'.format(
                             chernoff_draws, samples), chernoff_draws,
                             failures))

    for check in checks:
        logger.info(check.row())
    return checks
