"""Independent rounding and the alteration steps that repair its output.

Round-and-alter scales an LP solution by alpha, rounds every coordinate to
one independently and then walks the constraints, discarding rounded
items until each constraint holds. Two alteration schemes are provided:

- sorting: Within a constraint the rounded items are sorted by
  coefficient (ties by item index) and the longest prefix whose load fits
  the capacity W is kept. Every later rounded item is rejected.
- smallwidth: For widths W = 1 + eps items with coefficient <= eps/2 are
  small and the rest big. Small items are packed greedily in sorted order
  into capacity eps and exactly one rounded big item, the one with the
  smallest coefficient, is kept in the remaining capacity 1.

Constraints are processed in ascending row order and rejections cascade:
an item zeroed by row i is invisible to later rows, so every rejected item
has exactly one recorded rejector.

Every step is implemented on a trials x items boolean array so that
thousands of trials are altered with a handful of numpy calls per row.
The single vector functions alter_by_sorting and alter_small_width are
the one trial case of alter_batch. The isolated_rejections function
evaluates every row against the pristine rounded array and answers, for
each (trial, row, item), whether the item would be rejected if it were
rounded; it is the estimator behind the rejection experiments.

Examples:
    >>> from pipalter.instances.bases import PipInstance
    >>> from pipalter.instances.normalization import normalize
    >>> inst = normalize(PipInstance.from_dense([[1.0, 0.9, 0.8]], [2],
    ...                                         [1, 1, 1]))
    >>> outcome = alter_by_sorting(inst, [1, 1, 1])
    >>> outcome.x_doubleprime.astype(int).tolist()
    [0, 1, 1]
    >>> sorted(outcome.rejections)
    [(0, 0)]
"""

from dataclasses import dataclass
from typing import FrozenSet, List, Optional, Tuple

import numpy as np
import numpy.typing as npt

from pipalter.core import mixins
from pipalter.core.errors import EpsOutOfRangeError, RegimeMismatchError
from pipalter.instances.bases import NormalizedInstance

CAPACITY_TOL = 1e-9
# allowed mismatch between a supplied eps and the width - 1 of an instance
WIDTH_MATCH_TOL = 1e-9

SORTING = 'sorting'
SMALL_WIDTH = 'smallwidth'


@dataclass(frozen=True, repr=False, eq=False)
class RoundingOutcome(mixins.ViewContainer):
    """The rounded and altered vectors of a single trial.

    Attributes:
        x_prime:
            The boolean rounded vector, possibly infeasible.
        x_doubleprime:
            The boolean altered vector; always feasible and <= x_prime.
        value:
            The objective c.x_doubleprime.
        rejections:
            The (row, item) pairs where a row discarded a rounded item.
        seed:
            The seed of the random stream the trial was drawn from, None
            if x_prime was supplied by the caller.
        trial:
            The trial index within that stream, None if not applicable.
    """

    x_prime: npt.NDArray[np.bool_]
    x_doubleprime: npt.NDArray[np.bool_]
    value: float
    rejections: FrozenSet[Tuple[int, int]]
    seed: Optional[int] = None
    trial: Optional[int] = None

    @property
    def num_rounded(self) -> int:
        """Returns the number of items rounded to one."""

        return int(np.count_nonzero(self.x_prime))

    @property
    def num_rejected(self) -> int:
        """Returns the number of rounded items discarded by alteration."""

        return int(np.count_nonzero(self.x_prime & ~self.x_doubleprime))


@dataclass(frozen=True, repr=False, eq=False)
class BatchAlteration(mixins.ViewContainer):
    """The altered rows and recorded rejections of a batch of trials.

    Attributes:
        x_doubleprime:
            A trials x n boolean array of altered vectors.
        rejected:
            One trials x k boolean array per constraint row aligned with
            that row's stored column indices; True where the row rejected
            the item in that trial.
    """

    x_doubleprime: npt.NDArray[np.bool_]
    rejected: List[npt.NDArray[np.bool_]]

    def rejected_counts(self) -> npt.NDArray[np.int64]:
        """Returns the number of rejected items in each trial."""

        counts = np.zeros(self.x_doubleprime.shape[0], dtype=np.int64)
        for arr in self.rejected:
            counts += arr.sum(axis=1)
        return counts


def independent_round(x: npt.ArrayLike,
                      alpha: float,
                      rng: np.random.Generator,
) -> npt.NDArray[np.bool_]:
    """Rounds each coordinate of x to one with probability alpha * x_j.

    Exactly n uniforms are drawn from rng, coordinate j consuming the j-th
    draw, so a trial's rounded vector depends only on its stream.

    Args:
        x:
            A fractional vector in [0, 1]^n.
        alpha:
            The scaling factor in (0, 1].
        rng:
            A numpy Generator owned by the trial.

    Returns:
        A boolean vector of length n.
    """

    if not 0 < alpha <= 1:
        msg = 'alpha must lie in (0, 1] not {}'
        raise ValueError(msg.format(alpha))

    probs = alpha * np.asarray(x, dtype=float)
    return rng.random(probs.size) < probs


def round_batch(x: npt.ArrayLike, alpha: float, uniforms: npt.NDArray
) -> npt.NDArray[np.bool_]:
    """Rounds a batch of trials from their pre-drawn uniforms.

    Row t of uniforms holds the draws of one trial, so row t of the result
    equals independent_round applied to that trial's stream.
    """

    if not 0 < alpha <= 1:
        msg = 'alpha must lie in (0, 1] not {}'
        raise ValueError(msg.format(alpha))

    probs = alpha * np.asarray(x, dtype=float)
    return uniforms < probs[np.newaxis, :]


def _sort_order(data: npt.NDArray, ordered: bool) -> npt.NDArray[np.int64]:
    """Returns the processing order of a row's stored items.

    Stored column indices are ascending so a stable sort breaks
    coefficient ties by item index.
    """

    if ordered:
        return np.argsort(data, kind='stable')
    return np.arange(data.size)


def _prefix_keep(sub: npt.NDArray[np.bool_],
                 data: npt.NDArray,
                 capacity: float,
                 ordered: bool,
) -> npt.NDArray[np.bool_]:
    """Returns the rounded items inside the longest fitting prefix.

    Args:
        sub:
            A trials x k boolean array of the row's rounded items.
        data:
            The k positive coefficients of the row.
        capacity:
            The load the kept prefix may not exceed.
        ordered:
            If True, items are taken by ascending coefficient, else in
            index order.
    """

    order = _sort_order(data, ordered)
    rounded = sub[:, order]
    loads = np.cumsum(rounded * data[order], axis=1)
    keep = np.empty_like(sub)
    keep[:, order] = rounded & (loads <= capacity + CAPACITY_TOL)
    return keep


def _prefix_would_reject(sub: npt.NDArray[np.bool_],
                         data: npt.NDArray,
                         capacity: float,
                         ordered: bool,
) -> npt.NDArray[np.bool_]:
    """Returns True where an item would be rejected if it were rounded.

    An item is rejected exactly when the load of rounded items preceding
    it plus its own coefficient exceeds capacity. The preceding load does
    not depend on the item itself.
    """

    order = _sort_order(data, ordered)
    coeffs = data[order]
    contrib = sub[:, order] * coeffs
    before = np.cumsum(contrib, axis=1) - contrib
    result = np.empty_like(sub)
    result[:, order] = before + coeffs > capacity + CAPACITY_TOL
    return result


def _first_big_keep(sub: npt.NDArray[np.bool_], data: npt.NDArray
) -> npt.NDArray[np.bool_]:
    """Keeps only the rounded item of smallest coefficient in each trial."""

    order = _sort_order(data, True)
    rounded = sub[:, order]
    keep = np.empty_like(sub)
    keep[:, order] = rounded & (np.cumsum(rounded, axis=1) == 1)
    return keep


def _first_big_would_reject(sub: npt.NDArray[np.bool_], data: npt.NDArray
) -> npt.NDArray[np.bool_]:
    """Returns True where a rounded big item precedes the item."""

    order = _sort_order(data, True)
    rounded = sub[:, order].astype(np.int64)
    before = np.cumsum(rounded, axis=1) - rounded
    result = np.empty_like(sub)
    result[:, order] = before > 0
    return result


def check_small_width(inst: NormalizedInstance, eps: float) -> None:
    """Validates that eps lies in (0, 1] and that W = 1 + eps.

    Raises:
        EpsOutOfRangeError: if eps is outside (0, 1].
        RegimeMismatchError: if the width of inst differs from 1 + eps.
    """

    if not 0 < eps <= 1:
        msg = 'Small width alteration requires 0 < eps <= 1 not {}'
        raise EpsOutOfRangeError(msg.format(eps))
    if abs(inst.W - (1 + eps)) > WIDTH_MATCH_TOL:
        msg = 'Small width alteration with eps={} requires W = {} not {}'
        raise RegimeMismatchError(msg.format(eps, 1 + eps, inst.W))


def _row_keep(sub, data, W, scheme, eps, ordered):
    """Dispatches the keep rule of a scheme for one row."""

    if scheme == SORTING:
        return _prefix_keep(sub, data, W, ordered)

    keep = np.zeros_like(sub)
    small = data <= eps / 2
    keep[:, small] = _prefix_keep(sub[:, small], data[small], eps, ordered)
    keep[:, ~small] = _first_big_keep(sub[:, ~small], data[~small])
    return keep


def _check_scheme(inst, scheme, eps):
    """Validates a scheme name and its eps."""

    if scheme == SMALL_WIDTH:
        if eps is None:
            raise ValueError('The smallwidth scheme requires eps')
        check_small_width(inst, eps)
    elif scheme != SORTING:
        msg = "scheme must be one of '{}' or '{}' not {}"
        raise ValueError(msg.format(SORTING, SMALL_WIDTH, scheme))


def alter_batch(inst: NormalizedInstance,
                x_prime: npt.NDArray[np.bool_],
                scheme: str = SORTING,
                eps: Optional[float] = None,
                ordered: bool = True,
) -> BatchAlteration:
    """Alters a trials x n batch of rounded vectors with cascading.

    Args:
        inst:
            A NormalizedInstance.
        x_prime:
            A trials x n boolean array of rounded vectors. It is not
            modified.
        scheme:
            'sorting' or 'smallwidth'.
        eps:
            The small width parameter; required for 'smallwidth'.
        ordered:
            If False, items are packed in index order instead of sorted
            order (the unsorted baseline; sorting scheme and small items
            only).

    Returns:
        A BatchAlteration.
    """

    _check_scheme(inst, scheme, eps)
    current = np.array(x_prime, dtype=bool, copy=True, ndmin=2)
    rejected = []
    for i in range(inst.m):
        cols, data = inst.base.row(i)
        sub = current[:, cols]
        keep = _row_keep(sub, data, inst.W, scheme, eps, ordered)
        rejected.append(sub & ~keep)
        current[:, cols] = keep

    return BatchAlteration(current, rejected)


def isolated_rejections(inst: NormalizedInstance,
                        x_prime: npt.NDArray[np.bool_],
                        scheme: str = SORTING,
                        eps: Optional[float] = None,
                        ordered: bool = True,
) -> List[npt.NDArray[np.bool_]]:
    """Returns per row whether each item would be rejected if rounded.

    Every row is evaluated against the pristine rounded batch. For item j
    the indicator treats x_j as one and leaves all other coordinates as
    drawn, which, since coordinates are rounded independently, is a draw
    from the law of the batch conditioned on x_j = 1.

    Returns:
        One trials x k boolean array per row aligned with the row's stored
        column indices.
    """

    _check_scheme(inst, scheme, eps)
    rounded = np.array(x_prime, dtype=bool, ndmin=2)
    result = []
    for i in range(inst.m):
        cols, data = inst.base.row(i)
        sub = rounded[:, cols]
        if scheme == SORTING:
            result.append(_prefix_would_reject(sub, data, inst.W, ordered))
            continue

        would = np.zeros_like(sub)
        small = data <= eps / 2
        would[:, small] = _prefix_would_reject(sub[:, small], data[small],
                                               eps, ordered)
        would[:, ~small] = _first_big_would_reject(sub[:, ~small],
                                                   data[~small])
        result.append(would)

    return result


def _outcome(inst: NormalizedInstance,
             x_prime: npt.ArrayLike,
             scheme: str,
             eps: Optional[float],
             ordered: bool,
) -> RoundingOutcome:
    """Alters a single rounded vector."""

    rounded = np.asarray(x_prime).astype(bool)
    if rounded.shape != (inst.n,):
        msg = 'x_prime must have length {} not shape {}'
        raise ValueError(msg.format(inst.n, rounded.shape))

    batch = alter_batch(inst, rounded[np.newaxis, :], scheme, eps, ordered)
    altered = batch.x_doubleprime[0]
    pairs = set()
    for i, arr in enumerate(batch.rejected):
        cols, _ = inst.base.row(i)
        pairs.update((i, int(j)) for j in cols[arr[0]])

    rounded.setflags(write=False)
    altered.setflags(write=False)
    return RoundingOutcome(rounded, altered, float(inst.c @ altered),
                           frozenset(pairs))


def alter_by_sorting(inst: NormalizedInstance,
                     x_prime: npt.ArrayLike,
                     ordered: bool = True,
) -> RoundingOutcome:
    """Repairs a rounded vector by keeping sorted prefixes per row.

    Args:
        inst:
            A NormalizedInstance.
        x_prime:
            A boolean vector of length n.
        ordered:
            If False, prefixes are taken in item index order.

    Returns:
        A RoundingOutcome with a feasible x_doubleprime.

    Examples:
        >>> from pipalter.instances.bases import PipInstance
        >>> from pipalter.instances.normalization import normalize
        >>> inst = normalize(PipInstance.from_dense([[1, 1]], [2], [1, 1]))
        >>> alter_by_sorting(inst, [1, 1]).rejections
        frozenset()
    """

    return _outcome(inst, x_prime, SORTING, None, ordered)


def alter_small_width(inst: NormalizedInstance,
                      eps: float,
                      x_prime: npt.ArrayLike,
                      ordered: bool = True,
) -> RoundingOutcome:
    """Repairs a rounded vector of a width 1 + eps instance.

    Args:
        inst:
            A NormalizedInstance of width 1 + eps.
        eps:
            The width excess in (0, 1].
        x_prime:
            A boolean vector of length n.
        ordered:
            If False, small items are packed in index order.

    Returns:
        A RoundingOutcome with a feasible x_doubleprime.

    Raises:
        EpsOutOfRangeError: if eps is outside (0, 1].
    """

    return _outcome(inst, x_prime, SMALL_WIDTH, eps, ordered)
