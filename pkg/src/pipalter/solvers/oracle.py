"""Exact optima of small packing integer programs.

Round-and-alter is measured against the true integer optimum on instances
small enough to solve exactly. This module contains the following:

- ExactResult: An optimal boolean vector, its value and the search effort.
- brute_force_opt: Depth-first branch and bound over items ordered by
  profit, pruned by a fractional knapsack bound (n <= 30).
- exhaustive_opt: Plain enumeration of all 2^n boolean vectors in
  memory-bounded chunks (n <= 20), used to cross-check the search.
- approx_ratio: The Monte-Carlo mean of round-and-alter against the IP and
  LP optima.

Examples:
    >>> from pipalter.instances.bases import PipInstance
    >>> inst = PipInstance.from_dense([[1, 1]], b=[2], c=[3, 4])
    >>> result = brute_force_opt(inst)
    >>> result.value, result.argmax.astype(int).tolist()
    (7.0, [1, 1])
"""

from dataclasses import dataclass
import logging
from typing import Optional

import numpy as np
import numpy.typing as npt

from pipalter.core import mixins
from pipalter.core.batching import Batches
from pipalter.core.errors import NodeLimitError, TooLargeError
from pipalter.core.resources import batch_size
from pipalter.instances.bases import NormalizedInstance, PipInstance
from pipalter.rounding.framework import round_and_alter
from pipalter.rounding.regimes import RegimeConfig
from pipalter.solvers.simplex import solve_lp

logger = logging.getLogger(__name__)

MAX_SEARCH_ITEMS = 30
MAX_ENUMERATION_ITEMS = 20
FEASIBILITY_TOL = 1e-9


@dataclass(frozen=True, repr=False, eq=False)
class ExactResult(mixins.ViewContainer):
    """An optimal solution of a packing integer program.

    Attributes:
        value:
            The optimal objective c.argmax.
        argmax:
            An optimal boolean vector.
        nodes_explored:
            The number of search nodes (or enumerated vectors) visited.
    """

    value: float
    argmax: npt.NDArray[np.bool_]
    nodes_explored: int


class _BranchAndBound:
    """Depth-first search state for brute_force_opt."""

    def __init__(self, inst: PipInstance, limit: int) -> None:

        self.limit = limit
        # ties in profit are broken by item index
        self.order = np.argsort(-inst.c, kind='stable')
        self.sizes = inst.dense()[:, self.order]
        self.profits = inst.c[self.order]
        self.capacity = inst.b.astype(float)

        # per row, items ordered by decreasing profit density
        with np.errstate(divide='ignore', invalid='ignore'):
            density = np.where(self.sizes > 0, self.profits / self.sizes,
                               np.inf)
        self.density_order = np.argsort(-density, axis=1, kind='stable')
        rows = np.arange(self.sizes.shape[0])[:, np.newaxis]
        self.sorted_sizes = self.sizes[rows, self.density_order]
        self.sorted_profits = self.profits[self.density_order]

        n = inst.n
        self.chosen = np.zeros(n, dtype=bool)
        self.best_value = 0.0
        self.best = np.zeros(n, dtype=bool)
        self.nodes = 0

    def bound(self, depth: int, residual: npt.NDArray) -> float:
        """Returns the min over rows of the fractional knapsack value of
        the undecided items in that row's residual capacity."""

        remaining = np.zeros(self.profits.size, dtype=bool)
        remaining[depth:] = True
        mask = remaining[self.density_order]
        sizes = self.sorted_sizes * mask
        profits = self.sorted_profits * mask

        loads = np.cumsum(sizes, axis=1)
        fits = loads <= residual[:, np.newaxis] + FEASIBILITY_TOL
        full = np.sum(profits * fits, axis=1)

        over = mask & ~fits
        has_over = over.any(axis=1)
        first = np.argmax(over, axis=1)
        rows = np.arange(sizes.shape[0])
        before = loads[rows, first] - sizes[rows, first]
        with np.errstate(divide='ignore', invalid='ignore'):
            part = ((residual - before) / sizes[rows, first] *
                    profits[rows, first])
        full += np.where(has_over, np.clip(part, 0, None), 0)
        return float(full.min())

    def search(self, depth: int, value: float, residual: npt.NDArray) -> None:
        """Explores the subtree deciding items order[depth:]."""

        self.nodes += 1
        if self.nodes > self.limit:
            msg = 'Branch and bound exceeded {} nodes'
            raise NodeLimitError(msg.format(self.limit))

        if value > self.best_value:
            self.best_value = value
            self.best = self.chosen.copy()

        if depth == self.profits.size:
            return
        if value + self.bound(depth, residual) <= self.best_value + 1e-12:
            return

        size = self.sizes[:, depth]
        after = residual - size
        if np.all(after >= -FEASIBILITY_TOL):
            self.chosen[depth] = True
            self.search(depth + 1, value + self.profits[depth], after)
            self.chosen[depth] = False

        self.search(depth + 1, value, residual)


def brute_force_opt(inst: PipInstance, limit: int = 10 ** 7) -> ExactResult:
    """Solves a PIP with at most 30 items by branch and bound.

    Items are branched on in order of decreasing profit, taking an item
    before skipping it. A node is pruned when its value plus the smallest
    per-row fractional knapsack bound on the undecided items cannot beat
    the incumbent.

    Args:
        inst:
            A PipInstance (raw or the base of a NormalizedInstance).
        limit:
            The maximum number of search nodes.

    Returns:
        An ExactResult.

    Raises:
        TooLargeError: if inst has more than 30 items.
        NodeLimitError: if the search visits more than limit nodes.
    """

    if inst.n > MAX_SEARCH_ITEMS:
        msg = 'Exact search supports at most {} items not {}'
        raise TooLargeError(msg.format(MAX_SEARCH_ITEMS, inst.n))

    state = _BranchAndBound(inst, limit)
    state.search(0, 0.0, state.capacity.copy())

    argmax = np.zeros(inst.n, dtype=bool)
    argmax[state.order[state.best]] = True
    argmax.setflags(write=False)
    logger.info('Exact optimum %.10g after %d nodes', state.best_value,
                state.nodes)
    return ExactResult(float(inst.c @ argmax), argmax, state.nodes)


def exhaustive_opt(inst: PipInstance, chunksize: int = 2 ** 16
) -> ExactResult:
    """Solves a PIP with at most 20 items by enumerating all 2^n vectors.

    Vectors are enumerated by their integer codes; the first optimal code
    wins ties.

    Raises:
        TooLargeError: if inst has more than 20 items.
    """

    n = inst.n
    if n > MAX_ENUMERATION_ITEMS:
        msg = 'Enumeration supports at most {} items not {}'
        raise TooLargeError(msg.format(MAX_ENUMERATION_ITEMS, n))

    dense = inst.dense()
    bits = np.arange(n)
    best_value, best_code = -np.inf, 0
    total = 2 ** n
    for start, stop in Batches(total, batch_size(n, chunksize)):
        codes = np.arange(start, stop, dtype=np.int64)
        vectors = ((codes[:, np.newaxis] >> bits) & 1).astype(float)
        feasible = np.all(vectors @ dense.T <= inst.b + FEASIBILITY_TOL,
                          axis=1)
        values = np.where(feasible, vectors @ inst.c, -np.inf)
        k = int(np.argmax(values))
        if values[k] > best_value:
            best_value, best_code = values[k], start + k

    argmax = ((best_code >> bits) & 1).astype(bool)
    argmax.setflags(write=False)
    return ExactResult(float(inst.c @ argmax), argmax, total)


@dataclass(frozen=True, repr=False)
class ApproxReport(mixins.ViewContainer):
    """Round-and-alter performance against exact and relaxed optima.

    Attributes:
        mean_value:
            The Monte-Carlo mean of c.x'' over trials.
        stderr:
            The standard error of mean_value.
        ip_opt:
            The integer optimum.
        lp_opt:
            The LP relaxation optimum.
        ratio_vs_ip:
            mean_value / ip_opt (1 if ip_opt is 0).
        ratio_vs_lp:
            mean_value / lp_opt (1 if lp_opt is 0).
        guarantee:
            The approximation factor of the regime, NaN without one.
        trials:
            The number of trials.
    """

    mean_value: float
    stderr: float
    ip_opt: float
    lp_opt: float
    ratio_vs_ip: float
    ratio_vs_lp: float
    guarantee: float
    trials: int


def _ratio(value: float, reference: float) -> float:
    return value / reference if reference > 0 else 1.0


def approx_ratio(inst: NormalizedInstance,
                 cfg: RegimeConfig,
                 trials: int,
                 seed: int,
                 ip_opt: Optional[float] = None,
                 ordered: bool = True,
) -> ApproxReport:
    """Measures the empirical approximation ratio of round-and-alter.

    Args:
        inst:
            A NormalizedInstance with at most 30 items unless ip_opt is
            given.
        cfg:
            The RegimeConfig to run.
        trials:
            The number of round-and-alter trials.
        seed:
            The experiment seed.
        ip_opt:
            A known integer optimum. If None, brute_force_opt is run on the
            normalized instance.
        ordered:
            If False, use the unsorted baseline alteration.

    Returns:
        An ApproxReport.
    """

    lp = solve_lp(inst)
    if ip_opt is None:
        ip_opt = brute_force_opt(inst.base).value

    _, stats = round_and_alter(inst, cfg, trials, seed, lp=lp, ordered=ordered)
    return ApproxReport(stats.mean, stats.stderr, ip_opt, lp.objective,
                        _ratio(stats.mean, ip_opt),
                        _ratio(stats.mean, lp.objective), cfg.guarantee,
                        trials)
