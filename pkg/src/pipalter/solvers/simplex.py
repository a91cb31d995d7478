"""A bounded-variable primal simplex solver for the natural LP relaxation.

The relaxation of a normalized PIP is

    max c.x  subject to  Ax <= W,  0 <= x <= 1.

It is always feasible (x = 0) and bounded (x <= 1). Adding a slack per row
gives the standard form [A I][x; s] = W whose slack basis is primal
feasible, so no phase one is needed. Upper bounds on structural variables
are handled implicitly: a nonbasic variable rests at its lower or upper
bound and may flip between them without a basis change, keeping the basis
m x m.

This module contains the following:

- FractionalSolution: The relaxation optimum with duals and basis.
- BoundedSimplex: The solver. Dantzig pricing with a switch to Bland's
  rule after 10 (n + m) iterations guarantees termination. Ratio-test
  ties are broken by smallest variable index so solutions are
  reproducible bit for bit.
- solve_lp: Functional interface to BoundedSimplex.
- lp_objective_gap: The ratio of the LP optimum to an integer optimum.

Examples:
    >>> from pipalter.instances.bases import PipInstance
    >>> from pipalter.instances.normalization import normalize
    >>> inst = normalize(PipInstance.from_dense([[1, 1]], [1], [2, 1]))
    >>> sol = solve_lp(inst)
    >>> sol.x.tolist(), sol.objective
    ([1.0, 0.0], 2.0)
"""

from dataclasses import dataclass
import logging
from pathlib import Path
from typing import Optional, Tuple, Union

import numpy as np
import numpy.typing as npt

from pipalter.core import mixins
from pipalter.core.errors import IterationLimitError
from pipalter.core.resources import is_assignable
from pipalter.instances.bases import NormalizedInstance

logger = logging.getLogger(__name__)

PIVOT_TOL = 1e-10
# reduced costs within this tolerance of zero are treated as optimal
OPTIMALITY_TOL = 1e-9
TIE_TOL = 1e-12

OPTIMAL = 'Optimal'
ITERATION_LIMIT = 'IterationLimit'


@dataclass(frozen=True, repr=False, eq=False)
class FractionalSolution(mixins.ViewContainer):
    """An optimal (or last iterated) solution of the LP relaxation.

    Attributes:
        x:
            The structural solution in [0, 1]^n.
        objective:
            The objective value c.x.
        status:
            'Optimal' or 'IterationLimit'.
        iterations:
            The number of simplex iterations performed.
        duals:
            The row duals y = c_B B^-1 of the final basis (length m).
        dual_objective:
            The dual value W.sum(y) + sum_j max(0, c_j - y.A_j) which
            equals objective at optimality.
        basis:
            The indices of basic variables; indices >= n are slacks.
    """

    x: npt.NDArray[np.float64]
    objective: float
    status: str
    iterations: int
    duals: npt.NDArray[np.float64]
    dual_objective: float
    basis: Tuple[int, ...]

    @property
    def support(self) -> npt.NDArray[np.int64]:
        """Returns the indices of positive coordinates of x."""

        return np.flatnonzero(self.x > 0)


class BoundedSimplex(mixins.ViewInstance):
    """A revised primal simplex with implicit upper bounds.

    Attributes:
        inst:
            The NormalizedInstance whose relaxation is solved.
        max_iters:
            The iteration budget after which IterationLimitError is raised.
        refactor_every:
            The number of pivots between explicit re-inversions of the
            basis matrix.
        pivot_tol:
            Entries of the entering column smaller than this in magnitude
            never determine the leaving variable.
    """

    def __init__(self,
                 inst: NormalizedInstance,
                 max_iters: Optional[int] = None,
                 refactor_every: int = 50,
                 pivot_tol: float = PIVOT_TOL,
    ) -> None:
        """Initialize this solver at the all-slack basis."""

        self.inst = inst
        n, m = inst.n, inst.m
        self.max_iters = max_iters if max_iters else 100 * (n + m) + 1000
        self.refactor_every = refactor_every
        self.pivot_tol = pivot_tol

        is_assignable((m, n + m))
        self._matrix = np.hstack([inst.A.toarray(), np.eye(m)])
        self._cost = np.concatenate([inst.c, np.zeros(m)])
        self._upper = np.concatenate([np.ones(n), np.full(m, np.inf)])
        self._rhs = np.array(inst.b, dtype=float)

        self._basis = np.arange(n, n + m)
        self._is_basic = np.zeros(n + m, dtype=bool)
        self._is_basic[self._basis] = True
        self._at_upper = np.zeros(n + m, dtype=bool)
        self._values = np.concatenate([np.zeros(n), self._rhs])
        self._binv = np.eye(m)
        self.iterations = 0

    @property
    def bland_after(self) -> int:
        """Returns the iteration at which pricing switches to Bland's rule."""

        return 10 * (self.inst.n + self.inst.m)

    def _refactor(self) -> None:
        """Re-inverts the basis and recomputes basic variable values."""

        self._binv = np.linalg.inv(self._matrix[:, self._basis])
        nonbasic = ~self._is_basic
        residual = self._rhs - (self._matrix[:, nonbasic] @
                                self._values[nonbasic])
        self._values[self._basis] = self._binv @ residual
        logger.debug('Refactored basis at iteration %d', self.iterations)

    def _reduced_costs(self) -> Tuple[npt.NDArray, npt.NDArray]:
        """Returns the duals and reduced costs of the current basis."""

        duals = self._cost[self._basis] @ self._binv
        reduced = self._cost - duals @ self._matrix
        reduced[self._basis] = 0
        return duals, reduced

    def _entering(self, reduced: npt.NDArray) -> Optional[int]:
        """Returns the entering variable or None if the basis is optimal."""

        at_upper = self._at_upper
        eligible = ~self._is_basic & (
                (~at_upper & (reduced > OPTIMALITY_TOL)) |
                (at_upper & (reduced < -OPTIMALITY_TOL)))
        candidates = np.flatnonzero(eligible)
        if candidates.size == 0:
            return None

        if self.iterations >= self.bland_after:
            if self.iterations == self.bland_after:
                logger.debug("Switching to Bland's rule at iteration %d",
                             self.iterations)
            return int(candidates[0])

        # argmax returns the first (smallest index) maximizer
        return int(candidates[np.argmax(np.abs(reduced[candidates]))])

    def _ratio_test(self, q: int, delta: npt.NDArray
    ) -> Tuple[float, Optional[int], bool]:
        """Returns the step length, the leaving row and its bound side.

        The basic values move as x_B - theta * delta. The leaving row is
        None when the entering variable reaches its own opposite bound
        first (a bound flip). The boolean is True if the leaving variable
        exits at its upper bound.
        """

        xb = self._values[self._basis]
        ub = self._upper[self._basis]
        ratios = np.full(delta.size, np.inf)

        down = delta > self.pivot_tol
        ratios[down] = np.maximum(xb[down], 0) / delta[down]
        up = (delta < -self.pivot_tol) & np.isfinite(ub)
        ratios[up] = np.maximum(ub[up] - xb[up], 0) / -delta[up]

        flip = self._upper[q]
        best = np.min(ratios) if ratios.size else np.inf
        if flip <= best + TIE_TOL:
            return float(flip), None, False

        # tie-break among near-minimal ratios by smallest variable index
        tied = np.flatnonzero(ratios <= best + TIE_TOL)
        r = int(tied[np.argmin(self._basis[tied])])
        return float(ratios[r]), r, bool(up[r])

    def _pivot(self, q: int, r: int, column: npt.NDArray, to_upper: bool
    ) -> None:
        """Exchanges basic row r for entering variable q."""

        leaving = int(self._basis[r])
        self._values[leaving] = self._upper[leaving] if to_upper else 0.0
        self._at_upper[leaving] = to_upper
        self._is_basic[leaving] = False

        self._basis[r] = q
        self._is_basic[q] = True
        self._at_upper[q] = False

        pivot_row = self._binv[r] / column[r]
        self._binv -= np.outer(column, pivot_row)
        self._binv[r] = pivot_row

    def _solution(self, status: str) -> FractionalSolution:
        """Builds a FractionalSolution from the current basis."""

        n = self.inst.n
        x = np.clip(self._values[:n], 0.0, 1.0)
        duals, _ = self._reduced_costs()
        slack = self.inst.c - duals @ self._matrix[:, :n]
        dual_objective = float(self._rhs @ duals + np.maximum(slack, 0).sum())

        x.setflags(write=False)
        duals.setflags(write=False)
        return FractionalSolution(x, float(self.inst.c @ x), status,
                                  self.iterations, duals, dual_objective,
                                  tuple(int(v) for v in self._basis))

    def solve(self) -> FractionalSolution:
        """Runs the simplex method to optimality.

        Returns:
            An optimal basic FractionalSolution.

        Raises:
            IterationLimitError: if max_iters pivots do not reach an optimal
            basis. The error's solution attribute holds the last iterate.
        """

        while self.iterations < self.max_iters:
            if self.iterations and self.iterations % self.refactor_every == 0:
                self._refactor()

            _, reduced = self._reduced_costs()
            q = self._entering(reduced)
            if q is None:
                self._refactor()
                solution = self._solution(OPTIMAL)
                logger.info('LP optimal after %d iterations, objective %.10g',
                            self.iterations, solution.objective)
                return solution

            direction = -1.0 if self._at_upper[q] else 1.0
            column = self._binv @ self._matrix[:, q]
            delta = direction * column
            theta, r, to_upper = self._ratio_test(q, delta)
            if not np.isfinite(theta):
                # unreachable for packing LPs since every x_j <= 1
                raise RuntimeError('LP relaxation reported unbounded')

            self._values[self._basis] -= theta * delta
            self._values[q] += direction * theta
            if r is None:
                self._at_upper[q] = not self._at_upper[q]
                self._values[q] = self._upper[q] if self._at_upper[q] else 0.0
            else:
                self._pivot(q, r, column, to_upper)

            self.iterations += 1

        error = IterationLimitError(self.iterations)
        error.solution = self._solution(ITERATION_LIMIT)
        raise error

    def dump_basis(self, path: Union[str, Path]) -> None:
        """Writes the basis, nonbasic bound states and duals to a text file.

        Args:
            path:
                Destination file path.
        """

        n = self.inst.n
        duals, reduced = self._reduced_costs()
        lines = ['# basis after {} iterations'.format(self.iterations),
                 '# row variable kind value']
        for row, var in enumerate(self._basis):
            kind = 'x' if var < n else 's'
            index = var if var < n else var - n
            lines.append('{} {}{} basic {!r}'.format(row, kind, index,
                                                     float(self._values[var])))

        lines.append('# nonbasic variable bound reduced_cost')
        for var in np.flatnonzero(~self._is_basic):
            kind = 'x' if var < n else 's'
            index = var if var < n else var - n
            side = 'upper' if self._at_upper[var] else 'lower'
            lines.append('{}{} {} {!r}'.format(kind, index, side,
                                               float(reduced[var])))

        lines.append('# row dual')
        lines.extend('{} {!r}'.format(i, float(y)) for i, y in enumerate(duals))

        with open(path, 'w', encoding='utf-8') as outfile:
            outfile.write('\n'.join(lines) + '\n')


def solve_lp(inst: NormalizedInstance, max_iters: Optional[int] = None
) -> FractionalSolution:
    """Solves the natural LP relaxation of a normalized instance.

    Args:
        inst:
            A NormalizedInstance.
        max_iters:
            The simplex iteration budget. If None, 100 (n + m) + 1000.

    Returns:
        An optimal basic FractionalSolution.

    Raises:
        IterationLimitError: on numerical trouble beyond max_iters.
    """

    return BoundedSimplex(inst, max_iters).solve()


def lp_objective_gap(inst: NormalizedInstance,
                     ip_opt: float,
                     solution: Optional[FractionalSolution] = None,
) -> float:
    """Returns the LP optimum divided by max(ip_opt, 1).

    Args:
        inst:
            A NormalizedInstance.
        ip_opt:
            The integer optimum, e.g. from pipalter.solvers.oracle.
        solution:
            A previously computed LP solution of inst. If None, the LP is
            solved.
    """

    if solution is None:
        solution = solve_lp(inst)
    return solution.objective / max(ip_opt, 1.0)
