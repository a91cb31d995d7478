"""Validation, width and row normalization of packing integer programs.

This module includes the following functions:

- validate: Lists every violated structural invariant of an instance.
- width_of: Computes the width W = min b_i / A_ij over positive entries.
- normalize: Scales each row so its constraint reads A_i x <= W with
  entries in [0, 1] and computes the column sparsities delta0 and delta1.

Examples:
    >>> from pipalter.instances.bases import PipInstance
    >>> inst = PipInstance.from_dense([[2, 1], [1, 4]], b=[4, 8], c=[1, 1])
    >>> width_of(inst)
    2.0
    >>> norm = normalize(inst)
    >>> norm.base.dense().tolist()
    [[1.0, 0.5], [0.25, 1.0]]
    >>> norm.delta1
    1.5
"""

import logging
from typing import List

import numpy as np
import numpy.typing as npt
import scipy.sparse as sparse

from pipalter.core.errors import (AllZeroMatrixError, InvalidInstanceError,
                                  WidthBelowOneError)
from pipalter.instances.bases import NormalizedInstance, PipInstance, Violation

logger = logging.getLogger(__name__)

# absolute tolerance of normalization identities
NORMALIZATION_TOL = 1e-12


def _entry_rows(A: sparse.csr_matrix) -> npt.NDArray[np.int64]:
    """Returns the row index of every stored entry of a CSR matrix."""

    return np.repeat(np.arange(A.shape[0]), np.diff(A.indptr))


def validate(inst: PipInstance) -> List[Violation]:
    """Returns every violated structural invariant of a PIP instance.

    Errors are reported for empty dimensions, negative or non-finite
    objective coefficients, capacities or matrix entries and for
    capacities that are not strictly positive. All-zero columns are
    permitted but reported with 'warning' severity. The instance is never
    mutated.

    Args:
        inst:
            The PipInstance to diagnose.

    Returns:
        A list of Violation records in a fixed order (dimensions, objective,
        capacities, matrix entries row-major, columns). An empty list means
        the instance is valid.

    Examples:
        >>> from pipalter.instances.bases import PipInstance
        >>> inst = PipInstance.from_dense([[1, 1], [1, 1]], [0, 1], [1, 1])
        >>> [str(v) for v in validate(inst)]
        ['NonpositiveCapacity(0)']
    """

    result = []
    if inst.n < 1:
        result.append(Violation('NoVariables'))
    if inst.m < 1:
        result.append(Violation('NoConstraints'))

    for j in np.flatnonzero(~np.isfinite(inst.c)):
        result.append(Violation('NonFiniteObjective', (int(j),)))
    for j in np.flatnonzero(inst.c < 0):
        result.append(Violation('NegativeObjective', (int(j),)))

    for i in np.flatnonzero(~np.isfinite(inst.b)):
        result.append(Violation('NonFiniteCapacity', (int(i),)))
    for i in np.flatnonzero(inst.b <= 0):
        result.append(Violation('NonpositiveCapacity', (int(i),)))

    rows, cols, data = _entry_rows(inst.A), inst.A.indices, inst.A.data
    for k in np.flatnonzero(~np.isfinite(data)):
        result.append(Violation('NonFiniteEntry', (int(rows[k]), int(cols[k]))))
    for k in np.flatnonzero(data < 0):
        result.append(Violation('NegativeEntry', (int(rows[k]), int(cols[k]))))

    counts = np.bincount(cols[data > 0], minlength=inst.n)
    for j in np.flatnonzero(counts == 0):
        result.append(Violation('EmptyColumn', (int(j),), 'warning'))

    return result


def width_of(inst: PipInstance) -> float:
    """Returns the width min b_i / A_ij over the positive entries of A.

    Args:
        inst:
            A PipInstance, raw or normalized.

    Returns:
        The exact minimum ratio as a float.

    Raises:
        AllZeroMatrixError: if A has no positive entry.

    Examples:
        >>> from pipalter.instances.bases import PipInstance
        >>> inst = PipInstance.from_dense([[0.2, 0.1], [0.5, 0]], [1, 2],
        ...                               [1, 1])
        >>> width_of(inst)
        4.0
    """

    data = inst.A.data
    positive = data > 0
    if not np.any(positive):
        msg = 'Width is undefined since A has no positive entry'
        raise AllZeroMatrixError(msg)

    rows = _entry_rows(inst.A)
    ratios = inst.b[rows[positive]] / data[positive]
    return float(np.min(ratios))


def normalize(inst: PipInstance) -> NormalizedInstance:
    """Scales each row of a PIP so that its constraint reads A_i x <= W.

    Row i is multiplied by W / b_i. Since b_i / A_ij >= W for every
    positive entry, scaled entries lie in [0, 1] and the entry attaining
    the width becomes 1. Scaling leaves the width and the set of feasible
    boolean vectors unchanged.

    Args:
        inst:
            A valid PipInstance with at least one positive entry.

    Returns:
        A NormalizedInstance holding the scaled instance, W, delta0,
        delta1 and the row multipliers.

    Raises:
        InvalidInstanceError: if validate reports any error.
        AllZeroMatrixError: if A has no positive entry.
        WidthBelowOneError: if W < 1, i.e. some item can never be packed.
    """

    errors = [v for v in validate(inst) if v.is_error]
    if errors:
        raise InvalidInstanceError(errors)

    W = width_of(inst)
    if W < 1 - NORMALIZATION_TOL:
        rows = _entry_rows(inst.A)
        over = inst.A.data > inst.b[rows]
        items = sorted(set(inst.A.indices[over].tolist()))
        msg = ('Width {:.6g} is below one; items {} have A_ij > b_i and can '
               'never be packed. Drop these items and retry.')
        raise WidthBelowOneError(msg.format(W, items))

    row_scale = W / inst.b
    scaled = sparse.diags(row_scale) @ inst.A
    scaled = sparse.csr_matrix(scaled)
    # scaled entries are <= 1 in exact arithmetic; remove rounding excess
    np.minimum(scaled.data, 1.0, out=scaled.data)

    base = PipInstance(scaled, np.full(inst.m, W), inst.c, dict(inst.meta))

    columns = base.A.tocsc()
    delta0 = int(np.max(np.diff(columns.indptr)))
    delta1 = float(np.max(np.asarray(columns.sum(axis=0))))

    empty = np.flatnonzero(np.diff(columns.indptr) == 0)
    if empty.size:
        msg = '%d all-zero columns consume no capacity and are always packed'
        logger.warning(msg, empty.size)

    result = NormalizedInstance(base, W, delta0, delta1, row_scale)
    row_scale.setflags(write=False)
    logger.info('Normalized %d x %d instance: W=%.6g delta0=%d delta1=%.6g',
                inst.m, inst.n, W, delta0, delta1)

    return result
