"""Queries of the host's memory and processors.

Batched Monte-Carlo trials hold trials x items boolean arrays in memory.
These tools decide how many trials fit into a batch and how many worker
processes an experiment sweep should use.
"""

from typing import Optional, Sequence, Tuple

import numpy as np
import psutil


def _budget(allowable: Optional[int]) -> int:
    """Returns allowable or, if None, the currently available memory."""

    if allowable is None:
        return int(psutil.virtual_memory().available)
    return int(allowable)


def assignable_array(shape: Sequence[int],
                     dtype=float,
                     allowable: Optional[int] = None,
) -> Tuple[bool, int, int]:
    """Compares the bytes a dense array would need against a budget.

    Args:
        shape:
            The dimensions of the array, e.g. (trials, n) for a batch of
            rounded vectors or (m, n + m) for a simplex tableau.
        dtype:
            The element type.
        allowable:
            A budget in bytes. If None, the memory psutil reports as
            available is used.

    Returns:
        A (fits, budget, required) tuple where fits is True when the
        required bytes are strictly below the budget.
    """

    budget = _budget(allowable)
    required = int(np.prod(shape)) * np.dtype(dtype).itemsize
    return required < budget, budget, required


def is_assignable(shape: Sequence[int],
                  dtype=float,
                  allowable: Optional[int] = None,
) -> bool:
    """Returns True if a dense array of shape fits in memory.

    Raises:
        MemoryError: naming the required and available gigabytes if the
        array does not fit.
    """

    fits, budget, required = assignable_array(shape, dtype, allowable)
    if not fits:
        need, have = required / 1e9, budget / 1e9
        msg = 'A {} array needs {:.1f} GB but only {:.1f} GB are available'
        raise MemoryError(msg.format(tuple(shape), need, have))

    return True


def batch_size(width: int,
               requested: int,
               dtype=float,
               fraction: float = 0.1,
               allowable: Optional[int] = None,
) -> int:
    """Returns the number of trial rows of length width to process at once.

    The batch is the smaller of the requested size and the number of rows
    whose float arrays consume at most fraction of available memory.

    Args:
        width:
            Number of columns in each batched row (usually the number of
            items of an instance).
        requested:
            The caller's preferred batch size.
        dtype:
            Element type of the largest batched array.
        fraction:
            Portion of available memory a single batched array may use.
        allowable:
            Memory budget in bytes. If None, the available system memory
            is queried.

    Returns:
        A positive integer batch size.
    """

    allowable = _budget(allowable)
    row_bytes = max(int(width), 1) * np.dtype(dtype).itemsize
    fitting = int(fraction * allowable) // row_bytes
    # a single row must always be processable
    is_assignable((1, max(int(width), 1)), dtype, allowable)

    return max(1, min(int(requested), fitting))


def default_workers() -> int:
    """Returns the number of worker processes to use by default."""

    count = psutil.cpu_count(logical=True)
    return count if count else 1
