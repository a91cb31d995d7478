"""Chunked iteration over trial indices.

Round-and-alter experiments run up to hundreds of thousands of trials.
Holding every rounded vector at once is wasteful so trials are processed
in batches whose size is bounded by available memory. A Batches instance
is a multi-transversal iterable (not an iterator) yielding half-open
(start, stop) trial ranges.

Examples:
    >>> batches = Batches(10, chunksize=4)
    >>> list(batches)
    [(0, 4), (4, 8), (8, 10)]
    >>> len(batches)
    3
"""

from collections import abc
import itertools
from typing import Iterator, Tuple

from pipalter.core import mixins


class Batches(abc.Iterable, mixins.ViewInstance):
    """An iterable of (start, stop) trial ranges of length chunksize.

    Attrs:
        total:
            The number of trials to partition.
        chunksize:
            The maximum number of trials per yielded range.
        offset:
            The index of the first trial. Ranges are shifted by offset so
            a sweep can resume or split trial ranges between workers.
    """

    def __init__(self, total: int, chunksize: int, offset: int = 0) -> None:
        """Initialize with the number of trials and a chunksize."""

        if chunksize < 1:
            msg = 'chunksize must be a positive integer not {}'
            raise ValueError(msg.format(chunksize))

        self.total = int(total)
        self._chunksize = int(chunksize)
        self.offset = int(offset)

    @property
    def chunksize(self) -> int:
        """Returns the chunksize of these Batches."""

        return self._chunksize

    @chunksize.setter
    def chunksize(self, value: int) -> None:
        """Sets the chunksize ensuring it is int type."""

        self._chunksize = int(value)

    def __len__(self) -> int:
        """Returns the number of ranges this iterable yields."""

        return -(-self.total // self._chunksize) if self.total > 0 else 0

    def __iter__(self) -> Iterator[Tuple[int, int]]:
        """Returns an iterator of (start, stop) trial index pairs."""

        stop = self.offset + self.total
        starts = range(self.offset, stop, self._chunksize)
        for start, end in itertools.zip_longest(starts, starts[1:],
                                                fillvalue=stop):
            yield start, end
