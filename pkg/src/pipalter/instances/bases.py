"""Data containers for packing integer programs.

A packing integer program (PIP) maximizes c.x over boolean x subject to
Ax <= b where c, A and b are nonnegative. This module defines the raw
PipInstance, its row-normalized form NormalizedInstance and the Violation
records produced when an instance is validated.

Instances are immutable after construction: their vectors are flagged
read-only and the constraint matrix is stored once in canonical CSR form
(row-major with sorted column indices) since alteration iterates rows.

Examples:
    >>> inst = PipInstance.from_dense([[2, 1], [1, 4]], b=[4, 8], c=[1, 1])
    >>> inst.n, inst.m
    (2, 2)
    >>> inst.dense().tolist()
    [[2.0, 1.0], [1.0, 4.0]]
"""

from dataclasses import dataclass, field
from typing import Dict, Optional, Sequence, Tuple, Union

import numpy as np
import numpy.typing as npt
import scipy.sparse as sparse

from pipalter.core import mixins
from pipalter.core.errors import InstanceFormatError

MatrixLike = Union[npt.ArrayLike, sparse.spmatrix]


def _readonly(arr: np.ndarray) -> np.ndarray:
    """Flags arr as non-writeable and returns it."""

    arr.setflags(write=False)
    return arr


def as_csr(A: MatrixLike) -> sparse.csr_matrix:
    """Converts a dense or sparse matrix to canonical CSR form.

    Explicitly stored zeros are dropped and column indices within each
    row are sorted. Negative and non-finite entries are kept so that
    validation can report them.
    """

    if sparse.issparse(A):
        mat = sparse.csr_matrix(A, dtype=float, copy=True)
    else:
        dense = np.atleast_2d(np.asarray(A, dtype=float))
        if dense.ndim != 2:
            msg = 'A must be a 2-D matrix not an array with {} dims'
            raise InstanceFormatError(msg.format(dense.ndim))
        mat = sparse.csr_matrix(dense)

    mat.sum_duplicates()
    mat.eliminate_zeros()
    mat.sort_indices()

    return mat


@dataclass(frozen=True, repr=False, eq=False)
class PipInstance(mixins.ViewContainer):
    """The raw nonnegative data (c, A, b) of a packing integer program.

    Attributes:
        A:
            An m x n constraint matrix in canonical CSR form.
        b:
            A length m vector of capacities.
        c:
            A length n objective vector.
        meta:
            Free-form metadata carried along from instance files.

    Invariants such as nonnegativity are not enforced at construction so
    that invalid data can be loaded and diagnosed by
    pipalter.instances.normalization.validate.
    """

    A: sparse.csr_matrix
    b: npt.NDArray[np.float64]
    c: npt.NDArray[np.float64]
    meta: Dict = field(default_factory=dict)

    def __post_init__(self):
        """Coerces the fields to canonical read-only arrays."""

        b = _readonly(np.array(self.b, dtype=float).reshape(-1))
        c = _readonly(np.array(self.c, dtype=float).reshape(-1))
        A = as_csr(self.A)

        if A.shape != (b.size, c.size):
            msg = 'A has shape {} but b and c imply shape {}'
            raise InstanceFormatError(msg.format(A.shape, (b.size, c.size)))

        # frozen dataclass fields are assigned through object
        object.__setattr__(self, 'A', A)
        object.__setattr__(self, 'b', b)
        object.__setattr__(self, 'c', c)

    @classmethod
    def from_dense(cls,
                   A: npt.ArrayLike,
                   b: npt.ArrayLike,
                   c: npt.ArrayLike,
                   meta: Optional[Dict] = None,
    ) -> 'PipInstance':
        """Builds an instance from a dense nested sequence or ndarray A."""

        return cls(np.atleast_2d(np.asarray(A, dtype=float)), b, c,
                   dict(meta or {}))

    @classmethod
    def from_sparse(cls,
                    triples: Sequence[Sequence[float]],
                    shape: Tuple[int, int],
                    b: npt.ArrayLike,
                    c: npt.ArrayLike,
                    meta: Optional[Dict] = None,
    ) -> 'PipInstance':
        """Builds an instance from (i, j, value) coordinate triples.

        Raises:
            InstanceFormatError: if a triple is malformed, out of range or
            if an (i, j) pair repeats.
        """

        m, n = int(shape[0]), int(shape[1])
        seen = set()
        rows, cols, vals = [], [], []
        for triple in triples:
            if len(triple) != 3:
                msg = 'Sparse entries must be [i, j, value] triples not {}'
                raise InstanceFormatError(msg.format(triple))

            i, j, v = triple
            if int(i) != i or int(j) != j:
                msg = 'Sparse indices must be integers not {}'
                raise InstanceFormatError(msg.format(triple))

            i, j = int(i), int(j)
            if not (0 <= i < m and 0 <= j < n):
                msg = 'Sparse entry ({}, {}) is outside of shape {}'
                raise InstanceFormatError(msg.format(i, j, (m, n)))

            if (i, j) in seen:
                msg = 'Sparse entry ({}, {}) is repeated'
                raise InstanceFormatError(msg.format(i, j))

            seen.add((i, j))
            rows.append(i)
            cols.append(j)
            vals.append(float(v))

        A = sparse.coo_matrix((vals, (rows, cols)), shape=(m, n))
        return cls(A, b, c, dict(meta or {}))

    @property
    def n(self) -> int:
        """Returns the number of variables."""

        return self.c.size

    @property
    def m(self) -> int:
        """Returns the number of constraints."""

        return self.b.size

    def dense(self) -> npt.NDArray[np.float64]:
        """Returns the constraint matrix as a dense ndarray."""

        return self.A.toarray()

    def row(self, i: int) -> Tuple[npt.NDArray[np.int64],
                                  npt.NDArray[np.float64]]:
        """Returns the column indices and values stored in row i."""

        start, stop = self.A.indptr[i], self.A.indptr[i + 1]
        return self.A.indices[start:stop], self.A.data[start:stop]

    def loads(self, x: npt.ArrayLike) -> npt.NDArray[np.float64]:
        """Returns the constraint loads Ax of a vector x."""

        return self.A @ np.asarray(x, dtype=float)

    def value(self, x: npt.ArrayLike) -> float:
        """Returns the objective value c.x of a vector x."""

        return float(self.c @ np.asarray(x, dtype=float))

    def is_feasible(self, x: npt.ArrayLike, tol: float = 1e-9) -> bool:
        """Returns True if Ax <= b + tol componentwise."""

        return bool(np.all(self.loads(x) <= self.b + tol))


@dataclass(frozen=True, repr=False, eq=False)
class NormalizedInstance(mixins.ViewContainer):
    """A row-scaled PIP whose constraints all read A_i x <= W.

    Attributes:
        base:
            The PipInstance after row scaling. Every capacity equals W and
            all entries of A lie in [0, 1] with maximum 1.
        W:
            The width of the instance, unchanged by scaling.
        delta0:
            The l0 column sparsity; the max number of nonzeros in a column.
        delta1:
            The l1 column sparsity; the max column sum after scaling.
        row_scale:
            The m multipliers W / b_i applied to the raw rows.
    """

    base: PipInstance
    W: float
    delta0: int
    delta1: float
    row_scale: npt.NDArray[np.float64]

    @property
    def n(self) -> int:
        """Returns the number of variables."""

        return self.base.n

    @property
    def m(self) -> int:
        """Returns the number of constraints."""

        return self.base.m

    @property
    def A(self) -> sparse.csr_matrix:
        """Returns the normalized constraint matrix."""

        return self.base.A

    @property
    def c(self) -> npt.NDArray[np.float64]:
        """Returns the objective vector."""

        return self.base.c

    @property
    def b(self) -> npt.NDArray[np.float64]:
        """Returns the capacity vector (all entries equal W)."""

        return self.base.b

    def column_sums(self) -> npt.NDArray[np.float64]:
        """Returns the l1 norm of every normalized column."""

        return np.asarray(self.A.sum(axis=0)).reshape(-1)

    def zero_columns(self) -> npt.NDArray[np.int64]:
        """Returns the indices of items that consume no capacity."""

        return np.flatnonzero(np.diff(self.A.tocsc().indptr) == 0)


@dataclass(frozen=True)
class Violation:
    """A violated structural invariant of a PipInstance.

    Attributes:
        kind:
            The invariant name, e.g. 'NegativeEntry' or
            'NonpositiveCapacity'.
        index:
            The coordinates of the offending entry.
        severity:
            'error' for violations that make an instance unusable and
            'warning' for permitted but flagged structure such as all-zero
            columns.
    """

    kind: str
    index: Tuple[int, ...] = ()
    severity: str = 'error'

    @property
    def is_error(self) -> bool:
        """Returns True if this violation makes the instance invalid."""

        return self.severity == 'error'

    def __str__(self) -> str:
        """Returns a compact 'Kind(i, j)' string."""

        return '{}({})'.format(self.kind, ', '.join(map(str, self.index)))
