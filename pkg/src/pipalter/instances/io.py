"""Reading and writing instance, solution and graph files.

Instance files are UTF-8 JSON documents:

    {"n": int, "m": int, "c": [real...], "b": [real...],
     "A": {"dense": [[real...]...]} | {"sparse": [[i, j, v]...]},
     "meta": {optional free-form}}

Indices are 0-based and sparse triples may not repeat an (i, j) pair.
Graphs are read from edge-list text files holding one "u v" pair of
0-based vertex indices per line.

Examples:
    >>> import tempfile
    >>> from pathlib import Path
    >>> from pipalter.instances.bases import PipInstance
    >>> inst = PipInstance.from_dense([[1, 0.5]], b=[2], c=[1, 1])
    >>> path = Path(tempfile.mkdtemp()).joinpath('inst.json')
    >>> write_instance(inst, path)
    >>> read_instance(path).dense().tolist()
    [[1.0, 0.5]]
"""

import json
from pathlib import Path
from typing import Dict, Optional, Sequence, Union

import numpy as np
import numpy.typing as npt

from pipalter.core.errors import InstanceFormatError
from pipalter.instances.bases import PipInstance
from pipalter.instances.graphs import Graph

PathLike = Union[str, Path]


def instance_from_dict(doc: Dict) -> PipInstance:
    """Builds a PipInstance from a parsed instance document.

    Raises:
        InstanceFormatError: if required keys are missing, the declared
        sizes disagree with the data or A is neither dense nor sparse.
    """

    missing = [key for key in ('n', 'm', 'c', 'b', 'A') if key not in doc]
    if missing:
        msg = 'Instance document is missing keys {}'
        raise InstanceFormatError(msg.format(missing))

    n, m = doc['n'], doc['m']
    if not (isinstance(n, int) and isinstance(m, int)) or n < 1 or m < 1:
        msg = 'n and m must be positive integers, got n={} and m={}'
        raise InstanceFormatError(msg.format(n, m))

    c, b = doc['c'], doc['b']
    if not (isinstance(c, list) and isinstance(b, list)):
        msg = 'c and b must be lists of numbers, got {} and {}'
        raise InstanceFormatError(msg.format(type(c).__name__,
                                             type(b).__name__))
    if len(c) != n or len(b) != m:
        msg = 'Expected {} objective and {} capacity values, got {} and {}'
        raise InstanceFormatError(msg.format(n, m, len(c), len(b)))

    matrix, meta = doc['A'], doc.get('meta') or {}
    if not isinstance(matrix, dict) or len(matrix) != 1:
        msg = "A must be an object with exactly one key 'dense' or 'sparse'"
        raise InstanceFormatError(msg)

    try:
        if 'dense' in matrix:
            A = np.array(matrix['dense'], dtype=float)
            if A.shape != (m, n):
                msg = 'Dense A has shape {} but n={} and m={}'
                raise InstanceFormatError(msg.format(A.shape, n, m))
            return PipInstance(A, b, c, dict(meta))

        if 'sparse' in matrix:
            return PipInstance.from_sparse(matrix['sparse'], (m, n), b, c,
                                           dict(meta))
    except (TypeError, ValueError) as exc:
        if isinstance(exc, InstanceFormatError):
            raise
        msg = 'Instance data could not be converted to numbers: {}'
        raise InstanceFormatError(msg.format(exc)) from exc

    msg = "Unknown matrix format {}; expected 'dense' or 'sparse'"
    raise InstanceFormatError(msg.format(list(matrix)))


def instance_to_dict(inst: PipInstance, fmt: str = 'sparse') -> Dict:
    """Returns the JSON-ready instance document of inst.

    Args:
        inst:
            The instance to serialize.
        fmt:
            'sparse' to store coordinate triples or 'dense' to store the
            full matrix.
    """

    if fmt == 'dense':
        matrix = {'dense': inst.dense().tolist()}
    elif fmt == 'sparse':
        coo = inst.A.tocoo()
        triples = sorted(zip(coo.row.tolist(), coo.col.tolist(),
                             coo.data.tolist()))
        matrix = {'sparse': [list(t) for t in triples]}
    else:
        msg = "fmt must be one of 'dense' or 'sparse' not {}"
        raise ValueError(msg.format(fmt))

    return {'n': inst.n, 'm': inst.m, 'c': inst.c.tolist(),
            'b': inst.b.tolist(), 'A': matrix, 'meta': dict(inst.meta)}


def read_instance(path: PathLike) -> PipInstance:
    """Reads a JSON instance file into a PipInstance."""

    try:
        with open(path, 'r', encoding='utf-8') as infile:
            doc = json.load(infile)
    except json.JSONDecodeError as exc:
        msg = 'File {} is not valid JSON: {}'
        raise InstanceFormatError(msg.format(path, exc)) from exc

    if not isinstance(doc, dict):
        msg = 'File {} does not hold a JSON object'
        raise InstanceFormatError(msg.format(path))

    return instance_from_dict(doc)


def write_instance(inst: PipInstance, path: PathLike, fmt: str = 'sparse'
) -> None:
    """Writes inst to a JSON instance file."""

    with open(path, 'w', encoding='utf-8') as outfile:
        json.dump(instance_to_dict(inst, fmt), outfile, indent=1)
        outfile.write('\n')


def write_json(doc: Dict, path: PathLike) -> None:
    """Writes a JSON document such as a solution record to path."""

    with open(path, 'w', encoding='utf-8') as outfile:
        json.dump(doc, outfile, indent=1)
        outfile.write('\n')


def read_edge_list(path: PathLike, num_vertices: Optional[int] = None
) -> Graph:
    """Reads a graph from a text file of 0-based "u v" lines.

    Blank lines and lines starting with '#' are skipped.

    Args:
        path:
            The edge-list file.
        num_vertices:
            The number of vertices. If None, one more than the largest
            vertex index in the file. Pass it to keep trailing isolated
            vertices.
    """

    edges = []
    with open(path, 'r', encoding='utf-8') as infile:
        for lineno, line in enumerate(infile, 1):
            text = line.strip()
            if not text or text.startswith('#'):
                continue

            parts = text.split()
            if len(parts) != 2 or not all(p.isdigit() for p in parts):
                msg = 'Line {} of {} is not a "u v" vertex pair: {!r}'
                raise InstanceFormatError(msg.format(lineno, path, text))
            edges.append((int(parts[0]), int(parts[1])))

    if num_vertices is None:
        num_vertices = 1 + max((max(e) for e in edges), default=0)

    return Graph.from_edges(num_vertices, edges)


def check_solution(inst: PipInstance,
                   x: Sequence[float],
                   tol: float = 1e-9,
) -> bool:
    """Independently verifies a 0/1 solution against a raw instance.

    The check uses only the raw file data: x must be boolean, of length n
    and satisfy Ax <= b up to a tolerance relative to each capacity.
    """

    arr: npt.NDArray = np.asarray(x, dtype=float)
    if arr.shape != (inst.n,) or not np.all((arr == 0) | (arr == 1)):
        return False

    loads = inst.A @ arr
    return bool(np.all(loads <= inst.b * (1 + tol) + tol))
