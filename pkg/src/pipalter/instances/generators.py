"""Generators of packing integer program instances.

This module includes the following functions:

- mis_to_pip: The approximation preserving reduction from maximum
  independent set to PIPs with delta1 <= 2 and width 1.
- random_instance: Random sparse PIPs with an exact target width.
- knapsack_instance: Single constraint knapsacks with uniform, small-item
  or mixed big/small size profiles.
- standard_suite: A named collection of 30 instances spanning every width
  regime, used by feasibility checks and experiment sweeps.

All random generators draw from the generator stream of their seed (see
pipalter.core.streams) so that equal seeds yield identical instances.

Examples:
    >>> from pipalter.instances.graphs import complete_graph
    >>> inst = mis_to_pip(complete_graph(3))
    >>> inst.dense().round(4).tolist()
    [[1.0, 0.3333, 0.3333], [0.3333, 1.0, 0.3333], [0.3333, 0.3333, 1.0]]
"""

from typing import List, Tuple

import numpy as np

from pipalter.core import streams
from pipalter.instances.bases import PipInstance
from pipalter.instances.graphs import Graph, random_graph

PROFILES = ('uniform', 'smallItems', 'mixedBigSmall')


def mis_to_pip(g: Graph) -> PipInstance:
    """Reduces a maximum independent set instance to a PIP.

    The matrix has a unit diagonal and entries 1/n at (u, v) and (v, u)
    for every edge uv; capacities and profits are all one. A boolean
    vector is feasible exactly when its support is an independent set, so
    the PIP optimum equals the independence number of g. Every column sum
    is 1 + deg(v)/n <= 2.

    Args:
        g:
            A Graph with at least one vertex.

    Returns:
        A PipInstance with n = m = g.num_vertices.
    """

    n = g.num_vertices
    if n < 1:
        raise ValueError('The reduction requires at least one vertex')

    A = np.eye(n)
    for u, v in g.edges:
        A[u, v] = A[v, u] = 1 / n

    meta = {'generator': 'mis', 'vertices': n, 'edges': len(g.edges)}
    return PipInstance(A, np.ones(n), np.ones(n), meta)


def random_instance(n: int,
                    m: int,
                    target_width: float,
                    density: float,
                    seed: int,
) -> PipInstance:
    """Returns a random PIP whose width equals target_width exactly.

    Entries are uniform in [0, 1) and kept with probability density. One
    entry per column, in a uniformly chosen row, is then forced to 1 so the
    minimum ratio b_i / A_ij equals target_width. Capacities all equal
    target_width and profits are uniform in [0, 1).

    Args:
        n:
            The number of variables.
        m:
            The number of constraints.
        target_width:
            The width W >= 1 of the instance.
        density:
            The probability in (0, 1] that an entry is nonzero.
        seed:
            An integer seed.
    """

    if n < 1 or m < 1:
        msg = 'n and m must be positive, got n={} and m={}'
        raise ValueError(msg.format(n, m))
    if target_width < 1:
        msg = 'target_width must be at least 1 not {}'
        raise ValueError(msg.format(target_width))
    if not 0 < density <= 1:
        msg = 'density must be in (0, 1] not {}'
        raise ValueError(msg.format(density))

    rng = streams.generator_stream(seed)
    values = rng.random((m, n))
    kept = rng.random((m, n)) < density
    A = values * kept
    A[rng.integers(0, m, size=n), np.arange(n)] = 1.0
    c = rng.random(n)

    meta = {'generator': 'random', 'width': target_width,
            'density': density, 'seed': seed}
    return PipInstance(A, np.full(m, float(target_width)), c, meta)


def knapsack_instance(n: int, W: float, profile: str, seed: int
) -> PipInstance:
    """Returns a single constraint knapsack instance of width W.

    Sizes are relative to the capacity W; one item always has size 1 so
    the width is exactly W. The big/small threshold is eps/2 with
    eps = min(W - 1, 1).

    Args:
        n:
            The number of items.
        W:
            The knapsack capacity (and width).
        profile:
            One of:

            - 'uniform': sizes uniform in (0, 1].
            - 'smallItems': all sizes but the pinned unit item lie in
              (0, eps/2].
            - 'mixedBigSmall': about half the items are big, with sizes in
              (eps/2, 1], and the rest small in (0, eps/2]; both classes
              are nonempty whenever n >= 2.

        seed:
            An integer seed.
    """

    if n < 1:
        msg = 'A knapsack requires at least one item not {}'
        raise ValueError(msg.format(n))
    if profile not in PROFILES:
        msg = 'profile must be one of {} not {}'
        raise ValueError(msg.format(PROFILES, profile))
    if W < 1:
        msg = 'W must be at least 1 not {}'
        raise ValueError(msg.format(W))

    eps = min(W - 1, 1.0)
    if profile != 'uniform' and eps <= 0:
        msg = "Profile '{}' needs W > 1 to split big and small items"
        raise ValueError(msg.format(profile))

    rng = streams.generator_stream(seed)
    half = eps / 2
    if profile == 'uniform':
        sizes = 1 - rng.random(n)
    elif profile == 'smallItems':
        sizes = half * (1 - rng.random(n))
    else:
        nbig = max(1, n // 2)
        big = half + (1 - half) * (1 - rng.random(nbig))
        small = half * (1 - rng.random(n - nbig))
        sizes = rng.permutation(np.concatenate([big, small]))

    # pin a unit item; for the mixed profile it must be a big one
    candidates = np.flatnonzero(sizes > half) if profile == 'mixedBigSmall' \
            else np.arange(n)
    sizes[candidates[rng.integers(0, candidates.size)]] = 1.0
    c = rng.random(n)

    meta = {'generator': 'knapsack', 'profile': profile, 'width': W,
            'seed': seed}
    return PipInstance(sizes.reshape(1, -1), [float(W)], c, meta)


def _subseed(seed: int, index: int) -> int:
    """Derives a deterministic seed for the index-th suite member."""

    state = np.random.SeedSequence([int(seed), int(index)]).generate_state(1)
    return int(state[0])


def standard_suite(seed: int = 0) -> List[Tuple[str, PipInstance]]:
    """Returns 30 named instances covering every width regime.

    The suite holds 10 random PIPs with W in {2, 3, 4}, 6 random PIPs with
    W in {2, 4, 8}, 4 mixed big/small knapsacks and 2 random PIPs with
    W = 1.5, 4 two-row PIPs of width 68 for the large width regime and 4
    MIS reductions of random graphs (width 1).

    Args:
        seed:
            An integer seed from which every member's seed is derived.

    Returns:
        A list of (name, PipInstance) tuples in a fixed order.
    """

    suite = []
    index = 0

    def add(name, inst):
        nonlocal index
        suite.append(('{:02d}-{}'.format(index, name), inst))
        index += 1

    for k in range(10):
        width = (2, 3, 4)[k % 3]
        add('random-w{}'.format(width),
            random_instance(12 + 4 * k, 4 + 2 * k, width, 0.5,
                            _subseed(seed, index)))

    for k, width in enumerate((2, 4, 8, 2, 4, 8)):
        add('random-w{}'.format(width),
            random_instance(30, 10 + k, width, 0.7, _subseed(seed, index)))

    for k in range(4):
        add('knapsack-mixed-w1.5',
            knapsack_instance(10 + 5 * k, 1.5, 'mixedBigSmall',
                              _subseed(seed, index)))

    for k in range(2):
        add('random-w1.5',
            random_instance(20, 6 + 2 * k, 1.5, 0.4, _subseed(seed, index)))

    for k in range(4):
        add('random-w68',
            random_instance(150 + 25 * k, 2, 68, 1.0, _subseed(seed, index)))

    for k in range(4):
        graph = random_graph(6 + k, 0.4, _subseed(seed, index))
        add('mis-{}'.format(graph.num_vertices), mis_to_pip(graph))

    return suite
