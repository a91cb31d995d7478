"""A module for testing graph constructors, the independent set reduction
and the random instance generators.

Typical usage example:
    !pytest test_generators.py::<TEST_NAME>
"""

import pytest
import numpy as np
import networkx as nx

from pipalter.instances.generators import (PROFILES, knapsack_instance,
                                           mis_to_pip, random_instance,
                                           standard_suite)
from pipalter.instances.graphs import (Graph, complete_graph, path_graph,
                                       random_graph)
from pipalter.instances.normalization import normalize, width_of
from pipalter.solvers.oracle import brute_force_opt, exhaustive_opt
from pipalter.solvers.simplex import solve_lp


def independence_number(graph):
    """Returns the size of a maximum independent set of a networkx graph."""

    if graph.number_of_nodes() == 0:
        return 0
    _, size = nx.max_weight_clique(nx.complement(graph), weight=None)
    return size


def test_graph_constructors():
    """Test edge counts of the standard graph families."""

    assert len(complete_graph(4).edges) == 6
    assert len(path_graph(1).edges) == 0
    assert len(path_graph(5).edges) == 4
    assert random_graph(10, 0, seed=3).edges == frozenset()
    assert len(random_graph(6, 1, seed=3).edges) == 15


def test_random_graph_deterministic():
    """Test that random graphs depend only on their seed."""

    assert random_graph(12, 0.3, seed=8) == random_graph(12, 0.3, seed=8)
    assert random_graph(12, 0.3, seed=8) != random_graph(12, 0.3, seed=9)


def test_graph_validation():
    """Test that self-loops and out of range vertices are rejected."""

    with pytest.raises(ValueError):
        Graph.from_edges(3, [(1, 1)])
    with pytest.raises(ValueError):
        Graph.from_edges(3, [(0, 3)])
    with pytest.raises(ValueError):
        random_graph(4, 1.5, seed=0)


def test_networkx_roundtrip():
    """Test conversion to and from networkx graphs."""

    g = Graph.from_edges(5, [(3, 1), (0, 4)])
    assert g.edges == frozenset({(1, 3), (0, 4)})
    assert Graph.from_networkx(g.to_networkx()) == g
    assert g.degrees().tolist() == [1, 1, 0, 1, 1]
    assert g.max_degree() == 1
    assert g.is_independent([0, 1, 2])
    assert not g.is_independent([1, 3])


def test_mis_reduction_matrix():
    """Test the reduction's matrix on the empty graph and on K3."""

    inst = mis_to_pip(Graph.from_edges(3, []))
    assert np.allclose(inst.dense(), np.eye(3))
    assert brute_force_opt(inst).value == 3

    inst = mis_to_pip(complete_graph(3))
    expected = np.full((3, 3), 1 / 3) + np.eye(3) * (2 / 3)
    assert np.allclose(inst.dense(), expected)
    assert np.allclose(inst.b, 1) and np.allclose(inst.c, 1)


def test_mis_reduction_statistics():
    """Test that reductions have width one and delta1 <= 1 + maxdeg / n."""

    for n in range(1, 9):
        for seed in range(3):
            g = random_graph(n, 0.5, seed)
            norm = normalize(mis_to_pip(g))
            assert np.isclose(norm.W, 1)
            assert np.isclose(norm.delta1, 1 + g.max_degree() / n)
            assert norm.delta1 <= 2


def test_mis_reduction_optimum():
    """Test that the PIP optimum equals the independence number on every
    graph of the atlas with at most four vertices and on random graphs
    with up to eight vertices."""

    graphs = [g for g in nx.graph_atlas_g()[:19] if g.number_of_nodes() > 0]
    graphs += [random_graph(n, p, seed).to_networkx()
               for n in range(5, 9) for p in (0.2, 0.5, 0.8)
               for seed in range(5)]
    assert len(graphs) >= 18 + 50
    for graph in graphs:
        inst = mis_to_pip(Graph.from_networkx(graph))
        expected = independence_number(graph)
        assert exhaustive_opt(inst).value == expected
        assert brute_force_opt(inst).value == expected


def test_complete_graph_gap():
    """Test the LP against IP gap of K_n."""

    for n in (6, 12):
        norm = normalize(mis_to_pip(complete_graph(n)))
        assert brute_force_opt(norm.base).value == 1
        assert np.isclose(solve_lp(norm).objective, n ** 2 / (2 * n - 1))


def test_random_instance():
    """Test random instance shapes, pinned entries and determinism."""

    inst = random_instance(1, 1, 3, 1, seed=0)
    assert np.allclose(inst.dense(), [[1]])

    first = random_instance(50, 20, 4, 0.3, seed=5)
    second = random_instance(50, 20, 4, 0.3, seed=5)
    assert np.array_equal(first.dense(), second.dense())
    assert np.array_equal(first.c, second.c)
    assert np.isclose(normalize(first).W, 4, atol=1e-12, rtol=0)
    assert np.all(first.dense().max(axis=0) == 1)

    other = random_instance(50, 20, 4, 0.3, seed=6)
    assert not np.array_equal(first.dense(), other.dense())


def test_random_instance_errors():
    """Test argument validation of random_instance."""

    for args in [(0, 2, 2, 0.5), (2, 0, 2, 0.5), (2, 2, 0.5, 0.5),
                 (2, 2, 2, 0), (2, 2, 2, 1.5)]:
        with pytest.raises(ValueError):
            random_instance(*args, seed=0)


def test_knapsack_profiles():
    """Test the size classes of each knapsack profile."""

    for profile in PROFILES:
        inst = knapsack_instance(1, 1.5, profile, seed=0)
        assert inst.n == 1 and inst.is_feasible([1])

    inst = knapsack_instance(40, 1.5, 'mixedBigSmall', seed=2)
    sizes = inst.dense()[0]
    assert np.any(sizes > 0.25) and np.any(sizes <= 0.25)
    assert np.isclose(width_of(inst), 1.5)

    inst = knapsack_instance(40, 1.5, 'smallItems', seed=2)
    sizes = np.sort(inst.dense()[0])
    assert sizes[-1] == 1 and np.all(sizes[:-1] <= 0.25)

    inst = knapsack_instance(30, 2, 'uniform', seed=2)
    sizes = inst.dense()[0]
    assert np.all((sizes > 0) & (sizes <= 1))
    with pytest.raises(ValueError):
        knapsack_instance(5, 1, 'smallItems', seed=0)
    with pytest.raises(ValueError):
        knapsack_instance(5, 2, 'huge', seed=0)


def test_knapsack_lp_dominates():
    """Test that the LP optimum bounds the IP optimum of a uniform knapsack."""

    inst = knapsack_instance(20, 2, 'uniform', seed=4)
    ip = exhaustive_opt(inst).value
    assert solve_lp(normalize(inst)).objective >= ip - 1e-9


def test_standard_suite(suite):
    """Test the size, order and widths of the standard suite."""

    assert len(suite) == 30
    names = [name for name, _ in suite]
    assert names[0] == '00-random-w2'
    assert names[-1].startswith('29-mis-')
    assert len(set(names)) == 30

    widths = [width_of(inst) for _, inst in suite]
    assert np.allclose(widths[16:22], 1.5)
    assert np.allclose(widths[22:26], 68)
    assert np.allclose(widths[26:], 1)

    again = standard_suite(seed=0)
    for (_, a), (_, b) in zip(suite, again):
        assert np.array_equal(a.dense(), b.dense())
