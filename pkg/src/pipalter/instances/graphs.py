"""Undirected simple graphs feeding the MIS to PIP reduction.

This module contains the Graph container and the following constructors:

- complete_graph: K_n, whose reduction realizes an Omega(n) integrality gap.
- path_graph: The path v_0 - v_1 - ... - v_{n-1}.
- random_graph: An Erdos-Renyi G(n, p) graph, deterministic per seed.

Examples:
    >>> len(complete_graph(4).edges)
    6
    >>> len(path_graph(1).edges)
    0
"""

from dataclasses import dataclass
import itertools
from typing import FrozenSet, Iterable, Tuple

import networkx as nx
import numpy as np

from pipalter.core import streams


@dataclass(frozen=True)
class Graph:
    """An undirected graph without self-loops on vertices 0..n-1.

    Attributes:
        num_vertices:
            The number of vertices n.
        edges:
            A frozenset of (u, v) vertex pairs with u < v.
    """

    num_vertices: int
    edges: FrozenSet[Tuple[int, int]]

    @classmethod
    def from_edges(cls, num_vertices: int, edges: Iterable[Tuple[int, int]]
    ) -> 'Graph':
        """Builds a Graph from unordered vertex pairs.

        Raises:
            ValueError: if a pair is a self-loop or has an endpoint outside
            of [0, num_vertices).
        """

        if num_vertices < 0:
            msg = 'num_vertices must be nonnegative not {}'
            raise ValueError(msg.format(num_vertices))

        canonical = set()
        for u, v in edges:
            u, v = int(u), int(v)
            if u == v:
                msg = 'Self-loop at vertex {} is not allowed'
                raise ValueError(msg.format(u))
            if not (0 <= u < num_vertices and 0 <= v < num_vertices):
                msg = 'Edge ({}, {}) has an endpoint outside of [0, {})'
                raise ValueError(msg.format(u, v, num_vertices))
            canonical.add((min(u, v), max(u, v)))

        return cls(int(num_vertices), frozenset(canonical))

    @classmethod
    def from_networkx(cls, graph: nx.Graph) -> 'Graph':
        """Builds a Graph from a networkx graph relabeling nodes 0..n-1."""

        relabeled = nx.convert_node_labels_to_integers(graph, ordering='sorted')
        return cls.from_edges(relabeled.number_of_nodes(), relabeled.edges())

    def to_networkx(self) -> nx.Graph:
        """Returns this graph as a networkx Graph."""

        graph = nx.Graph()
        graph.add_nodes_from(range(self.num_vertices))
        graph.add_edges_from(self.edges)
        return graph

    def degrees(self) -> np.ndarray:
        """Returns the degree of every vertex."""

        result = np.zeros(self.num_vertices, dtype=int)
        for u, v in self.edges:
            result[u] += 1
            result[v] += 1
        return result

    def max_degree(self) -> int:
        """Returns the maximum vertex degree (0 for edgeless graphs)."""

        degrees = self.degrees()
        return int(degrees.max()) if degrees.size else 0

    def is_independent(self, vertices: Iterable[int]) -> bool:
        """Returns True if no edge joins two of the given vertices."""

        chosen = set(vertices)
        return not any(u in chosen and v in chosen for u, v in self.edges)


def complete_graph(n: int) -> Graph:
    """Returns the complete graph K_n."""

    return Graph.from_networkx(nx.complete_graph(n))


def path_graph(n: int) -> Graph:
    """Returns the path graph on n vertices."""

    return Graph.from_networkx(nx.path_graph(n))


def random_graph(n: int, p: float, seed: int) -> Graph:
    """Returns a G(n, p) random graph.

    Each of the n(n-1)/2 vertex pairs, taken in lexicographic order, is an
    edge independently with probability p. Draws come from the generator
    stream of seed so equal seeds give equal graphs.

    Args:
        n:
            The number of vertices.
        p:
            The edge probability in [0, 1].
        seed:
            An integer seed.
    """

    if not 0 <= p <= 1:
        msg = 'Edge probability must be in [0, 1] not {}'
        raise ValueError(msg.format(p))

    pairs = list(itertools.combinations(range(n), 2))
    draws = streams.generator_stream(seed).random(len(pairs))
    edges = [pair for pair, u in zip(pairs, draws) if u < p]
    return Graph.from_edges(n, edges)
