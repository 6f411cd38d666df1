import logging
from dataclasses import dataclass, field
from typing import FrozenSet, Iterable, Optional, Tuple

import networkx as nx
import numpy as np

from src.errors import ConstructionError

logger = logging.getLogger(__name__)

# Tolerance for the doubly stochastic checks on every generated matrix.
STOCHASTIC_TOL = 1e-12
DEFAULT_EPS_HAT = 1e-6


@dataclass(frozen=True)
class Topology:
    # An undirected communication graph on agents 0..N-1. Self-loops are never stored,
    # the self-weight of each agent is implied by the mixing rule.
    num_agents: int
    edges: FrozenSet[Tuple[int, int]]

    def __post_init__(self) -> None:
        if self.num_agents < 1:
            raise ConstructionError(f"num_agents must be positive, got {self.num_agents}")

        normalized = set()
        for i, j in self.edges:
            i, j = int(i), int(j)
            if i == j:
                raise ConstructionError(f"Self-loop on agent {i} is not allowed")
            if not (0 <= i < self.num_agents and 0 <= j < self.num_agents):
                raise ConstructionError(
                    f"Edge ({i}, {j}) references an agent outside [0, {self.num_agents})"
                )
            normalized.add((min(i, j), max(i, j)))
        # Frozen dataclass, so go through object.__setattr__ to store the canonical form.
        object.__setattr__(self, "edges", frozenset(normalized))

    @classmethod
    def from_graph(cls, graph: nx.Graph, num_agents: Optional[int] = None) -> "Topology":
        n = graph.number_of_nodes() if num_agents is None else num_agents
        return cls(n, frozenset(graph.edges()))

    @classmethod
    def from_edges(cls, num_agents: int, edges: Iterable[Tuple[int, int]]) -> "Topology":
        return cls(num_agents, frozenset(tuple(e) for e in edges))

    def to_networkx(self) -> nx.Graph:
        graph = nx.Graph()
        graph.add_nodes_from(range(self.num_agents))
        graph.add_edges_from(self.edges)
        return graph

    def is_connected(self) -> bool:
        return nx.is_connected(self.to_networkx())

    def degrees(self) -> np.ndarray:
        # Neighbor counts, self excluded.
        deg = np.zeros(self.num_agents, dtype=int)
        for i, j in self.edges:
            deg[i] += 1
            deg[j] += 1
        return deg

    def sorted_edges(self):
        return sorted(self.edges)


@dataclass(frozen=True, eq=False)
class MixingMatrix:
    entries: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        entries = np.array(self.entries, dtype=float, copy=True)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
            raise ConstructionError(f"Mixing matrix must be square, got {entries.shape}")
        if not np.all(np.isfinite(entries)):
            raise ConstructionError("Mixing matrix has non-finite entries")
        if np.max(np.abs(entries - entries.T)) > STOCHASTIC_TOL:
            raise ConstructionError("Mixing matrix is not symmetric")
        if np.min(entries) < 0.0 or np.max(entries) > 1.0:
            raise ConstructionError("Mixing matrix entries must lie in [0, 1]")
        row_error = np.max(np.abs(entries.sum(axis=1) - 1.0))
        if row_error > STOCHASTIC_TOL:
            raise ConstructionError(f"Mixing matrix rows do not sum to 1 (off by {row_error:.3e})")

        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)

    @property
    def num_agents(self) -> int:
        return self.entries.shape[0]

    def respects(self, topology: Topology) -> bool:
        # True when every nonzero off-diagonal weight sits on an edge of the topology.
        n = self.num_agents
        if topology.num_agents != n:
            return False
        allowed = np.eye(n, dtype=bool)
        for i, j in topology.edges:
            allowed[i, j] = allowed[j, i] = True
        return bool(np.all(self.entries[~allowed] == 0.0))


def metropolis_weights(topology: Topology, eps_hat: float = DEFAULT_EPS_HAT) -> MixingMatrix:
    # Metropolis constant edge-weight rule:
    #   W_ij = 1 / (max(deg_i, deg_j) + eps_hat) on edges, W_ii = 1 - sum_{j != i} W_ij.
    if eps_hat <= 0:
        raise ConstructionError(f"eps_hat must be positive, got {eps_hat}")
    if not topology.is_connected():
        raise ConstructionError(
            f"Topology on {topology.num_agents} agents with {len(topology.edges)} edges is disconnected"
        )

    n = topology.num_agents
    deg = topology.degrees()
    weights = np.zeros((n, n))
    for i, j in topology.sorted_edges():
        w = 1.0 / (max(deg[i], deg[j]) + eps_hat)
        weights[i, j] = w
        weights[j, i] = w

    # Self weights make every row stochastic, symmetry then gives the columns.
    np.fill_diagonal(weights, 1.0 - weights.sum(axis=1))
    return MixingMatrix(weights)
