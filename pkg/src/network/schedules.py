import hashlib
import json
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np

from src.errors import ConstructionError
from src.network.topology import (
    DEFAULT_EPS_HAT,
    MixingMatrix,
    Topology,
    metropolis_weights,
)

logger = logging.getLogger(__name__)

# Mixed into the graph RNG seed so schedule generation never shares a stream with
# sampler noise drawn from the same integer seed.
GRAPH_STREAM = 0x6772617068

DEFAULT_PERIOD = 50


@dataclass(frozen=True, eq=False)
class GraphSchedule:
    # A cyclic sequence of mixing matrices. at(k) returns matrices[k mod period].
    generator: str
    num_agents: int
    matrices: Tuple[MixingMatrix, ...] = field(repr=False)
    topologies: Tuple[Optional[Topology], ...] = field(repr=False)
    seed: Optional[int] = None
    window: Optional[int] = None
    eps_hat: float = DEFAULT_EPS_HAT
    params: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not self.matrices:
            raise ConstructionError("A schedule needs at least one mixing matrix")
        if len(self.topologies) != len(self.matrices):
            raise ConstructionError("Schedule topologies and matrices differ in length")
        for matrix in self.matrices:
            if matrix.num_agents != self.num_agents:
                raise ConstructionError(
                    f"Schedule entry has {matrix.num_agents} agents, expected {self.num_agents}"
                )
        if self.window is not None and self.window < 1:
            raise ConstructionError(f"window must be positive, got {self.window}")

    @property
    def period(self) -> int:
        return len(self.matrices)

    @property
    def default_window(self) -> int:
        return self.window if self.window is not None else self.period

    def at(self, k: int) -> MixingMatrix:
        return self.matrices[k % self.period]

    def stacked(self) -> np.ndarray:
        return np.stack([m.entries for m in self.matrices])

    def digest(self) -> str:
        # SHA-256 over the raw matrix bytes, recorded in provenance.
        h = hashlib.sha256()
        h.update(f"{self.generator}:{self.num_agents}:{self.period}".encode("utf-8"))
        for matrix in self.matrices:
            h.update(np.ascontiguousarray(matrix.entries).tobytes())
        return h.hexdigest()

    def to_json(self) -> Dict[str, Any]:
        entries: List[Any] = []
        for topology, matrix in zip(self.topologies, self.matrices):
            if topology is None:
                entries.append({"matrix": matrix.entries.tolist()})
            else:
                entries.append({"edges": [list(e) for e in topology.sorted_edges()]})
        return {
            "generator": self.generator,
            "num_agents": self.num_agents,
            "period": self.period,
            "seed": self.seed,
            "window": self.window,
            "eps_hat": self.eps_hat,
            "params": self.params,
            "entries": entries,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)

    @classmethod
    def from_json(cls, document: Dict[str, Any]) -> "GraphSchedule":
        try:
            n = int(document["num_agents"])
            eps_hat = float(document.get("eps_hat", DEFAULT_EPS_HAT))
            raw_entries = document["entries"]
        except (KeyError, TypeError, ValueError) as e:
            raise ConstructionError(f"Malformed schedule document: {e}") from e

        matrices = []
        topologies: List[Optional[Topology]] = []
        for entry in raw_entries:
            if "edges" in entry:
                topology = Topology.from_edges(n, entry["edges"])
                matrices.append(metropolis_weights(topology, eps_hat))
                topologies.append(topology)
            else:
                matrices.append(MixingMatrix(np.asarray(entry["matrix"], dtype=float)))
                topologies.append(None)

        return cls(
            generator=document.get("generator", "custom"),
            num_agents=n,
            matrices=tuple(matrices),
            topologies=tuple(topologies),
            seed=document.get("seed"),
            window=document.get("window"),
            eps_hat=eps_hat,
            params=dict(document.get("params") or {}),
        )


def _graph_rng(seed: Optional[int]) -> np.random.Generator:
    if seed is None:
        return np.random.default_rng()
    return np.random.default_rng([int(seed), GRAPH_STREAM])


def _check_period(period: int) -> None:
    if period < 1:
        raise ConstructionError(f"period must be positive, got {period}")


def _build(
    generator: str,
    num_agents: int,
    graphs: Sequence[nx.Graph],
    seed: Optional[int],
    eps_hat: float,
    window: Optional[int],
    params: Dict[str, Any],
) -> GraphSchedule:
    topologies = []
    matrices = []
    for k, graph in enumerate(graphs):
        topology = Topology.from_graph(graph, num_agents)
        # metropolis_weights rejects disconnected entries.
        try:
            matrices.append(metropolis_weights(topology, eps_hat))
        except ConstructionError as e:
            raise ConstructionError(f"{generator} schedule entry {k}: {e}") from e
        topologies.append(topology)

    schedule = GraphSchedule(
        generator=generator,
        num_agents=num_agents,
        matrices=tuple(matrices),
        topologies=tuple(topologies),
        seed=seed,
        window=window,
        eps_hat=eps_hat,
        params=params,
    )
    logger.debug("Built %s schedule: N=%d, period=%d", generator, num_agents, schedule.period)
    return schedule


def barbell_schedule(
    num_agents: int,
    period: int = DEFAULT_PERIOD,
    seed: Optional[int] = None,
    eps_hat: float = DEFAULT_EPS_HAT,
    window: Optional[int] = None,
) -> GraphSchedule:
    # Two complete graphs on N/2 agents each, bridged by one uniformly random cross
    # edge that is redrawn for every entry of the period.
    if num_agents % 2 != 0:
        raise ConstructionError(f"Barbell schedules need an even number of agents, got {num_agents}")
    if num_agents < 4:
        raise ConstructionError(f"Barbell schedules need at least 4 agents, got {num_agents}")
    _check_period(period)

    rng = _graph_rng(seed)
    half = num_agents // 2
    left = range(half)
    right = range(half, num_agents)
    cliques = nx.union(nx.complete_graph(left), nx.complete_graph(right))

    graphs = []
    for _ in range(period):
        graph = cliques.copy()
        graph.add_edge(int(rng.integers(0, half)), int(rng.integers(half, num_agents)))
        graphs.append(graph)

    return _build(
        "barbell", num_agents, graphs, seed, eps_hat, window, {"period": period}
    )


def lollipop_schedule(
    num_agents: int,
    branch_range: Tuple[int, int] = (3, 4),
    attach_count: int = 3,
    period: int = DEFAULT_PERIOD,
    seed: Optional[int] = None,
    eps_hat: float = DEFAULT_EPS_HAT,
    window: Optional[int] = None,
) -> GraphSchedule:
    # Generalized lollipop: a path on N' agents (N' drawn from branch_range per entry)
    # and a clique on the remaining N - N'. attach_count distinct clique agents are
    # joined to the path's terminal node, the agent with the smallest index.
    low, high = int(branch_range[0]), int(branch_range[1])
    if low < 1 or low > high:
        raise ConstructionError(f"Invalid branch_range {branch_range}")
    if attach_count < 1:
        raise ConstructionError(f"attach_count must be positive, got {attach_count}")
    if num_agents - high < attach_count + 1:
        raise ConstructionError(
            f"attach_count={attach_count} is infeasible for N={num_agents} with branch_range {branch_range}"
        )
    _check_period(period)

    rng = _graph_rng(seed)
    graphs = []
    for _ in range(period):
        branch = int(rng.integers(low, high + 1))
        graph = nx.path_graph(branch)
        graph = nx.union(graph, nx.complete_graph(range(branch, num_agents)))
        attached = rng.choice(np.arange(branch, num_agents), size=attach_count, replace=False)
        for agent in sorted(int(a) for a in attached):
            graph.add_edge(0, agent)
        graphs.append(graph)

    params = {
        "period": period,
        "branch_range": [low, high],
        "attach_count": attach_count,
    }
    return _build("lollipop", num_agents, graphs, seed, eps_hat, window, params)


def static_complete_schedule(
    num_agents: int, eps_hat: float = DEFAULT_EPS_HAT, window: Optional[int] = None
) -> GraphSchedule:
    if num_agents < 2:
        raise ConstructionError(f"A complete schedule needs at least 2 agents, got {num_agents}")
    return _build(
        "complete",
        num_agents,
        [nx.complete_graph(num_agents)],
        None,
        eps_hat,
        window,
        {"period": 1},
    )


def fixed_schedule(matrix: np.ndarray, window: Optional[int] = None) -> GraphSchedule:
    # Period-1 schedule from a hand-given doubly stochastic matrix.
    mixing = matrix if isinstance(matrix, MixingMatrix) else MixingMatrix(np.asarray(matrix))
    return GraphSchedule(
        generator="fixed",
        num_agents=mixing.num_agents,
        matrices=(mixing,),
        topologies=(None,),
        window=window,
    )


def schedule_from_spec(spec: Dict[str, Any]) -> GraphSchedule:
    # Builds a schedule from the "graph" block of an experiment config.
    kind = spec.get("kind", "barbell")
    n = int(spec.get("num_agents", 20))
    eps_hat = float(spec.get("eps_hat", DEFAULT_EPS_HAT))
    window = spec.get("window")

    if kind == "barbell":
        return barbell_schedule(
            n, int(spec.get("period", DEFAULT_PERIOD)), spec.get("seed"), eps_hat, window
        )
    if kind == "lollipop":
        return lollipop_schedule(
            n,
            tuple(spec.get("branch_range", (3, 4))),
            int(spec.get("attach_count", 3)),
            int(spec.get("period", DEFAULT_PERIOD)),
            spec.get("seed"),
            eps_hat,
            window,
        )
    if kind == "complete":
        return static_complete_schedule(n, eps_hat, window)
    raise ConstructionError(f"Unknown graph kind '{kind}'")
