"""
NetworkBuilder: turns a network configuration section into a NetworkSpec.

Graphs come from networkx; weights follow the Metropolis rule (symmetric,
doubly stochastic) or the uniform averaging rule a_{lk} = 1/|N_k|
(left-stochastic only).
"""

from logging import Logger
from typing import List, Optional

import networkx as nx
import numpy as np

from helpers.constants import SAMPLING_PROB_RANGE
from helpers.errors import NetworkError
from helpers.utils import as_vector
from models.experiment import GraphKind, NetworkSection, WeightRule
from models.network import Mode, NetworkSpec

MAX_GRAPH_ATTEMPTS = 1000


class NetworkBuilder:
    """Build graphs, combination weights and sampling probabilities."""

    @staticmethod
    def build_graph(
        kind: GraphKind,
        K: int,
        rng: np.random.Generator,
        edge_prob: float = 0.4,
        ws_neighbors: int = 4,
        ws_rewire: float = 0.2,
    ) -> nx.Graph:
        """
        Generate a connected undirected graph on K nodes.

        Random families are re-drawn (with fresh seeds from ``rng``) until the
        graph is connected.

        Raises:
            NetworkError: no connected draw within MAX_GRAPH_ATTEMPTS
        """
        if K == 1:
            graph = nx.Graph()
            graph.add_node(0)
            return graph
        if kind == GraphKind.RING:
            return nx.cycle_graph(K) if K > 2 else nx.path_graph(K)
        if kind == GraphKind.COMPLETE:
            return nx.complete_graph(K)

        for _ in range(MAX_GRAPH_ATTEMPTS):
            seed = int(rng.integers(0, 2**31 - 1))
            if kind == GraphKind.ERDOS_RENYI:
                graph = nx.erdos_renyi_graph(K, edge_prob, seed=seed)
            else:
                graph = nx.watts_strogatz_graph(K, min(ws_neighbors, K - 1), ws_rewire, seed=seed)
            if nx.is_connected(graph):
                return graph
        raise NetworkError(f"Could not draw a connected {kind.value} graph on {K} nodes")

    @staticmethod
    def neighborhoods(graph: nx.Graph) -> List[List[int]]:
        """N_k = {k} ∪ neighbours of k."""
        return [sorted({k, *graph.neighbors(k)}) for k in sorted(graph.nodes)]

    @staticmethod
    def metropolis_weights(graph: nx.Graph) -> np.ndarray:
        """a_{lk} = 1/(1 + max(deg_l, deg_k)) on edges, residual on the diagonal."""
        K = graph.number_of_nodes()
        A = np.zeros((K, K))
        degree = dict(graph.degree())
        for l, k in graph.edges():
            if l == k:
                continue
            A[l, k] = A[k, l] = 1.0 / (1.0 + max(degree[l], degree[k]))
        A[np.diag_indices(K)] = 1.0 - A.sum(axis=0)
        return A

    @staticmethod
    def uniform_weights(graph: nx.Graph) -> np.ndarray:
        """a_{lk} = 1/|N_k| for l ∈ N_k (column k averages its neighbourhood)."""
        K = graph.number_of_nodes()
        A = np.zeros((K, K))
        for k, hood in enumerate(NetworkBuilder.neighborhoods(graph)):
            A[hood, k] = 1.0 / len(hood)
        return A

    @staticmethod
    def random_sampling_probs(
        neighborhoods: List[List[int]],
        rng: np.random.Generator,
        low: float = SAMPLING_PROB_RANGE[0],
        high: float = SAMPLING_PROB_RANGE[1],
    ) -> np.ndarray:
        """Q[l, k] ~ U(low, high) for l ∈ N_k \\ {k}; 1 on the diagonal, 0 elsewhere."""
        K = len(neighborhoods)
        Q = np.zeros((K, K))
        for k, hood in enumerate(neighborhoods):
            for l in hood:
                Q[l, k] = 1.0 if l == k else rng.uniform(low, high)
        return Q

    @staticmethod
    def from_section(
        section: NetworkSection,
        rng: np.random.Generator,
        logger: Optional[Logger] = None,
    ) -> NetworkSpec:
        """
        Build the NetworkSpec described by a configuration section.

        Federated modes force a full mesh with A = (1/K)·11ᵀ and Q ≡ 1;
        fedsgd also forces q ≡ 1.

        Args:
            section: network section of the experiment config
            rng: generator for graph and sampling-probability draws
            logger: optional logger for a one-line summary

        Returns:
            NetworkSpec (not yet validated)
        """
        K = section.K
        q = as_vector(section.q, K, "q")

        if section.mode in (Mode.FEDSGD, Mode.FEDAVG):
            full = [list(range(K)) for _ in range(K)]
            if section.mode == Mode.FEDSGD:
                q = np.ones(K)
            spec = NetworkSpec(
                K=K,
                neighborhoods=full,
                A=np.full((K, K), 1.0 / K),
                q=q,
                Q=np.ones((K, K)),
                mode=section.mode,
            )
            if logger:
                logger.info("🌐 Federated network (%s) with K=%d", section.mode.value, K)
            return spec

        if section.A is not None:
            A = np.asarray(section.A, dtype=float)
            hoods = [sorted({k, *np.flatnonzero(A[:, k] > 0.0).tolist()}) for k in range(K)]
        else:
            graph = NetworkBuilder.build_graph(
                section.graph,
                K,
                rng,
                edge_prob=section.edge_prob,
                ws_neighbors=section.ws_neighbors,
                ws_rewire=section.ws_rewire,
            )
            hoods = NetworkBuilder.neighborhoods(graph)
            if section.weights == WeightRule.METROPOLIS:
                A = NetworkBuilder.metropolis_weights(graph)
            else:
                A = NetworkBuilder.uniform_weights(graph)

        if section.Q is None:
            Q = NetworkBuilder.random_sampling_probs(hoods, rng, *section.q_range)
        elif isinstance(section.Q, (int, float)):
            Q = np.zeros((K, K))
            for k, hood in enumerate(hoods):
                Q[hood, k] = float(section.Q)
            Q[np.diag_indices(K)] = 1.0
        else:
            Q = np.asarray(section.Q, dtype=float)

        if logger:
            degrees = [len(h) - 1 for h in hoods]
            logger.info(
                "🌐 Decentralized network: K=%d, mean degree %.2f, weights=%s",
                K,
                float(np.mean(degrees)),
                "explicit" if section.A is not None else section.weights.value,
            )

        return NetworkSpec(K=K, neighborhoods=hoods, A=A, q=q, Q=Q, mode=Mode.DECENTRALIZED)
