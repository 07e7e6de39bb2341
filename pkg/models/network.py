"""
Pydantic models describing the agent network.

A NetworkSpec bundles the graph (neighborhoods), the deterministic base
combination matrix A, and the participation / neighbour-sampling
probabilities that drive the random combination matrices.
"""

from enum import Enum
from typing import List

import numpy as np
from pydantic import Field, field_validator, model_validator

from models.base import ArrayModel, frozen_array


class Mode(str, Enum):
    """Operating mode of the network."""

    DECENTRALIZED = "decentralized"
    FEDSGD = "fedsgd"
    FEDAVG = "fedavg"


class NetworkSpec(ArrayModel):
    """
    Agent network with its base combination matrix and sampling law.

    Attributes:
        K: number of agents
        neighborhoods: neighborhoods[k] is the sorted index set N_k, containing k
        A: K×K left-stochastic base matrix, A[l, k] is the weight agent k gives agent l
        q: participation probabilities q_k
        Q: Q[l, k] is the probability that agent k samples neighbour l (l in N_k \\ {k});
           entries outside the neighbourhoods are ignored
        mode: decentralized, fedsgd or fedavg
    """

    K: int = Field(..., ge=1, description="Number of agents")
    neighborhoods: List[List[int]] = Field(..., description="Neighborhood of each agent")
    A: np.ndarray = Field(..., description="Base combination matrix")
    q: np.ndarray = Field(..., description="Participation probabilities")
    Q: np.ndarray = Field(..., description="Neighbour sampling probabilities")
    mode: Mode = Field(Mode.DECENTRALIZED, description="Operating mode")

    @field_validator("A", "q", "Q", mode="before")
    @classmethod
    def _to_array(cls, value):
        return frozen_array(value)

    @field_validator("neighborhoods")
    @classmethod
    def _sort_neighborhoods(cls, value: List[List[int]]) -> List[List[int]]:
        return [sorted(set(int(v) for v in hood)) for hood in value]

    @model_validator(mode="after")
    def _check_shapes(self) -> "NetworkSpec":
        K = self.K
        if self.A.shape != (K, K):
            raise ValueError(f"A must be {K}x{K}, got {self.A.shape}")
        if self.Q.shape != (K, K):
            raise ValueError(f"Q must be {K}x{K}, got {self.Q.shape}")
        if self.q.shape != (K,):
            raise ValueError(f"q must have {K} entries, got {self.q.shape}")
        if len(self.neighborhoods) != K:
            raise ValueError(f"Expected {K} neighborhoods, got {len(self.neighborhoods)}")
        for k, hood in enumerate(self.neighborhoods):
            if k not in hood:
                raise ValueError(f"Neighborhood of agent {k} must contain {k}")
            if hood and (hood[0] < 0 or hood[-1] >= K):
                raise ValueError(f"Neighborhood of agent {k} has out-of-range indices")
        for name, arr in (("q", self.q), ("Q", self.Q)):
            if not np.all(np.isfinite(arr)) or arr.min() < 0.0 or arr.max() > 1.0:
                raise ValueError(f"Probabilities in {name} must lie in [0, 1]")
        return self

    def others(self, k: int) -> List[int]:
        """Neighbours of agent k excluding k itself."""
        return [l for l in self.neighborhoods[k] if l != k]


class PerronResult(ArrayModel):
    """Perron eigenvector of a left-stochastic matrix."""

    pbar: np.ndarray = Field(..., description="Normalized positive eigenvector at eigenvalue 1")
    eigengap: float = Field(
        ..., description="Magnitude of the second-largest eigenvalue"
    )

    @field_validator("pbar", mode="before")
    @classmethod
    def _to_array(cls, value):
        return frozen_array(value)
