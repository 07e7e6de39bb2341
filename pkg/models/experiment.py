"""
Pydantic models for experiment configuration files.

A configuration is a JSON document with the named sections ``network``,
``problem``, ``schedule``, ``run`` and ``output``. See docs/config_schema.md.
"""

from enum import Enum
from typing import List, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, model_validator

from helpers.utils import config_digest
from models.network import Mode
from models.schedule import Schedule

FloatOrList = Union[float, List[float]]


class GraphKind(str, Enum):
    """Underlying graph families the network builder can generate."""

    RING = "ring"
    COMPLETE = "complete"
    ERDOS_RENYI = "erdos_renyi"
    WATTS_STROGATZ = "watts_strogatz"


class WeightRule(str, Enum):
    METROPOLIS = "metropolis"
    UNIFORM = "uniform"


class Section(BaseModel):
    model_config = ConfigDict(extra="forbid")


class NetworkSection(Section):
    """Network: graph and weights, or an explicit A; probabilities; mode."""

    K: int = Field(..., ge=1, description="Number of agents")
    mode: Mode = Field(Mode.DECENTRALIZED)
    graph: GraphKind = Field(GraphKind.ERDOS_RENYI)
    edge_prob: float = Field(0.4, gt=0.0, le=1.0, description="Erdős–Rényi edge probability")
    ws_neighbors: int = Field(4, ge=2, description="Watts–Strogatz ring degree")
    ws_rewire: float = Field(0.2, ge=0.0, le=1.0)
    weights: WeightRule = Field(WeightRule.METROPOLIS)
    A: Optional[List[List[float]]] = Field(
        None, description="Explicit base matrix; its support defines the neighborhoods"
    )
    q: FloatOrList = Field(1.0, description="Participation probability (scalar or per agent)")
    Q: Optional[Union[float, List[List[float]]]] = Field(
        None, description="Sampling probabilities; null draws them at random"
    )
    q_range: tuple[float, float] = Field((0.2, 1.0), description="Range of random Q entries")

    @model_validator(mode="after")
    def _check(self) -> "NetworkSection":
        low, high = self.q_range
        if not 0.0 <= low <= high <= 1.0:
            raise ValueError("q_range must satisfy 0 <= low <= high <= 1")
        if self.A is not None and (
            len(self.A) != self.K or any(len(row) != self.K for row in self.A)
        ):
            raise ValueError(f"A must be {self.K}x{self.K}")
        return self


class ProblemSection(Section):
    """Synthetic regression data: d = uᵀw* + v."""

    M: int = Field(..., ge=1, description="Feature dimension")
    N: int = Field(..., ge=1, description="Samples per agent")
    ru: FloatOrList = Field(1.0, description="Diagonal of R_u (scalar or M values)")
    rw: FloatOrList = Field(1.0, description="Diagonal of R_w (scalar or M values)")
    sigma_v: FloatOrList = Field(0.1, description="Noise std per agent (scalar or K values)")
    batch: int = Field(1, ge=1, description="Mini-batch size B")

    @model_validator(mode="after")
    def _check(self) -> "ProblemSection":
        if self.N < self.M:
            raise ValueError(f"N={self.N} must be at least M={self.M}")
        return self


class RunSection(Section):
    """Repetitions, seeding and steady-state estimation."""

    runs: int = Field(5, ge=1, description="Independent repetitions R")
    seed: int = Field(0, ge=0, lt=2**64, description="Master seed")
    tail: float = Field(0.1, gt=0.0, le=1.0, description="Tail fraction for steady state")
    msd_form: Literal["recursion", "adjoint"] = Field("recursion")
    record_local_steps: bool = Field(False)
    exact: bool = Field(False, description="Refuse Monte-Carlo moment fallback")
    mc_draws: Optional[int] = Field(None, ge=1)
    noise_points: int = Field(64, ge=1, description="Trial points for noise constants")


class OutputSection(Section):
    directory: str = Field("output")
    stem: str = Field("experiment")


class ExperimentConfig(Section):
    """Complete experiment definition."""

    name: str = Field("experiment")
    network: NetworkSection
    problem: ProblemSection
    schedule: Schedule
    run: RunSection = Field(default_factory=RunSection)
    output: OutputSection = Field(default_factory=OutputSection)

    @model_validator(mode="after")
    def _check(self) -> "ExperimentConfig":
        sigma = self.problem.sigma_v
        if isinstance(sigma, list) and len(sigma) != self.network.K:
            raise ValueError(f"sigma_v must have K={self.network.K} entries")
        q = self.network.q
        if isinstance(q, list) and len(q) != self.network.K:
            raise ValueError(f"q must have K={self.network.K} entries")
        for name, value in (("ru", self.problem.ru), ("rw", self.problem.rw)):
            if isinstance(value, list) and len(value) != self.problem.M:
                raise ValueError(f"{name} must have M={self.problem.M} entries")
        return self

    @property
    def digest(self) -> str:
        """Digest of everything except output paths."""
        return config_digest(self.model_dump(mode="json", exclude={"output"}))
