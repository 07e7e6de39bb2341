"""
Pydantic models for the synthetic linear-regression problem.
"""

from typing import List

import numpy as np
from pydantic import Field, field_validator, model_validator

from models.base import ArrayModel, frozen_array


class AgentDataset(ArrayModel):
    """
    Local dataset of one agent: d(n) = u_nᵀ w* + v(n).

    Attributes:
        features: N×M matrix whose rows are u_n
        labels: N-vector d(n)
        sigma_v: label-noise standard deviation
        w_star: generative model shared by all agents
    """

    features: np.ndarray
    labels: np.ndarray
    sigma_v: float = Field(..., ge=0.0)
    w_star: np.ndarray

    @field_validator("features", "labels", "w_star", mode="before")
    @classmethod
    def _to_array(cls, value):
        return frozen_array(value)

    @model_validator(mode="after")
    def _check_shapes(self) -> "AgentDataset":
        if self.features.ndim != 2:
            raise ValueError("features must be a 2-D array")
        N, M = self.features.shape
        if self.labels.shape != (N,):
            raise ValueError(f"labels must have {N} entries, got {self.labels.shape}")
        if self.w_star.shape != (M,):
            raise ValueError(f"w_star must have {M} entries, got {self.w_star.shape}")
        if N < M:
            raise ValueError(f"Need at least M={M} samples, got N={N}")
        return self

    @property
    def N(self) -> int:
        return self.features.shape[0]

    @property
    def M(self) -> int:
        return self.features.shape[1]


class QuadraticRisk(ArrayModel):
    """
    Empirical MSE risk J(w) = (1/N)Σ(d − uᵀw)², summarised by its moments.

    Hessian is the constant 2·Ruhat.
    """

    Ruhat: np.ndarray = Field(..., description="(1/N)Σ u uᵀ")
    rduhat: np.ndarray = Field(..., description="(1/N)Σ u d")
    dd: float = Field(0.0, description="(1/N)Σ d², only needed for risk values")

    @field_validator("Ruhat", "rduhat", mode="before")
    @classmethod
    def _to_array(cls, value):
        return frozen_array(value)

    @property
    def hessian(self) -> np.ndarray:
        return 2.0 * self.Ruhat

    def gradient(self, w: np.ndarray) -> np.ndarray:
        """Full gradient 2(R̂_u w − r̂_du)."""
        return 2.0 * (self.Ruhat @ w - self.rduhat)

    def value(self, w: np.ndarray) -> float:
        return float(self.dd - 2.0 * self.rduhat @ w + w @ self.Ruhat @ w)


class NoiseModel(ArrayModel):
    """Gradient-noise covariances at w° and the moment-bound constants."""

    Rk: np.ndarray = Field(..., description="K×M×M stacked covariances R_k")
    beta_s2: float = Field(0.0, ge=0.0)
    sigma_s2: float = Field(0.0, ge=0.0)
    beta_s4: float = Field(0.0, ge=0.0)
    sigma_s4: float = Field(0.0, ge=0.0)

    @field_validator("Rk", mode="before")
    @classmethod
    def _to_array(cls, value):
        return frozen_array(value)


class RegularityConstants(ArrayModel):
    """
    Curvature and smoothness constants of the local risks.

    kappa, kappa_s and alpha_s are declared, never estimated: the quadratic
    Hessian is constant (kappa = 0) and alpha_s defaults to 1.
    """

    nu: float = Field(..., gt=0.0)
    delta: float = Field(..., gt=0.0)
    lambda_min: float = Field(..., gt=0.0)
    lambda_max: float = Field(..., gt=0.0)
    kappa: float = Field(0.0, ge=0.0)
    kappa_s: float = Field(0.0, ge=0.0)
    alpha_s: float = Field(1.0, gt=0.0)

    @model_validator(mode="after")
    def _check_order(self) -> "RegularityConstants":
        if not self.nu <= self.lambda_min * (1 + 1e-12):
            raise ValueError("Expected nu <= lambda_min")
        if not self.lambda_min <= self.lambda_max * (1 + 1e-12):
            raise ValueError("Expected lambda_min <= lambda_max")
        return self


class Problem(ArrayModel):
    """Generated problem: per-agent datasets plus the shared generative model."""

    datasets: List[AgentDataset]
    w_star: np.ndarray

    @field_validator("w_star", mode="before")
    @classmethod
    def _to_array(cls, value):
        return frozen_array(value)

    @property
    def K(self) -> int:
        return len(self.datasets)

    @property
    def M(self) -> int:
        return self.w_star.shape[0]
