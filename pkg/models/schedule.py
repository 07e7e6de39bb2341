"""
Iteration schedule and per-iteration random realizations.
"""

import numpy as np
from pydantic import BaseModel, Field, field_validator

from models.base import ArrayModel, frozen_array


class Schedule(BaseModel):
    """Local steps per global iteration, iteration budget and base step-size."""

    T: int = Field(..., ge=1, description="Local update steps per global iteration")
    iters: int = Field(..., ge=1, description="Number of global iterations I")
    mu: float = Field(..., gt=0.0, description="Base step-size")


class Realization(ArrayModel):
    """
    One draw of the random network at global iteration ``iteration``.

    The same participation vector governs the T local steps and the combine
    step, so mu_vec[k] == 0 exactly when column k of A_combine is e_k.
    """

    iteration: int = Field(..., ge=0)
    participants: np.ndarray = Field(..., description="Boolean participation vector θ")
    A_combine: np.ndarray = Field(..., description="Combination matrix used at t = T")
    mu_vec: np.ndarray = Field(..., description="Step-sizes μ·θ_k")

    @field_validator("participants", mode="before")
    @classmethod
    def _to_bool(cls, value):
        return frozen_array(value, dtype=bool)

    @field_validator("A_combine", "mu_vec", mode="before")
    @classmethod
    def _to_float(cls, value):
        return frozen_array(value)

    @property
    def active_count(self) -> int:
        """L_i, the number of participating agents."""
        return int(self.participants.sum())
