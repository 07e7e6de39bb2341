"""
Simulation state and recorded MSD trajectories.
"""

import numpy as np
import pandas as pd
from pydantic import Field, field_validator, model_validator

from models.base import ArrayModel, frozen_array


class NetworkState(ArrayModel):
    """Iterates of all agents after ``iter`` global iterations; row k is w_k."""

    W: np.ndarray
    iter: int = Field(0, ge=0)

    @field_validator("W", mode="before")
    @classmethod
    def _to_array(cls, value):
        return frozen_array(value)

    @model_validator(mode="after")
    def _check_finite(self) -> "NetworkState":
        if self.W.ndim != 2:
            raise ValueError("W must be K×M")
        if not np.all(np.isfinite(self.W)):
            raise ValueError("State holds non-finite entries")
        return self


class Trajectory(ArrayModel):
    """
    Empirical MSD records of one or more runs.

    Column arrays are aligned: record j belongs to run ``run[j]`` at global
    iteration ``iteration[j]`` and local index ``t[j]`` (t == T for combine
    instants). ``fourth`` is (1/K)Σ‖w̃_k‖⁴ and ``spread`` the largest distance
    of an agent from the network mean.
    """

    run: np.ndarray
    iteration: np.ndarray
    t: np.ndarray
    msd: np.ndarray
    fourth: np.ndarray
    spread: np.ndarray
    T: int = Field(..., ge=1)
    config_digest: str = ""

    @field_validator("run", "iteration", "t", mode="before")
    @classmethod
    def _to_int(cls, value):
        return frozen_array(value, dtype=np.int64)

    @field_validator("msd", "fourth", "spread", mode="before")
    @classmethod
    def _to_float(cls, value):
        return frozen_array(value)

    @model_validator(mode="after")
    def _check(self) -> "Trajectory":
        n = self.msd.shape[0]
        for name in ("run", "iteration", "t", "fourth", "spread"):
            if getattr(self, name).shape != (n,):
                raise ValueError(f"{name} must have {n} entries")
        if n and self.msd.min() < 0.0:
            raise ValueError("MSD values must be nonnegative")
        return self

    @property
    def runs(self) -> list[int]:
        return sorted(set(int(r) for r in self.run))

    def combine_records(self) -> "Trajectory":
        """Records taken at combine instants only."""
        mask = self.t == self.T
        return self.model_copy(
            update={
                name: getattr(self, name)[mask]
                for name in ("run", "iteration", "t", "msd", "fourth", "spread")
            }
        )

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            {
                "run": self.run,
                "iter": self.iteration,
                "t": self.t,
                "msd_lin": self.msd,
                "fourth": self.fourth,
                "spread": self.spread,
            }
        )

    @classmethod
    def concat(cls, parts: list["Trajectory"]) -> "Trajectory":
        """Merge per-run trajectories, ordered by run index."""
        if not parts:
            raise ValueError("Nothing to merge")
        parts = sorted(parts, key=lambda p: int(p.run[0]) if p.run.size else -1)
        return cls(
            run=np.concatenate([p.run for p in parts]),
            iteration=np.concatenate([p.iteration for p in parts]),
            t=np.concatenate([p.t for p in parts]),
            msd=np.concatenate([p.msd for p in parts]),
            fourth=np.concatenate([p.fourth for p in parts]),
            spread=np.concatenate([p.spread for p in parts]),
            T=parts[0].T,
            config_digest=parts[0].config_digest,
        )
