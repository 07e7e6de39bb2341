"""
Moment matrices of the error recursion and the theory report.

The (KM)²×(KM)² operators are stored in factored form. For block-index
pairs r = (k', k) and c = (l', l) (flattened as k'·K + k), the scalar tables
hold

    t_ab[r, c] = E[a_{l'k'} a_{lk} θ_{l'}^a θ_l^b]        a, b ∈ {0, 1}
    c[r, c]    = E[a_{k'l'} θ_{l'} a_{kl} θ_l]

and the M²×M² block (r, c) of the transition operator is

    t_00 I − μ t_10 (H_{l'} ⊗ I) − μ t_01 (I ⊗ H_l) + μ² t_11 (H_{l'} ⊗ H_l).

The noise operators are μ²·c ⊗ I (adjoint form) and μ²·t_11 ⊗ I (forward
recursion).
"""

from functools import cached_property
from typing import Optional

import numpy as np
from pydantic import Field, field_validator

from models.base import ArrayModel, frozen_array
from models.network import Mode


class MomentTables(ArrayModel):
    """Scalar K²×K² expectation tables plus optional Monte-Carlo standard errors."""

    t00: np.ndarray
    t10: np.ndarray
    t01: np.ndarray
    t11: np.ndarray
    c: np.ndarray
    std_error: Optional[dict] = None

    @field_validator("t00", "t10", "t01", "t11", "c", mode="before")
    @classmethod
    def _to_array(cls, value):
        return frozen_array(value)

    def max_std_error(self) -> float:
        if not self.std_error:
            return 0.0
        return float(max(np.max(v) for v in self.std_error.values()))


class MomentMatrices(ArrayModel):
    """Moment operators 𝒢ₜ, 𝒞ₜ (t ≠ T), 𝒢_T, 𝒞_T and the noise blocks R_k."""

    K: int = Field(..., ge=1)
    M: int = Field(..., ge=1)
    mu: float = Field(..., gt=0.0)
    mode: Mode
    hessians: np.ndarray = Field(..., description="K×M×M Hessians ∇²J_k(w°)")
    R_blocks: np.ndarray = Field(..., description="K×M×M gradient-noise covariances")
    local: MomentTables
    combine: MomentTables
    exact: bool = True

    @field_validator("hessians", "R_blocks", mode="before")
    @classmethod
    def _to_array(cls, value):
        return frozen_array(value)

    @property
    def max_std_error(self) -> float:
        return max(self.local.max_std_error(), self.combine.max_std_error())

    @cached_property
    def G_local(self) -> np.ndarray:
        from theory.calculus import BlockCalculus

        return BlockCalculus.assemble_transition(self.local, self.hessians, self.mu)

    @cached_property
    def C_local(self) -> np.ndarray:
        from theory.calculus import BlockCalculus

        return BlockCalculus.assemble_noise(self.local.c, self.M, self.mu)

    @cached_property
    def G_combine(self) -> np.ndarray:
        from theory.calculus import BlockCalculus

        return BlockCalculus.assemble_transition(self.combine, self.hessians, self.mu)

    @cached_property
    def C_combine(self) -> np.ndarray:
        from theory.calculus import BlockCalculus

        return BlockCalculus.assemble_noise(self.combine.c, self.M, self.mu)

    @cached_property
    def C_combine_forward(self) -> np.ndarray:
        from theory.calculus import BlockCalculus

        return BlockCalculus.assemble_noise(self.combine.t11, self.M, self.mu)


class StabilityReport(ArrayModel):
    """Step-size bound and contraction factor of the mean-square error."""

    mu_max: float
    gamma: float
    admissible: bool
    msd_bound: Optional[float] = None


class TheoryReport(ArrayModel):
    """Steady-state MSD prediction and stability quantities."""

    msd_lin: float
    msd_db: float
    msd_form: str
    msd_recursion_lin: float
    msd_recursion_db: float
    msd_adjoint_lin: float
    msd_adjoint_db: float
    gamma: Optional[float] = None
    mu_max: Optional[float] = None
    msd_bound: Optional[float] = None
    admissible: Optional[bool] = None
    rho: float
    alpha0: float
    K: int
    M: int
    T: int
    mu: float
    mode: Mode
    exact: bool
    max_std_error: float = 0.0
    limit_point_drift: Optional[float] = None
    config_digest: str = ""
