"""
Synthetic linear-regression problem.

w* ~ N(0, R_w) once; for each agent k, features u_{k,n} ~ N(0, R_u) i.i.d.,
noise v_k(n) ~ N(0, σ²_{v,k}) and labels d_k(n) = u_{k,n}ᵀ w* + v_k(n).
Agent k draws from its own substream, so adding agents never changes the
data of existing ones.
"""

from logging import Logger
from typing import Optional, Sequence

import numpy as np
import scipy.linalg as la

from helpers.errors import DimensionError, NonPositiveDefinite
from models.problem import AgentDataset, Problem
from sampler.streams import Streams


class ProblemGenerator:
    """Generate per-agent regression datasets."""

    @staticmethod
    def _cholesky(mat: np.ndarray, name: str) -> np.ndarray:
        try:
            return la.cholesky(mat, lower=True)
        except la.LinAlgError as e:
            raise NonPositiveDefinite(f"{name} is not positive definite") from e

    @staticmethod
    def generate_problem(
        K: int,
        N: int,
        M: int,
        Ru: np.ndarray,
        Rw: np.ndarray,
        sigma_v: Sequence[float],
        seed: int,
        logger: Optional[Logger] = None,
    ) -> Problem:
        """
        Generate K datasets of N samples in dimension M.

        Args:
            K: number of agents
            N: samples per agent (N >= M)
            M: feature dimension
            Ru: M×M feature covariance
            Rw: M×M covariance of the generative model
            sigma_v: per-agent noise standard deviations
            seed: master seed (problem stream)
            logger: optional logger

        Returns:
            Problem with datasets and w*

        Raises:
            DimensionError: inconsistent sizes
            NonPositiveDefinite: Ru or Rw not positive definite
        """
        Ru = np.atleast_2d(np.asarray(Ru, dtype=float))
        Rw = np.atleast_2d(np.asarray(Rw, dtype=float))
        sigma_v = np.asarray(sigma_v, dtype=float)
        if K < 1 or M < 1:
            raise DimensionError(f"K and M must be positive, got K={K}, M={M}")
        if N < M:
            raise DimensionError(f"Need N >= M, got N={N}, M={M}")
        if Ru.shape != (M, M) or Rw.shape != (M, M):
            raise DimensionError(f"Ru and Rw must be {M}x{M}")
        if sigma_v.shape != (K,) or np.any(sigma_v < 0.0):
            raise DimensionError(f"sigma_v must hold {K} nonnegative entries")

        Lu = ProblemGenerator._cholesky(Ru, "Ru")
        Lw = ProblemGenerator._cholesky(Rw, "Rw")

        w_star = Lw @ Streams.generator(seed, Streams.PROBLEM, 0).standard_normal(M)

        datasets = []
        for k in range(K):
            rng = Streams.generator(seed, Streams.PROBLEM, k + 1)
            features = rng.standard_normal((N, M)) @ Lu.T
            noise = sigma_v[k] * rng.standard_normal(N)
            datasets.append(
                AgentDataset(
                    features=features,
                    labels=features @ w_star + noise,
                    sigma_v=float(sigma_v[k]),
                    w_star=w_star,
                )
            )

        if logger:
            logger.info("🎲 Generated %d datasets: N=%d, M=%d", K, N, M)
        return Problem(datasets=datasets, w_star=w_star)
