"""
RiskEvaluator: quadratic risks, stochastic gradients and the limit point w°.
"""

from typing import Sequence

import numpy as np
import scipy.linalg as la

from helpers.errors import NonPositiveDefinite, SingularSystem
from models.problem import AgentDataset, QuadraticRisk


class RiskEvaluator:
    """Evaluate J_k, its gradients and the weighted optimum."""

    @staticmethod
    def risk_from_dataset(ds: AgentDataset) -> QuadraticRisk:
        """
        Empirical moments R̂_u = (1/N)Σuuᵀ and r̂_du = (1/N)Σud.

        Raises:
            NonPositiveDefinite: R̂_u is singular (rank-deficient features)
        """
        U = ds.features
        N = ds.N
        Ruhat = U.T @ U / N
        Ruhat = 0.5 * (Ruhat + Ruhat.T)
        eigs = la.eigvalsh(Ruhat)
        if eigs[0] <= 1e-12 * max(1.0, eigs[-1]):
            raise NonPositiveDefinite(
                f"Empirical feature covariance is singular (smallest eigenvalue {eigs[0]:.3e})"
            )
        return QuadraticRisk(
            Ruhat=Ruhat,
            rduhat=U.T @ ds.labels / N,
            dd=float(ds.labels @ ds.labels / N),
        )

    @staticmethod
    def per_sample_gradients(ds: AgentDataset, w: np.ndarray, rows=slice(None)) -> np.ndarray:
        """Rows g_n = 2u_n(u_nᵀw − d_n)."""
        U = ds.features[rows]
        residual = U @ w - ds.labels[rows]
        return 2.0 * U * residual[:, None]

    @staticmethod
    def stochastic_gradient(ds: AgentDataset, w: np.ndarray, batch: Sequence[int]) -> np.ndarray:
        """
        Mini-batch gradient (1/|batch|)·Σ 2u_n(u_nᵀw − d_n).

        Raises:
            ValueError: empty batch
            IndexError: sample index outside [0, N)
        """
        idx = np.asarray(batch, dtype=np.int64)
        if idx.size == 0:
            raise ValueError("Batch must be nonempty")
        if idx.min() < 0 or idx.max() >= ds.N:
            raise IndexError(f"Sample index out of range [0, {ds.N})")
        return RiskEvaluator.per_sample_gradients(ds, w, idx).mean(axis=0)

    @staticmethod
    def limit_point(
        risks: Sequence[QuadraticRisk], pbar: np.ndarray, q: np.ndarray
    ) -> np.ndarray:
        """
        w° = argmin Σ_k p̄_k q_k J_k(w), from the weighted normal equations.

        Raises:
            SingularSystem: Σ p̄_k q_k R̂_{u,k} is not positive definite
        """
        weights = np.asarray(pbar, dtype=float) * np.asarray(q, dtype=float)
        lhs = sum(w * r.Ruhat for w, r in zip(weights, risks))
        rhs = sum(w * r.rduhat for w, r in zip(weights, risks))
        try:
            factor = la.cho_factor(lhs)
        except la.LinAlgError as e:
            raise SingularSystem("Weighted normal equations are singular") from e
        return la.cho_solve(factor, rhs)

    @staticmethod
    def unweighted_minimizer(risks: Sequence[QuadraticRisk]) -> np.ndarray:
        """Minimizer of (1/K)Σ J_k."""
        K = len(risks)
        return RiskEvaluator.limit_point(risks, np.full(K, 1.0 / K), np.ones(K))

    @staticmethod
    def weighted_gradient(
        risks: Sequence[QuadraticRisk], pbar: np.ndarray, q: np.ndarray, w: np.ndarray
    ) -> np.ndarray:
        """Σ p̄_k q_k ∇J_k(w); zero at the limit point."""
        return sum(p * qk * r.gradient(w) for p, qk, r in zip(pbar, q, risks))
