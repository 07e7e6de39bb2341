"""
NoiseEstimator: gradient-noise covariances at w° and the regularity constants.

With uniform-with-replacement mini-batches of size B, the gradient noise
s(w) = ∇̂J(w) − ∇J(w) has covariance Cov_n[g_n(w)]/B, where g_n are the
per-sample gradients. All second moments below are therefore exact over the
dataset; only the trial points for β_s are random.
"""

from typing import Sequence, Tuple

import numpy as np
import scipy.linalg as la

from models.problem import AgentDataset, NoiseModel, QuadraticRisk, RegularityConstants
from regression.risk import RiskEvaluator

# samples per agent used for δ and for trial evaluations
CONSTANT_SAMPLE = 10_000
# residuals below this (relative to the label scale) count as an exact fit
EXACT_FIT_TOL = 1e-9


class NoiseEstimator:
    """Gradient-noise statistics of the local risks."""

    @staticmethod
    def _centered_gradients(ds: AgentDataset, w: np.ndarray, rows=slice(None)) -> np.ndarray:
        G = RiskEvaluator.per_sample_gradients(ds, w, rows)
        return G - G.mean(axis=0)

    @staticmethod
    def noise_covariance(ds: AgentDataset, w_opt: np.ndarray, batch_size: int = 1) -> np.ndarray:
        """
        R_k = (1/B)·Cov_n[g_n(w°)].

        Args:
            ds: agent dataset
            w_opt: limit point w°
            batch_size: mini-batch size B >= 1

        Returns:
            M×M symmetric positive semidefinite matrix
        """
        if batch_size < 1:
            raise ValueError("batch_size must be at least 1")
        residual = ds.features @ w_opt - ds.labels
        if np.max(np.abs(residual)) <= EXACT_FIT_TOL * max(1.0, float(np.max(np.abs(ds.labels)))):
            # exact fit: every per-sample gradient vanishes
            return np.zeros((ds.M, ds.M))
        C = NoiseEstimator._centered_gradients(ds, w_opt)
        cov = C.T @ C / ds.N
        return 0.5 * (cov + cov.T) / batch_size

    @staticmethod
    def _second_moment(ds: AgentDataset, w: np.ndarray, batch_size: int, rows) -> float:
        C = NoiseEstimator._centered_gradients(ds, w, rows)
        return float(np.mean(np.sum(C * C, axis=1))) / batch_size

    @staticmethod
    def _fourth_moment(ds: AgentDataset, w: np.ndarray, batch_size: int, rows) -> float:
        C = NoiseEstimator._centered_gradients(ds, w, rows)
        return float(np.mean(np.sum(C * C, axis=1) ** 2)) / batch_size**2

    @staticmethod
    def trial_points(
        w_opt: np.ndarray, count: int, rng: np.random.Generator
    ) -> np.ndarray:
        """w° + r·ξ with ξ uniform on the sphere and r = scale·U(0.5, 2)."""
        M = w_opt.shape[0]
        scale = max(1.0, float(np.linalg.norm(w_opt)))
        xi = rng.standard_normal((count, M))
        xi /= np.linalg.norm(xi, axis=1, keepdims=True)
        radius = scale * rng.uniform(0.5, 2.0, size=count)
        return w_opt[None, :] + radius[:, None] * xi

    @staticmethod
    def _trial_excess(
        datasets: Sequence[AgentDataset],
        w_opt: np.ndarray,
        points: np.ndarray,
        batch_size: int,
        power: int,
    ) -> np.ndarray:
        """
        Per (agent, point) excess noise moment E‖s(w)‖^{2p} − E‖s(w°)‖^{2p},
        evaluated on the first CONSTANT_SAMPLE samples of each agent.
        """
        moment = NoiseEstimator._second_moment if power == 1 else NoiseEstimator._fourth_moment
        excess = np.zeros((len(datasets), points.shape[0]))
        for k, ds in enumerate(datasets):
            rows = slice(0, min(ds.N, CONSTANT_SAMPLE))
            anchor = moment(ds, w_opt, batch_size, rows)
            for j, w in enumerate(points):
                excess[k, j] = moment(ds, w, batch_size, rows) - anchor
        return excess

    @staticmethod
    def estimate_constants(
        risks: Sequence[QuadraticRisk],
        datasets: Sequence[AgentDataset],
        w_opt: np.ndarray,
        trial_count: int,
        rng: np.random.Generator,
        batch_size: int = 1,
    ) -> Tuple[RegularityConstants, NoiseModel]:
        """
        Estimate ν, δ, λ_min, λ_max and the noise-bound constants.

        σ_s² = max_k tr(R_k) at batch size B; β_s² is the largest
        (E‖s(w)‖² − σ_s²)/‖w° − w‖² over trial points (clipped at 0); the
        fourth-order pair follows the same recipe with fourth powers, using
        single-sample moments scaled by 1/B².

        Args:
            risks: quadratic risks per agent
            datasets: datasets per agent
            w_opt: limit point w°
            trial_count: number of trial points P >= 1
            rng: generator for the trial directions and radii
            batch_size: mini-batch size B

        Returns:
            Tuple of (RegularityConstants, NoiseModel)
        """
        eigs = np.concatenate([la.eigvalsh(r.hessian) for r in risks])
        lambda_min = float(eigs.min())
        lambda_max = float(eigs.max())

        delta = 0.0
        for ds in datasets:
            U = ds.features[: min(ds.N, CONSTANT_SAMPLE)]
            delta = max(delta, 2.0 * float(np.max(np.sum(U * U, axis=1))))
        delta = max(delta, lambda_max)

        Rk = np.stack([NoiseEstimator.noise_covariance(ds, w_opt, batch_size) for ds in datasets])
        sigma_s2 = float(max(np.trace(R) for R in Rk))
        sigma_s4 = 0.0
        for ds in datasets:
            sigma_s4 = max(
                sigma_s4, NoiseEstimator._fourth_moment(ds, w_opt, batch_size, slice(None))
            )

        points = NoiseEstimator.trial_points(w_opt, trial_count, rng)
        dist2 = np.sum((points - w_opt[None, :]) ** 2, axis=1)

        traces = np.array([np.trace(R) for R in Rk])
        excess2 = NoiseEstimator._trial_excess(datasets, w_opt, points, batch_size, 1)
        beta_s2 = float(np.max(np.maximum(0.0, (excess2 + (traces - sigma_s2)[:, None]) / dist2)))

        fourth_anchor = np.array(
            [NoiseEstimator._fourth_moment(ds, w_opt, batch_size, slice(None)) for ds in datasets]
        )
        excess4 = NoiseEstimator._trial_excess(datasets, w_opt, points, batch_size, 2)
        beta_s4 = float(
            np.max(np.maximum(0.0, (excess4 + (fourth_anchor - sigma_s4)[:, None]) / dist2**2))
        )

        constants = RegularityConstants(
            nu=lambda_min,
            delta=delta,
            lambda_min=lambda_min,
            lambda_max=lambda_max,
        )
        noise = NoiseModel(
            Rk=Rk,
            beta_s2=beta_s2,
            sigma_s2=sigma_s2,
            beta_s4=beta_s4,
            sigma_s4=sigma_s4,
        )
        return constants, noise

    @staticmethod
    def regress_beta_s2(
        datasets: Sequence[AgentDataset],
        w_opt: np.ndarray,
        trial_count: int,
        rng: np.random.Generator,
        batch_size: int = 1,
    ) -> float:
        """
        Independent β_s² estimate: least-squares slope of E‖s(w)‖² against
        ‖w° − w‖² across trial points, maximised over agents.
        """
        points = NoiseEstimator.trial_points(w_opt, trial_count, rng)
        dist2 = np.sum((points - w_opt[None, :]) ** 2, axis=1)
        excess = NoiseEstimator._trial_excess(datasets, w_opt, points, batch_size, 1)
        design = np.column_stack([dist2, np.ones_like(dist2)])
        slopes = [np.linalg.lstsq(design, row, rcond=None)[0][0] for row in excess]
        return float(max(0.0, max(slopes)))
