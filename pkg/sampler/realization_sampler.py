"""
RealizationSampler: one random combination matrix and step-size vector per
global iteration.

Decentralized: θ_k ~ Bernoulli(q_k); a participating agent k keeps each
neighbour l ∈ N_k \\ {k} independently with probability q_{lk} at weight
a_{lk} and puts the remainder on itself. Non-participants have column e_k.
fedavg: the L participants average uniformly (weight 1/L); L = 0 gives the
identity. fedsgd: everybody participates and A = (1/K)·11ᵀ.
"""

from typing import Tuple, Union

import numpy as np

from models.network import Mode, NetworkSpec
from models.schedule import Realization, Schedule


class RealizationSampler:
    """Draw random combination matrices and coupled step-sizes."""

    @staticmethod
    def _neighbour_mask(spec: NetworkSpec) -> np.ndarray:
        mask = np.zeros((spec.K, spec.K), dtype=bool)
        for k in range(spec.K):
            mask[spec.others(k), k] = True
        return mask

    @staticmethod
    def draw_batch(
        spec: NetworkSpec, rng: np.random.Generator, n: int
    ) -> Tuple[np.ndarray, np.ndarray]:
        """
        Draw ``n`` independent (θ, A_combine) pairs.

        Returns:
            Tuple of (theta: n×K bool, A: n×K×K float)
        """
        K = spec.K
        if spec.mode == Mode.FEDSGD:
            return np.ones((n, K), dtype=bool), np.full((n, K, K), 1.0 / K)

        theta = rng.random((n, K)) < spec.q[None, :]

        if spec.mode == Mode.FEDAVG:
            active = theta.astype(float)
            L = active.sum(axis=1)
            inv_L = np.divide(1.0, L, out=np.zeros_like(L), where=L > 0)
            A = active[:, :, None] * active[:, None, :] * inv_L[:, None, None]
            A[:, np.arange(K), np.arange(K)] += 1.0 - active
            return theta, A

        mask = RealizationSampler._neighbour_mask(spec)
        draws = rng.random((n, K, K))
        include = mask[None] & (draws < spec.Q[None]) & theta[:, None, :]
        A = np.where(include, spec.A[None], 0.0)
        self_weight = np.clip(1.0 - A.sum(axis=1), 0.0, 1.0)
        A[:, np.arange(K), np.arange(K)] = self_weight
        return theta, A

    @staticmethod
    def sample_realization(
        spec: NetworkSpec, sched: Schedule, i: int, rng: np.random.Generator
    ) -> Realization:
        """
        Draw the realization for global iteration ``i``.

        Args:
            spec: validated network
            sched: schedule providing the base step-size μ
            i: global iteration index
            rng: generator owned by this (run, iteration)

        Returns:
            Realization with μ_k = μ·θ_k
        """
        theta, A = RealizationSampler.draw_batch(spec, rng, 1)
        return Realization(
            iteration=i,
            participants=theta[0],
            A_combine=A[0],
            mu_vec=sched.mu * theta[0].astype(float),
        )

    @staticmethod
    def matrix_at(real: Realization, sched: Schedule, t: int) -> np.ndarray:
        """
        Combination matrix at local index t: identity for t ≠ T, A_combine at t = T.

        Raises:
            IndexError: t outside [1, T]
        """
        if not 1 <= t <= sched.T:
            raise IndexError(f"Local index t={t} outside [1, {sched.T}]")
        if t == sched.T:
            return real.A_combine
        return np.eye(real.A_combine.shape[0])

    @staticmethod
    def empirical_first_moment(
        spec: NetworkSpec,
        sched: Schedule,
        n_draws: int,
        rng: np.random.Generator,
        with_error: bool = False,
        chunk: int = 10_000,
    ) -> Union[np.ndarray, Tuple[np.ndarray, np.ndarray]]:
        """
        Monte-Carlo average of A_combine over ``n_draws`` realizations.

        Args:
            spec: validated network
            sched: schedule (unused; mirrors sample_realization)
            n_draws: number of draws, at least 1
            rng: seeded generator
            with_error: also return entrywise standard errors
            chunk: draws per vectorized batch

        Returns:
            K×K mean, or (mean, standard error) when ``with_error``
        """
        if n_draws < 1:
            raise ValueError("n_draws must be at least 1")
        K = spec.K
        total = np.zeros((K, K))
        total_sq = np.zeros((K, K))
        remaining = n_draws
        while remaining > 0:
            n = min(chunk, remaining)
            _, A = RealizationSampler.draw_batch(spec, rng, n)
            total += A.sum(axis=0)
            total_sq += (A * A).sum(axis=0)
            remaining -= n

        mean = total / n_draws
        if not with_error:
            return mean
        var = np.maximum(total_sq / n_draws - mean * mean, 0.0)
        std_error = np.sqrt(var / max(n_draws - 1, 1))
        return mean, std_error
