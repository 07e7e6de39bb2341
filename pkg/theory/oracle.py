"""
Monte-Carlo estimates of the moment tables, drawn from the same sampler the
simulation uses. Serves as the fallback when enumeration is too large and as
an independent check of the exact builders.
"""

from logging import Logger
from typing import Optional

import numpy as np

from models.moments import MomentMatrices, MomentTables
from models.network import Mode, NetworkSpec
from models.schedule import Schedule
from sampler.realization_sampler import RealizationSampler
from sampler.streams import Streams

TABLE_NAMES = ("t00", "t10", "t01", "t11", "c")


class MomentOracle:
    """Empirical averages of the defining random matrices."""

    @staticmethod
    def _chunk(K: int) -> int:
        return max(1, (1 << 22) // K**4)

    @staticmethod
    def _accumulate(theta: np.ndarray, A: np.ndarray, sums: dict, squares: dict) -> None:
        n, K, _ = A.shape
        weights = theta.astype(float)
        At = A.transpose(0, 2, 1)
        plain = At
        scaled = At * weights[:, None, :]
        mixed = A * weights[:, None, :]
        factors = {
            "t00": (plain, plain),
            "t10": (scaled, plain),
            "t01": (plain, scaled),
            "t11": (scaled, scaled),
            "c": (mixed, mixed),
        }
        for name, (left, right) in factors.items():
            draws = np.einsum("nxy,nzw->nxzyw", left, right).reshape(n, K * K, K * K)
            sums[name] += draws.sum(axis=0)
            squares[name] += (draws * draws).sum(axis=0)

    @staticmethod
    def _estimate(spec: NetworkSpec, n_draws: int, rng: np.random.Generator, local: bool) -> MomentTables:
        if n_draws < 1:
            raise ValueError("n_draws must be at least 1")
        K = spec.K
        sums = {name: np.zeros((K * K, K * K)) for name in TABLE_NAMES}
        squares = {name: np.zeros((K * K, K * K)) for name in TABLE_NAMES}
        chunk = MomentOracle._chunk(K)
        remaining = n_draws
        while remaining > 0:
            n = min(chunk, remaining)
            theta, A = RealizationSampler.draw_batch(spec, rng, n)
            if local:
                A = np.broadcast_to(np.eye(K), (n, K, K))
            MomentOracle._accumulate(theta, A, sums, squares)
            remaining -= n

        means = {name: sums[name] / n_draws for name in TABLE_NAMES}
        errors = {
            name: np.sqrt(
                np.maximum(squares[name] / n_draws - means[name] ** 2, 0.0) / max(n_draws - 1, 1)
            )
            for name in TABLE_NAMES
        }
        return MomentTables(**means, std_error=errors)

    @staticmethod
    def combine_tables(spec: NetworkSpec, n_draws: int, seed: int) -> MomentTables:
        return MomentOracle._estimate(spec, n_draws, Streams.oracle(seed), local=False)

    @staticmethod
    def local_tables(spec: NetworkSpec, n_draws: int, seed: int) -> MomentTables:
        return MomentOracle._estimate(spec, n_draws, Streams.generator(seed, Streams.ORACLE, 1), local=True)

    @staticmethod
    def mc_moment_oracle(
        spec: NetworkSpec,
        sched: Schedule,
        hessians: np.ndarray,
        R_blocks: np.ndarray,
        n_draws: int,
        seed: int,
        logger: Optional[Logger] = None,
    ) -> MomentMatrices:
        """
        Estimate local and combine tables from ``n_draws`` sampled realizations.

        Args:
            spec: validated network
            sched: schedule (provides μ)
            hessians: K×M×M Hessians at w°
            R_blocks: K×M×M gradient-noise covariances
            n_draws: number of realizations (>= 1)
            seed: master seed; the oracle stream is independent of run streams
            logger: optional logger

        Returns:
            MomentMatrices with exact=False and entrywise standard errors
        """
        hessians = np.asarray(hessians, dtype=float)
        if logger:
            logger.info("🎯 Monte-Carlo moment oracle: %d draws (mode=%s)", n_draws, spec.mode.value)
        return MomentMatrices(
            K=spec.K,
            M=hessians.shape[1],
            mu=sched.mu,
            mode=spec.mode,
            hessians=hessians,
            R_blocks=R_blocks,
            local=MomentOracle.local_tables(spec, n_draws, seed),
            combine=MomentOracle.combine_tables(spec, n_draws, seed),
            exact=spec.mode == Mode.FEDSGD,
        )
