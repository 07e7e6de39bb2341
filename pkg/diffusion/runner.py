"""
DiffusionRunner: the asynchronous adapt-then-combine recursion.

Each global iteration draws one realization, runs T local SGD steps
(combination matrix I for t < T) and mixes with A_combine after the T-th
step. All agents are updated together; row k of W is w_k.
"""

from concurrent.futures import ThreadPoolExecutor
from logging import Logger
from typing import List, Optional, Sequence, Tuple

import numpy as np

from config import Config
from helpers.constants import DIVERGENCE_THRESHOLD, FLOAT_MAX
from helpers.errors import Diverged, DimensionError, NonFiniteIterate
from models.network import NetworkSpec
from models.problem import AgentDataset
from models.schedule import Realization, Schedule
from models.trajectory import NetworkState, Trajectory
from sampler.realization_sampler import RealizationSampler
from sampler.streams import Streams


class DataBank:
    """Agent datasets stacked as (K, N, M) features and (K, N) labels."""

    def __init__(self, datasets: Sequence[AgentDataset]):
        sizes = {ds.N for ds in datasets}
        if len(sizes) != 1:
            raise DimensionError("All agents must hold the same number of samples")
        self.features = np.stack([ds.features for ds in datasets])
        self.labels = np.stack([ds.labels for ds in datasets])
        self.K, self.N, self.M = self.features.shape


class DiffusionRunner:
    """Run the recursion and record MSD trajectories."""

    @staticmethod
    def _check(values: np.ndarray, iteration: int, local_step: Optional[int], run: Optional[int]) -> None:
        bad = ~np.isfinite(values) | (np.abs(values) > DIVERGENCE_THRESHOLD)
        if bad.any():
            agent = int(np.argmax(bad.any(axis=1)))
            raise NonFiniteIterate(agent, iteration, local_step, run)

    @staticmethod
    def local_step(
        W: np.ndarray,
        real: Realization,
        bank: DataBank,
        t: int,
        batch_size: int,
        rng: np.random.Generator,
        run: Optional[int] = None,
    ) -> np.ndarray:
        """
        ψ_k = w_k − μ_k·∇̂J_k(w_k) for every agent at once.

        Mini-batch indices are drawn uniformly with replacement for all
        agents; agents with μ_k = 0 copy their iterate.

        Raises:
            NonFiniteIterate: an updated row is non-finite or above 1e100
        """
        K = bank.K
        idx = rng.integers(0, bank.N, size=(K, batch_size))
        rows = np.arange(K)[:, None]
        U = bank.features[rows, idx]
        d = bank.labels[rows, idx]
        residual = np.einsum("kbm,km->kb", U, W) - d
        grad = 2.0 * np.einsum("kbm,kb->km", U, residual) / batch_size
        active = real.mu_vec > 0.0
        with np.errstate(over="ignore", invalid="ignore"):
            psi = np.where(active[:, None], W - real.mu_vec[:, None] * grad, W)
        DiffusionRunner._check(psi, real.iteration, t, run)
        return psi

    @staticmethod
    def combine_step(psi: np.ndarray, real: Realization, run: Optional[int] = None) -> np.ndarray:
        """w_k = Σ_l a_{lk} ψ_l, i.e. W = A_combineᵀ Ψ."""
        with np.errstate(over="ignore", invalid="ignore"):
            W = real.A_combine.T @ psi
        DiffusionRunner._check(W, real.iteration, None, run)
        return W

    @staticmethod
    def _stats(W: np.ndarray, w_opt: np.ndarray) -> Tuple[float, float, float]:
        """MSD, fourth moment (saturating at the largest float) and agent spread."""
        sq = np.sum((W - w_opt[None, :]) ** 2, axis=1)
        spread = float(np.max(np.linalg.norm(W - W.mean(axis=0), axis=1)))
        peak = float(sq.max())
        fourth = 0.0
        if peak > 0.0:
            # peak² overflows long before the iterate reaches the divergence guard
            fourth = min(peak * (peak * float(np.mean((sq / peak) ** 2))), FLOAT_MAX)
        return float(sq.mean()), fourth, spread

    @staticmethod
    def run_single(
        spec: NetworkSpec,
        sched: Schedule,
        bank: DataBank,
        w_opt: np.ndarray,
        run: int,
        batch_size: int,
        seed: int,
        record_local_steps: bool = False,
        digest: str = "",
        logger: Optional[Logger] = None,
        log_every: int = 100,
    ) -> Trajectory:
        """
        One repetition from W = 0.

        Raises:
            Diverged: the iterate exploded; carries agent, iteration and run
        """
        W = NetworkState(W=np.zeros((bank.K, bank.M))).W.copy()
        records: List[Tuple[int, int, float, float, float]] = []

        try:
            for i in range(1, sched.iters + 1):
                rng = Streams.iteration(seed, run, i)
                real = RealizationSampler.sample_realization(spec, sched, i, rng)
                for t in range(1, sched.T + 1):
                    psi = DiffusionRunner.local_step(W, real, bank, t, batch_size, rng, run)
                    if t < sched.T:
                        W = psi
                        if record_local_steps:
                            records.append((i, t, *DiffusionRunner._stats(W, w_opt)))
                    else:
                        W = DiffusionRunner.combine_step(psi, real, run)
                        records.append((i, t, *DiffusionRunner._stats(W, w_opt)))
                if logger and i % log_every == 0:
                    logger.debug("run %d: iteration %d, MSD %.3e", run, i, records[-1][2])
        except NonFiniteIterate as e:
            raise Diverged(e.agent, e.iteration, e.local_step, run) from e

        data = np.asarray(records, dtype=float).reshape(-1, 5)
        traj = Trajectory(
            run=np.full(data.shape[0], run),
            iteration=data[:, 0].astype(np.int64),
            t=data[:, 1].astype(np.int64),
            msd=data[:, 2],
            fourth=data[:, 3],
            spread=data[:, 4],
            T=sched.T,
            config_digest=digest,
        )
        if logger:
            logger.info("🏁 Run %d finished: final MSD %.3e", run, data[-1, 2])
        return traj

    @staticmethod
    def run_experiment(
        logger: Optional[Logger],
        spec: NetworkSpec,
        sched: Schedule,
        datasets: Sequence[AgentDataset],
        w_opt: np.ndarray,
        runs: int,
        batch_size: int,
        seed: int,
        record_local_steps: bool = False,
        digest: str = "",
        max_workers: Optional[int] = None,
    ) -> Trajectory:
        """
        R independent repetitions, executed on a thread pool and merged by run index.

        Args:
            logger: optional logger
            spec: validated network
            sched: schedule
            datasets: per-agent datasets
            w_opt: limit point w°
            runs: repetitions R >= 1
            batch_size: mini-batch size B
            seed: master seed
            record_local_steps: also record after every local step
            digest: config digest stamped on the trajectory
            max_workers: thread cap (defaults to Config.MAX_WORKERS)

        Returns:
            Trajectory with all runs

        Raises:
            Diverged: any run diverged
        """
        if runs < 1:
            raise ValueError("runs must be at least 1")
        bank = DataBank(datasets)
        w_opt = np.asarray(w_opt, dtype=float)
        workers = max(1, min(runs, max_workers or Config.MAX_WORKERS))

        def job(run: int) -> Trajectory:
            return DiffusionRunner.run_single(
                spec, sched, bank, w_opt, run, batch_size, seed, record_local_steps, digest, logger
            )

        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(job, range(runs)))
        return Trajectory.concat(parts)
