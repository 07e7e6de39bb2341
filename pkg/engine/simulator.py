from logging import Logger
from typing import Optional

from diffusion.runner import DiffusionRunner
from diffusion.stats import TrajectoryStats
from engine.prepare import PreparedExperiment, Preparer
from models.base import ArrayModel
from models.experiment import ExperimentConfig
from models.trajectory import Trajectory


class SimulationResult(ArrayModel):
    trajectory: Trajectory
    steady_lin: float
    steady_db: float


class Simulator:
    """Run the repetitions of an experiment and summarise the steady state."""

    @staticmethod
    def simulate(
        logger: Logger,
        cfg: ExperimentConfig,
        prepared: Optional[PreparedExperiment] = None,
    ) -> SimulationResult:
        """
        Simulate ``cfg.run.runs`` repetitions of the asynchronous recursion.

        Args:
            logger: Logger instance for progress lines
            cfg: validated experiment configuration
            prepared: shared preparation (built here when omitted)

        Returns:
            SimulationResult with the merged trajectory and the tail average

        Raises:
            Diverged: a run left the stable region
        """
        prepared = prepared or Preparer.prepare(logger, cfg)
        logger.info(
            "🏃 Simulating %d run(s) x %d iterations (T=%d, mu=%g)",
            cfg.run.runs,
            cfg.schedule.iters,
            cfg.schedule.T,
            cfg.schedule.mu,
        )
        traj = DiffusionRunner.run_experiment(
            logger,
            prepared.spec,
            cfg.schedule,
            prepared.problem.datasets,
            prepared.w_opt,
            runs=cfg.run.runs,
            batch_size=cfg.problem.batch,
            seed=cfg.run.seed,
            record_local_steps=cfg.run.record_local_steps,
            digest=prepared.digest,
        )
        steady_lin, steady_db = TrajectoryStats.steady_state_msd(traj, cfg.run.tail)
        logger.info("✅ Steady-state MSD %.3f dB (tail %.0f%%)", steady_db, 100 * cfg.run.tail)
        return SimulationResult(trajectory=traj, steady_lin=steady_lin, steady_db=steady_db)
