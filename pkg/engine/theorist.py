from logging import Logger
from typing import Optional

from engine.prepare import PreparedExperiment, Preparer
from models.experiment import ExperimentConfig
from models.moments import TheoryReport
from theory.moment_builder import MomentBuilder
from theory.msd import MSDAnalyzer
from theory.stability import StabilityAnalyzer


class Theorist:
    """Evaluate the steady-state MSD prediction and stability quantities."""

    @staticmethod
    def theory(
        logger: Logger,
        cfg: ExperimentConfig,
        prepared: Optional[PreparedExperiment] = None,
    ) -> TheoryReport:
        """
        Build moment tables, the stability report and the MSD prediction.

        Args:
            logger: Logger instance for progress lines
            cfg: validated experiment configuration
            prepared: shared preparation (built here when omitted)

        Returns:
            TheoryReport stamped with the config digest and limit-point drift

        Raises:
            UnstableSpectrum: the iteration operator has spectral radius >= 1
            EnumerationCapExceeded: exact moments requested but too many events
        """
        prepared = prepared or Preparer.prepare(logger, cfg)
        sched = cfg.schedule

        stability = StabilityAnalyzer.stability_report(
            prepared.constants,
            prepared.spec,
            sched,
            beta_s2=prepared.noise.beta_s2,
            sigma_s2=prepared.noise.sigma_s2,
        )
        logger.info(
            "🧭 mu_max=%.4g, gamma=%.6f (%s)",
            stability.mu_max,
            stability.gamma,
            "admissible" if stability.admissible else "inadmissible",
        )

        moments = MomentBuilder.build_moments(
            prepared.spec,
            sched,
            prepared.hessians,
            prepared.noise.Rk,
            exact=cfg.run.exact,
            mc_draws=cfg.run.mc_draws,
            seed=cfg.run.seed,
            logger=logger,
        )
        report = MSDAnalyzer.theoretical_msd(
            moments,
            sched,
            stability=stability,
            form=cfg.run.msd_form,
            alpha_s=prepared.constants.alpha_s,
            logger=logger,
        )
        return report.model_copy(
            update={
                "limit_point_drift": prepared.limit_point_drift,
                "config_digest": prepared.digest,
            }
        )
