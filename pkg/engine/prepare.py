"""
Shared preparation of an experiment: network, data, limit point and constants.
"""

from logging import Logger
from typing import List, Optional

import numpy as np

from models.base import ArrayModel
from models.experiment import ExperimentConfig
from models.network import NetworkSpec, PerronResult
from models.problem import NoiseModel, Problem, QuadraticRisk, RegularityConstants
from regression.noise import NoiseEstimator
from regression.problem_generator import ProblemGenerator
from regression.risk import RiskEvaluator
from sampler.streams import Streams
from topology.combination import CombinationMoments
from topology.network_builder import NetworkBuilder
from topology.validator import NetworkValidator
from helpers.utils import as_vector


class PreparedExperiment(ArrayModel):
    """Everything simulation and theory share for one configuration."""

    config: ExperimentConfig
    spec: NetworkSpec
    perron: PerronResult
    problem: Problem
    risks: List[QuadraticRisk]
    w_opt: np.ndarray
    w_unweighted: np.ndarray
    constants: RegularityConstants
    noise: NoiseModel

    @property
    def hessians(self) -> np.ndarray:
        return np.stack([r.hessian for r in self.risks])

    @property
    def limit_point_drift(self) -> float:
        return float(np.linalg.norm(self.w_opt - self.w_unweighted))

    @property
    def digest(self) -> str:
        return self.config.digest


class Preparer:
    """Build a PreparedExperiment from a validated configuration."""

    @staticmethod
    def prepare(logger: Optional[Logger], cfg: ExperimentConfig) -> PreparedExperiment:
        """
        Args:
            logger: optional logger
            cfg: validated experiment configuration

        Returns:
            PreparedExperiment

        Raises:
            NetworkError: invalid or non-primitive network
            ProblemError: degenerate data or singular weighted system
        """
        seed = cfg.run.seed
        spec = NetworkBuilder.from_section(cfg.network, Streams.topology(seed), logger)
        NetworkValidator.validate_network(spec)
        perron = CombinationMoments.perron(CombinationMoments.mean_matrix(spec))

        prob = cfg.problem
        problem = ProblemGenerator.generate_problem(
            K=spec.K,
            N=prob.N,
            M=prob.M,
            Ru=np.diag(as_vector(prob.ru, prob.M, "ru")),
            Rw=np.diag(as_vector(prob.rw, prob.M, "rw")),
            sigma_v=as_vector(prob.sigma_v, spec.K, "sigma_v"),
            seed=seed,
            logger=logger,
        )
        risks = [RiskEvaluator.risk_from_dataset(ds) for ds in problem.datasets]
        w_opt = RiskEvaluator.limit_point(risks, perron.pbar, spec.q)
        w_unweighted = RiskEvaluator.unweighted_minimizer(risks)

        constants, noise = NoiseEstimator.estimate_constants(
            risks,
            problem.datasets,
            w_opt,
            cfg.run.noise_points,
            Streams.generator(seed, Streams.ORACLE, 2),
            batch_size=prob.batch,
        )

        if logger:
            logger.info(
                "📏 Limit point ready: drift from unweighted optimum %.3e, sigma_s2=%.3e, beta_s2=%.3e",
                float(np.linalg.norm(w_opt - w_unweighted)),
                noise.sigma_s2,
                noise.beta_s2,
            )

        return PreparedExperiment(
            config=cfg,
            spec=spec,
            perron=perron,
            problem=problem,
            risks=risks,
            w_opt=w_opt,
            w_unweighted=w_unweighted,
            constants=constants,
            noise=noise,
        )
