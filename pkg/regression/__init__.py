"""
Regression package: synthetic data, quadratic risks and gradient-noise statistics.
"""

from regression.dataset_store import DatasetStore
from regression.noise import NoiseEstimator
from regression.problem_generator import ProblemGenerator
from regression.risk import RiskEvaluator

__all__ = ["DatasetStore", "NoiseEstimator", "ProblemGenerator", "RiskEvaluator"]
