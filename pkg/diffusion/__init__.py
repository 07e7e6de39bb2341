"""
Diffusion package: the asynchronous adapt-then-combine recursion and trajectory statistics.
"""

from diffusion.runner import DataBank, DiffusionRunner
from diffusion.stats import TrajectoryStats

__all__ = ["DataBank", "DiffusionRunner", "TrajectoryStats"]
