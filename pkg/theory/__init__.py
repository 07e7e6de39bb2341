"""
Theory package: block calculus, moment tables, steady-state MSD and stability.
"""

from theory.calculus import BlockCalculus
from theory.moment_builder import MomentBuilder
from theory.msd import MSDAnalyzer
from theory.oracle import MomentOracle
from theory.stability import StabilityAnalyzer

__all__ = ["BlockCalculus", "MomentBuilder", "MomentOracle", "MSDAnalyzer", "StabilityAnalyzer"]
