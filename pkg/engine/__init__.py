"""
Engine package: orchestration façades used by the command line.

- prepare.py: network, data, limit point and noise constants shared by both paths
- simulator.py: repetitions of the asynchronous recursion
- theorist.py: moment tables, stability report and MSD prediction
- comparator.py: simulation vs. prediction with CSV, SVG and JSON outputs
"""

from engine.comparator import Comparator
from engine.prepare import PreparedExperiment, Preparer
from engine.simulator import SimulationResult, Simulator
from engine.theorist import Theorist

__all__ = [
    "Comparator",
    "PreparedExperiment",
    "Preparer",
    "SimulationResult",
    "Simulator",
    "Theorist",
]
