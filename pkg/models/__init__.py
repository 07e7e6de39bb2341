"""
Pydantic models for the asynchronous diffusion lab.

- network.py: NetworkSpec, PerronResult, Mode
- schedule.py: Schedule, Realization
- problem.py: AgentDataset, QuadraticRisk, NoiseModel, RegularityConstants, Problem
- trajectory.py: NetworkState, Trajectory
- moments.py: MomentTables, MomentMatrices, StabilityReport, TheoryReport
- experiment.py: ExperimentConfig and its sections
"""
