from logging import Logger
from pathlib import Path

import numpy as np

from engine.prepare import Preparer
from engine.simulator import SimulationResult, Simulator
from engine.theorist import Theorist
from helpers.errors import DigestMismatch
from models.base import ArrayModel
from models.experiment import ExperimentConfig
from models.moments import TheoryReport
from writers.csv_writer import CsvWriter
from writers.report_writer import ReportWriter
from writers.svg_writer import SvgWriter


class ComparisonResult(ArrayModel):
    simulation: SimulationResult
    report: TheoryReport
    gap_db: float
    csv_path: Path
    svg_path: Path
    report_path: Path


class Comparator:
    """Run simulation and theory on one configuration and write the comparison."""

    @staticmethod
    def compare(logger: Logger, cfg: ExperimentConfig, out_dir: Path) -> ComparisonResult:
        """
        Simulate, predict and emit CSV, SVG and the JSON report.

        Args:
            logger: Logger instance
            cfg: validated experiment configuration
            out_dir: output directory

        Returns:
            ComparisonResult with paths and the plateau-vs-theory gap in dB

        Raises:
            DigestMismatch: simulation and theory were produced from different configs
        """
        prepared = Preparer.prepare(logger, cfg)
        simulation = Simulator.simulate(logger, cfg, prepared)
        report = Theorist.theory(logger, cfg, prepared)

        if simulation.trajectory.config_digest != report.config_digest:
            raise DigestMismatch(
                f"Trajectory digest {simulation.trajectory.config_digest} "
                f"does not match report digest {report.config_digest}"
            )

        gap = simulation.steady_db - report.msd_db
        if np.isfinite(gap):
            logger.info("📊 Plateau %.3f dB vs theory %.3f dB (gap %+.3f dB)", simulation.steady_db, report.msd_db, gap)

        out_dir = Path(out_dir)
        stem = cfg.output.stem
        theory_db = report.msd_db if np.isfinite(report.msd_db) else None
        csv_path = CsvWriter.write(
            logger,
            out_dir / f"{stem}.csv",
            simulation.trajectory,
            theory_db=report.msd_db,
            local_steps=cfg.run.record_local_steps,
        )
        svg_path = SvgWriter.write(
            logger, out_dir / f"{stem}.svg", simulation.trajectory, theory_db, title=cfg.name
        )
        report_path = ReportWriter.write(
            logger,
            out_dir / f"{stem}_theory.json",
            report,
            extra={
                "steady_state_msd_db": simulation.steady_db if np.isfinite(simulation.steady_db) else None,
                "gap_db": float(gap) if np.isfinite(gap) else None,
            },
        )
        return ComparisonResult(
            simulation=simulation,
            report=report,
            gap_db=float(gap),
            csv_path=csv_path,
            svg_path=svg_path,
            report_path=report_path,
        )
