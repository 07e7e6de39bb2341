"""
CSV output of simulated trajectories.

File layout:

    # config_digest=<digest>, rng=<generator name>
    run,iter,msd_lin,msd_db            (t after iter when local steps are recorded)
    ...
    <blank line>
    iter,msd_db_mean,msd_db_std
    ...

compare appends a constant msd_db_theory column to both sections.
"""

import io
from logging import Logger
from pathlib import Path
from typing import Optional

import pandas as pd

from diffusion.stats import TrajectoryStats
from helpers.constants import (
    AGGREGATE_COLUMNS,
    LOCAL_RUN_COLUMNS,
    RNG_NAME,
    RUN_COLUMNS,
    THEORY_COLUMN,
)
from models.trajectory import Trajectory

FLOAT_FORMAT = "%.12g"


class CsvWriter:
    """Write trajectories as two-section CSV files."""

    @staticmethod
    def _section(frame: pd.DataFrame) -> str:
        buffer = io.StringIO()
        frame.to_csv(buffer, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
        return buffer.getvalue()

    @staticmethod
    def render(traj: Trajectory, theory_db: Optional[float] = None, local_steps: bool = False) -> str:
        runs = TrajectoryStats.run_frame(traj if local_steps else traj.combine_records())
        runs = runs[LOCAL_RUN_COLUMNS if local_steps else RUN_COLUMNS].copy()
        agg = TrajectoryStats.aggregate(traj)[AGGREGATE_COLUMNS].copy()
        if theory_db is not None:
            runs[THEORY_COLUMN] = theory_db
            agg[THEORY_COLUMN] = theory_db

        header = f"# config_digest={traj.config_digest}, rng={RNG_NAME}\n"
        return header + CsvWriter._section(runs) + "\n" + CsvWriter._section(agg)

    @staticmethod
    def write(
        logger: Optional[Logger],
        path: Path,
        traj: Trajectory,
        theory_db: Optional[float] = None,
        local_steps: bool = False,
    ) -> Path:
        """
        Write a trajectory to ``path``.

        Args:
            logger: optional logger
            path: destination file
            traj: merged trajectory
            theory_db: constant theory level to append, if any
            local_steps: include per-local-step rows

        Returns:
            Path written
        """
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(CsvWriter.render(traj, theory_db, local_steps), encoding="utf-8")
        if logger:
            logger.info("💾 Wrote %s", path)
        return path

    @staticmethod
    def read_sections(path: Path) -> tuple[pd.DataFrame, pd.DataFrame]:
        """Parse a file written by ``write`` back into (runs, aggregate) frames."""
        text = Path(path).read_text(encoding="utf-8")
        body = "\n".join(line for line in text.splitlines() if not line.startswith("#"))
        runs_text, agg_text = body.split("\n\n", 1)
        return pd.read_csv(io.StringIO(runs_text)), pd.read_csv(io.StringIO(agg_text))
