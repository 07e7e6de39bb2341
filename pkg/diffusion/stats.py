"""
Summary statistics of MSD trajectories.
"""

import math
from typing import Tuple

import numpy as np
import pandas as pd

from helpers.errors import EmptyTail
from helpers.utils import to_db
from models.trajectory import Trajectory


def _db(values: np.ndarray) -> np.ndarray:
    values = np.asarray(values, dtype=float)
    out = np.full(values.shape, -np.inf)
    positive = values > 0.0
    out[positive] = 10.0 * np.log10(values[positive])
    return out


class TrajectoryStats:
    @staticmethod
    def steady_state_msd(traj: Trajectory, tail: float) -> Tuple[float, float]:
        """
        Mean combine-instant MSD over the last ⌈f·I⌉ iterations of every run.

        Args:
            traj: trajectory of one or more runs
            tail: fraction f in (0, 1]

        Returns:
            Tuple of (linear value, dB value)

        Raises:
            EmptyTail: no record falls inside the tail window
        """
        if not 0.0 < tail <= 1.0:
            raise EmptyTail(f"Tail fraction must lie in (0, 1], got {tail}")
        records = traj.combine_records()
        if records.msd.size == 0:
            raise EmptyTail("Trajectory holds no combine records")
        last = int(records.iteration.max())
        width = math.ceil(tail * last)
        mask = records.iteration > last - width
        if not mask.any():
            raise EmptyTail(f"No records in the last {width} iterations")
        value = float(records.msd[mask].mean())
        return value, to_db(value)

    @staticmethod
    def run_frame(traj: Trajectory) -> pd.DataFrame:
        """Per-record rows run, iter, [t,] msd_lin, msd_db."""
        frame = traj.to_frame()
        frame["msd_db"] = _db(frame["msd_lin"].to_numpy())
        return frame

    @staticmethod
    def aggregate(traj: Trajectory) -> pd.DataFrame:
        """
        Per-iteration statistics across runs at combine instants:
        msd_db_mean is the dB value of the run-averaged MSD and msd_db_std the
        spread of the per-run dB values.
        """
        frame = TrajectoryStats.run_frame(traj.combine_records())
        grouped = frame.groupby("iter", sort=True)
        with np.errstate(invalid="ignore"):
            out = pd.DataFrame(
                {
                    "msd_lin_mean": grouped["msd_lin"].mean(),
                    "msd_db_std": grouped["msd_db"].std(ddof=0),
                    "fourth_mean": grouped["fourth"].mean(),
                    "spread_max": grouped["spread"].max(),
                }
            )
        out["msd_db_mean"] = _db(out["msd_lin_mean"].to_numpy())
        return out.reset_index()

    @staticmethod
    def tail_fourth_moment(traj: Trajectory, tail: float) -> float:
        """Tail average of (1/K)Σ‖w̃_k‖⁴ at combine instants."""
        records = traj.combine_records()
        if records.fourth.size == 0:
            raise EmptyTail("Trajectory holds no combine records")
        last = int(records.iteration.max())
        mask = records.iteration > last - math.ceil(tail * last)
        return float(records.fourth[mask].mean())

    @staticmethod
    def time_to_plateau(traj: Trajectory, tail: float = 0.1, band_db: float = 1.0) -> int:
        """
        First iteration at which the smoothed run-averaged MSD comes within
        ``band_db`` of the steady-state level.
        """
        level_db = TrajectoryStats.steady_state_msd(traj, tail)[1]
        agg = TrajectoryStats.aggregate(traj)
        window = max(1, len(agg) // 50)
        smooth = agg["msd_lin_mean"].rolling(window, min_periods=1).mean().to_numpy()
        hits = np.nonzero(_db(smooth) <= level_db + band_db)[0]
        if hits.size == 0:
            return int(agg["iter"].iloc[-1])
        return int(agg["iter"].iloc[hits[0]])
