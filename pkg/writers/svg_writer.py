"""
Self-contained SVG comparison figure: run-averaged MSD (dB) per iteration,
a dispersion band, and the predicted steady-state level.
"""

from logging import Logger
from pathlib import Path
from typing import Optional

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from diffusion.stats import TrajectoryStats  # noqa: E402
from models.trajectory import Trajectory  # noqa: E402

NOISELESS_NOTE = "theory: MSD = 0 (-inf dB), line suppressed"


class SvgWriter:
    """Render the comparison figure with matplotlib."""

    @staticmethod
    def write(
        logger: Optional[Logger],
        path: Path,
        traj: Trajectory,
        theory_db: Optional[float],
        title: str = "",
    ) -> Path:
        """
        Args:
            logger: optional logger
            path: destination .svg file
            traj: merged trajectory
            theory_db: predicted steady-state level in dB; None or -inf
                adds an annotation instead of the line
            title: figure title

        Returns:
            Path written
        """
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        agg = TrajectoryStats.aggregate(traj)
        iters = agg["iter"].to_numpy()
        mean_db = agg["msd_db_mean"].to_numpy()
        std_db = np.nan_to_num(agg["msd_db_std"].to_numpy(), nan=0.0, posinf=0.0)
        finite = np.isfinite(mean_db)

        with plt.rc_context({"svg.hashsalt": traj.config_digest or "diffusion", "svg.fonttype": "path"}):
            fig, ax = plt.subplots(figsize=(7, 4.5))
            ax.plot(iters[finite], mean_db[finite], color="tab:blue", lw=1.2, label="simulation (mean)")
            ax.fill_between(
                iters[finite],
                mean_db[finite] - std_db[finite],
                mean_db[finite] + std_db[finite],
                color="tab:blue",
                alpha=0.15,
                lw=0,
            )
            if theory_db is not None and np.isfinite(theory_db):
                ax.axhline(theory_db, color="tab:red", ls="--", lw=1.2, label=f"theory ({theory_db:.2f} dB)")
            else:
                ax.text(0.98, 0.95, NOISELESS_NOTE, transform=ax.transAxes, ha="right", va="top")
            ax.set_xlabel("iteration i")
            ax.set_ylabel("MSD (dB)")
            if title:
                ax.set_title(title)
            ax.grid(True, alpha=0.3)
            ax.legend(loc="upper right" if theory_db is not None and np.isfinite(theory_db) else "lower left")
            fig.tight_layout()
            fig.savefig(path, format="svg", metadata={"Date": None})
            plt.close(fig)

        if logger:
            logger.info("🖼️ Wrote %s", path)
        return path
