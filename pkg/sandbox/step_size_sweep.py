"""
Step-size sweep: predicted (and optionally simulated) steady-state MSD for
a list of step sizes on one experiment. Halving μ should take about 3 dB
off the plateau.

    python -m sandbox.step_size_sweep --preset case1 --desk --mu 0.02 0.01 0.005 --simulate
"""

import argparse
import sys
from logging import Logger
from pathlib import Path
from typing import Sequence

import numpy as np
import pandas as pd

from config import Config
from engine.prepare import Preparer
from engine.simulator import Simulator
from engine.theorist import Theorist
from helpers.errors import DiffusionError
from models.experiment import ExperimentConfig
from models.schedule import Schedule
from presets import PRESET_NAMES, preset


def sweep(logger: Logger, cfg: ExperimentConfig, mus: Sequence[float], simulate: bool = False) -> pd.DataFrame:
    """
    One row per step size: mu, rho, msd_theory_db and (with ``simulate``) msd_sim_db.

    The network, data and noise constants are prepared once; only the
    schedule changes between rows.
    """
    prepared = Preparer.prepare(logger, cfg)
    rows = []
    for mu in mus:
        sched = Schedule(T=cfg.schedule.T, iters=cfg.schedule.iters, mu=mu)
        variant = cfg.model_copy(update={"schedule": sched})
        report = Theorist.theory(logger, variant, prepared)
        row = {"mu": mu, "rho": report.rho, "msd_theory_db": report.msd_db}
        if simulate:
            row["msd_sim_db"] = Simulator.simulate(logger, variant, prepared).steady_db
        rows.append(row)

    frame = pd.DataFrame(rows)
    frame["theory_step_db"] = frame["msd_theory_db"].diff()
    return frame


def main() -> int:
    parser = argparse.ArgumentParser(description="Steady-state MSD against the step size")
    source = parser.add_mutually_exclusive_group(required=True)
    source.add_argument("--config", type=Path)
    source.add_argument("--preset", choices=PRESET_NAMES)
    parser.add_argument("--desk", action="store_true")
    parser.add_argument("--mu", type=float, nargs="+", required=True)
    parser.add_argument("--simulate", action="store_true")
    parser.add_argument("--out", type=Path, help="CSV destination")
    args = parser.parse_args()

    logger = Config.setup_logging()
    logger.info("=" * 60)
    logger.info("🔬 Step-size sweep over %s", ", ".join(f"{mu:g}" for mu in args.mu))
    logger.info("=" * 60)

    try:
        cfg = Config.load_experiment(args.config) if args.config else preset(args.preset, desk=args.desk)
        frame = sweep(logger, cfg, sorted(args.mu, reverse=True), simulate=args.simulate)
    except DiffusionError as e:
        logger.error("❌ Sweep failed: %s", e)
        return 1

    for row in frame.itertuples(index=False):
        logger.info(
            "μ=%-8g ρ=%.6f theory %.3f dB%s",
            row.mu,
            row.rho,
            row.msd_theory_db,
            f", simulated {row.msd_sim_db:.3f} dB" if args.simulate else "",
        )
    if args.out:
        args.out.parent.mkdir(parents=True, exist_ok=True)
        frame.to_csv(args.out, index=False, float_format="%.6g")
        logger.info("💾 Wrote %s", args.out)
    if np.isfinite(frame["theory_step_db"].iloc[1:]).all():
        logger.info("📉 Mean change per step: %.3f dB", float(frame["theory_step_db"].iloc[1:].mean()))
    return 0


if __name__ == "__main__":
    sys.exit(main())
