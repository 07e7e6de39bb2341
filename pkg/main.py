"""
Command-line entry point.

    python main.py simulate --config experiment.json [--out DIR] [--seed S] [--runs R]
    python main.py theory   --preset case1 --desk
    python main.py compare  --config experiment.json
    python main.py preset   case1 --desk --out case1_desk.json
    python main.py preset   case1 --paper-scale

Exit codes: 0 success, 1 configuration or unexpected error, 2 numerical
failure (divergence, unstable spectrum, enumeration cap with --exact).
"""

import argparse
import json
import sys
from logging import Logger
from pathlib import Path
from typing import List, Optional

from config import Config
from engine.comparator import Comparator
from engine.prepare import Preparer
from engine.simulator import Simulator
from engine.theorist import Theorist
from helpers.errors import (
    ConfigError,
    DiffusionError,
    EnumerationCapExceeded,
    NonFiniteIterate,
    ShapeError,
    UnstableSpectrum,
)
from models.experiment import ExperimentConfig
from presets import PRESET_NAMES, preset
from writers.csv_writer import CsvWriter
from writers.report_writer import ReportWriter

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NUMERICAL = 2

NUMERICAL_ERRORS = (NonFiniteIterate, UnstableSpectrum, EnumerationCapExceeded, ShapeError)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="diffusion-lab",
        description="Asynchronous diffusion learning: simulation and steady-state MSD theory",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    for name, help_text in (
        ("simulate", "run the recursion and write the MSD trajectory CSV"),
        ("theory", "evaluate the steady-state MSD prediction and stability report"),
        ("compare", "simulate and predict, then write CSV, SVG and the report"),
    ):
        cmd = sub.add_parser(name, help=help_text)
        source = cmd.add_mutually_exclusive_group(required=True)
        source.add_argument("--config", type=Path, help="experiment JSON file")
        source.add_argument("--preset", choices=PRESET_NAMES, help="named preset")
        cmd.add_argument("--out", type=Path, help="output directory")
        cmd.add_argument("--seed", type=int, help="override the master seed")
        cmd.add_argument("--runs", type=int, help="override the number of repetitions")
        cmd.add_argument("--desk", action="store_true", help="desk-scale variant of --preset")
        cmd.add_argument(
            "--paper-scale",
            "--full-scale",
            dest="full_scale",
            action="store_true",
            help="N = 10^6 samples for --preset",
        )
        cmd.add_argument("--exact", action="store_true", help="refuse Monte-Carlo moment fallback")
        cmd.add_argument("--mc-draws", type=int, help="draws for Monte-Carlo moments")

    cmd = sub.add_parser("preset", help="write a preset configuration as JSON")
    cmd.add_argument("name", help=f"one of {', '.join(PRESET_NAMES)}")
    cmd.add_argument("--desk", action="store_true")
    cmd.add_argument("--paper-scale", "--full-scale", dest="full_scale", action="store_true")
    cmd.add_argument("--out", type=Path, help="destination file (stdout when omitted)")
    return parser


def resolve_config(args: argparse.Namespace) -> ExperimentConfig:
    """Load the config (file or preset) and apply command-line overrides."""
    if args.config is not None:
        cfg = Config.load_experiment(args.config)
    else:
        cfg = preset(args.preset, desk=args.desk, full_scale=args.full_scale)

    payload = cfg.model_dump(mode="json")
    if args.seed is not None:
        payload["run"]["seed"] = args.seed
    if args.runs is not None:
        payload["run"]["runs"] = args.runs
    if args.exact:
        payload["run"]["exact"] = True
    if args.mc_draws is not None:
        payload["run"]["mc_draws"] = args.mc_draws
    if args.out is not None:
        payload["output"]["directory"] = str(args.out)
    return Config.parse_experiment(payload)


def cmd_simulate(logger: Logger, cfg: ExperimentConfig) -> Path:
    result = Simulator.simulate(logger, cfg)
    return CsvWriter.write(
        logger,
        Path(cfg.output.directory) / f"{cfg.output.stem}.csv",
        result.trajectory,
        local_steps=cfg.run.record_local_steps,
    )


def cmd_theory(logger: Logger, cfg: ExperimentConfig) -> Path:
    report = Theorist.theory(logger, cfg, Preparer.prepare(logger, cfg))
    return ReportWriter.write(logger, Path(cfg.output.directory) / f"{cfg.output.stem}_theory.json", report)


def cmd_compare(logger: Logger, cfg: ExperimentConfig) -> Path:
    result = Comparator.compare(logger, cfg, Path(cfg.output.directory))
    return result.csv_path


def cmd_preset(args: argparse.Namespace) -> str:
    cfg = preset(args.name, desk=args.desk, full_scale=args.full_scale)
    text = json.dumps(cfg.model_dump(mode="json"), indent=2) + "\n"
    if args.out is not None:
        args.out.parent.mkdir(parents=True, exist_ok=True)
        args.out.write_text(text, encoding="utf-8")
    return text


COMMANDS = {"simulate": cmd_simulate, "theory": cmd_theory, "compare": cmd_compare}


def main(argv: Optional[List[str]] = None) -> int:
    """Parse arguments, run one subcommand and map errors to exit codes."""
    args = build_parser().parse_args(argv)
    logger = Config.setup_logging()

    logger.info("=" * 60)
    logger.info("🚀 diffusion-lab: %s", args.command)
    logger.info("=" * 60)

    try:
        if args.command == "preset":
            text = cmd_preset(args)
            if args.out is None:
                sys.stdout.write(text)
            else:
                logger.info("💾 Wrote %s", args.out)
            return EXIT_OK

        cfg = resolve_config(args)
        logger.info("⚙️ Config %s (digest %s)", cfg.name, cfg.digest)
        path = COMMANDS[args.command](logger, cfg)
    except ConfigError as e:
        logger.error("❌ Configuration error: %s", e)
        return EXIT_CONFIG
    except NUMERICAL_ERRORS as e:
        logger.error("❌ Numerical failure: %s", e)
        return EXIT_NUMERICAL
    except DiffusionError as e:
        logger.error("❌ %s: %s", type(e).__name__, e)
        return EXIT_CONFIG
    except Exception as e:
        logger.exception("🔴 Unexpected error: %s", e)
        return EXIT_CONFIG

    logger.info("=" * 60)
    logger.info("✅ Done: %s", path)
    logger.info("=" * 60)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
