"""
Configuration module for the asynchronous diffusion lab.

Process-level settings (logging, thread cap, enumeration and Monte-Carlo
budgets, output directory) come from environment variables, optionally read
from a .env file. Experiment definitions come from JSON files validated by
the ExperimentConfig model.
"""

import json
import logging
import os
from pathlib import Path

from dotenv import load_dotenv
from pydantic import ValidationError
from rich.console import Console
from rich.logging import RichHandler

from helpers.errors import ConfigError
from models.experiment import ExperimentConfig

# Load environment variables from .env file
load_dotenv()


class Config:
    """Configuration class for the asynchronous diffusion lab."""

    # Application configuration
    LOG_LEVEL = os.getenv("LOG_LEVEL", "INFO")
    MAX_WORKERS = int(os.getenv("DIFFUSION_MAX_WORKERS", str(os.cpu_count() or 1)))
    OUTPUT_DIR = os.getenv("DIFFUSION_OUTPUT_DIR", "output")

    # Theory budgets
    ENUMERATION_CAP = int(os.getenv("DIFFUSION_ENUMERATION_CAP", str(2**20)))
    MC_DRAWS = int(os.getenv("DIFFUSION_MC_DRAWS", "100000"))
    DENSE_LIMIT = int(os.getenv("DIFFUSION_DENSE_LIMIT", "10000"))

    @classmethod
    def load_experiment(cls, path: str | Path) -> ExperimentConfig:
        """
        Read and validate an experiment configuration file.

        Args:
            path: Path to a JSON document with network/problem/schedule/run/output sections

        Returns:
            ExperimentConfig: validated configuration

        Raises:
            ConfigError: file missing, unreadable, not JSON, or failing validation
        """
        config_path = Path(path)
        if not config_path.is_file():
            raise ConfigError(f"Config file not found: {config_path}")

        try:
            payload = json.loads(config_path.read_text(encoding="utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as e:
            raise ConfigError(f"Config file {config_path} is not valid JSON: {e}") from e

        return cls.parse_experiment(payload)

    @classmethod
    def parse_experiment(cls, payload: dict) -> ExperimentConfig:
        """Validate a raw mapping into an ExperimentConfig."""
        try:
            return ExperimentConfig.model_validate(payload)
        except ValidationError as e:
            raise ConfigError(f"Invalid experiment configuration:\n{e}") from e

    @classmethod
    def setup_logging(cls):
        """Configure colored logging using Rich."""
        console = Console(stderr=True)

        logging.basicConfig(
            level=getattr(logging, Config.LOG_LEVEL.upper()),
            format="%(message)s",
            datefmt="[%X]",
            handlers=[
                RichHandler(
                    console=console,
                    rich_tracebacks=True,
                    show_path=True,
                    show_time=True,
                )
            ],
        )

        # font lookup chatter from the SVG writer
        logging.getLogger("matplotlib").setLevel(logging.WARNING)

        return logging.getLogger("diffusion")
