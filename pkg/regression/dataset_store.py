"""
Binary dump/load of a generated problem.

Layout (little-endian): int64 K, N, M; float64 w* (M); float64 σ_v (K);
float64 features (K·N·M, agent-major, row-major); float64 labels (K·N).
"""

from logging import Logger
from pathlib import Path
from typing import Optional, Union

import numpy as np

from helpers.errors import DimensionError
from models.problem import AgentDataset, Problem

HEADER = np.dtype("<i8")
PAYLOAD = np.dtype("<f8")


class DatasetStore:
    """Persist problems so runs can be replayed on identical data."""

    @staticmethod
    def dump(problem: Problem, path: Union[str, Path], logger: Optional[Logger] = None) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        K, M = problem.K, problem.M
        N = problem.datasets[0].N
        if any(ds.N != N for ds in problem.datasets):
            raise DimensionError("All agents must hold the same number of samples to dump")

        with open(path, "wb") as fh:
            np.asarray([K, N, M], dtype=HEADER).tofile(fh)
            np.asarray(problem.w_star, dtype=PAYLOAD).tofile(fh)
            np.asarray([ds.sigma_v for ds in problem.datasets], dtype=PAYLOAD).tofile(fh)
            np.stack([ds.features for ds in problem.datasets]).astype(PAYLOAD).tofile(fh)
            np.stack([ds.labels for ds in problem.datasets]).astype(PAYLOAD).tofile(fh)

        if logger:
            logger.info("💾 Dumped problem (K=%d, N=%d, M=%d) to %s", K, N, M, path)
        return path

    @staticmethod
    def load(path: Union[str, Path], logger: Optional[Logger] = None) -> Problem:
        """
        Read a problem written by ``dump``.

        Raises:
            FileNotFoundError: path does not exist
            DimensionError: truncated or inconsistent file
        """
        path = Path(path)
        with open(path, "rb") as fh:
            header = np.fromfile(fh, dtype=HEADER, count=3)
            if header.size != 3:
                raise DimensionError(f"{path} is missing its header")
            K, N, M = (int(v) for v in header)
            body = np.fromfile(fh, dtype=PAYLOAD)

        expected = M + K + K * N * M + K * N
        if body.size != expected:
            raise DimensionError(f"{path} holds {body.size} values, expected {expected}")

        w_star = body[:M]
        sigma_v = body[M : M + K]
        offset = M + K
        features = body[offset : offset + K * N * M].reshape(K, N, M)
        labels = body[offset + K * N * M :].reshape(K, N)

        datasets = [
            AgentDataset(features=features[k], labels=labels[k], sigma_v=float(sigma_v[k]), w_star=w_star)
            for k in range(K)
        ]
        if logger:
            logger.info("📂 Loaded problem (K=%d, N=%d, M=%d) from %s", K, N, M, path)
        return Problem(datasets=datasets, w_star=w_star)
