import hashlib
import json
from typing import Any, Mapping

import numpy as np


def to_db(value: float) -> float:
    """10·log10 of a nonnegative quantity; -inf for zero."""
    if value <= 0.0:
        return float("-inf")
    return float(10.0 * np.log10(value))


def config_digest(payload: Mapping[str, Any]) -> str:
    """
    Stable digest of a configuration dump.

    Args:
        payload: JSON-serialisable mapping (pydantic ``model_dump(mode="json")``)

    Returns:
        str: first 16 hex chars of the SHA-256 of the canonical JSON text
    """
    canonical = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:16]


def as_vector(value: float | list[float], size: int, name: str) -> np.ndarray:
    """Broadcast a scalar or validate a list to a float vector of ``size``."""
    arr = np.asarray(value, dtype=float)
    if arr.ndim == 0:
        return np.full(size, float(arr))
    if arr.shape != (size,):
        raise ValueError(f"{name} must be a scalar or have {size} entries, got {arr.shape}")
    return arr.copy()
