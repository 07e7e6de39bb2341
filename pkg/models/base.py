"""
Shared pydantic base for models that carry numpy arrays.
"""

import numpy as np
from pydantic import BaseModel, ConfigDict


def frozen_array(value, dtype=float) -> np.ndarray:
    """Copy ``value`` into a read-only numpy array."""
    arr = np.array(value, dtype=dtype, copy=True)
    arr.setflags(write=False)
    return arr


class ArrayModel(BaseModel):
    """Immutable model allowed to hold numpy arrays."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)
