"""Small input-validation helpers shared across the package."""

from __future__ import annotations

import numpy as np


def as_float_array(x, name: str = "array", ndim: int | None = None) -> np.ndarray:
    """Coerce to a float64 ndarray and reject non-finite entries."""
    arr = np.asarray(x, dtype=np.float64)
    if ndim is not None and arr.ndim != ndim:
        raise ValueError(f"{name} must be {ndim}-dimensional, got shape {arr.shape}")
    if arr.size and not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite values")
    return arr


def check_binary_labels(y, name: str = "labels") -> np.ndarray:
    """Validate 0/1 labels and return them as an int array."""
    arr = np.asarray(y)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional")
    if arr.size == 0:
        raise ValueError(f"{name} is empty")
    as_int = arr.astype(np.int64, copy=False) if arr.dtype.kind in "iub" else None
    if as_int is None:
        flo = np.asarray(arr, dtype=np.float64)
        if not np.all(np.isin(flo, (0.0, 1.0))):
            raise ValueError(f"{name} must contain only 0 and 1")
        as_int = flo.astype(np.int64)
    elif not np.all(np.isin(as_int, (0, 1))):
        raise ValueError(f"{name} must contain only 0 and 1")
    return as_int


def check_consistent_length(*arrays, names: str = "inputs") -> int:
    lengths = {len(a) for a in arrays}
    if len(lengths) > 1:
        raise ValueError(f"{names} have mismatched lengths: {sorted(lengths)}")
    return lengths.pop()
