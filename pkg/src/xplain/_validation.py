"""Small input-validation helpers shared across modules."""

import numbers

import numpy as np


def check_scalar(value, name, *, low=None, high=None, inclusive_low=True,
                 inclusive_high=True):
    """Validate that `value` is a finite real scalar inside the given range."""
    if not isinstance(value, numbers.Real) or isinstance(value, bool):
        raise TypeError(f"{name} must be a real number, got {value!r}")
    v = float(value)
    if not np.isfinite(v):
        raise ValueError(f"{name} must be finite, got {value!r}")
    if low is not None:
        if inclusive_low and v < low:
            raise ValueError(f"{name} must be >= {low}, got {value!r}")
        if not inclusive_low and v <= low:
            raise ValueError(f"{name} must be > {low}, got {value!r}")
    if high is not None:
        if inclusive_high and v > high:
            raise ValueError(f"{name} must be <= {high}, got {value!r}")
        if not inclusive_high and v >= high:
            raise ValueError(f"{name} must be < {high}, got {value!r}")
    return v


def check_array_1d(x, name, *, dtype=float):
    """Coerce to a 1-D numpy array of finite values."""
    arr = np.asarray(x, dtype=dtype)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be 1-dimensional, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} must contain only finite values")
    return arr


def check_matrix(x, name, *, n_cols=None):
    """Coerce to a 2-D numpy float array of finite values."""
    arr = np.asarray(x, dtype=float)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be 2-dimensional, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} must contain only finite values")
    if n_cols is not None and arr.shape[1] != n_cols:
        raise ValueError(f"{name} must have {n_cols} columns, got {arr.shape[1]}")
    return arr
