"""Input checks shared by the estimators and diagnostics."""
from __future__ import annotations

import numpy as np
from sklearn.utils import check_array, check_consistent_length


def check_series(t, y, *, min_samples: int = 1):
    """Validate paired 1-D sample arrays and return them as float arrays."""
    t = check_array(np.asarray(t, dtype=float).reshape(-1, 1), ensure_min_samples=1).ravel()
    y = check_array(np.asarray(y, dtype=float).reshape(-1, 1), ensure_min_samples=1).ravel()
    check_consistent_length(t, y)
    if t.size < min_samples:
        raise ValueError(f"need at least {min_samples} samples, got {t.size}")
    return t, y


def check_positive(name: str, value, *, allow_zero: bool = False) -> float:
    value = float(value)
    ok = value >= 0 if allow_zero else value > 0
    if not (ok and np.isfinite(value)):
        bound = ">= 0" if allow_zero else "> 0"
        raise ValueError(f"{name} must be finite and {bound}, got {value}")
    return value


def check_window(window, t_min: float, t_max: float):
    lo, hi = (float(w) for w in window)
    if not lo < hi:
        raise ValueError(f"empty window [{lo}, {hi}]")
    if lo < t_min or hi > t_max:
        raise ValueError(f"window [{lo}, {hi}] leaves the sampled range [{t_min}, {t_max}]")
    return lo, hi
