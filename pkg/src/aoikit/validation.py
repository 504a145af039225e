"""Input checks shared by the estimators and the CLI."""
import numpy as np

from .errors import InvalidLoads


def check_loads_array(X, allow_zero=False):
    """Return ``X`` as a 2-D float array of per-source loads, one row per scenario."""
    arr = np.asarray(X, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr[None, :]
    if arr.ndim != 2 or arr.shape[1] == 0:
        raise InvalidLoads(f"expected a 2-D array of loads, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidLoads("loads must be finite")
    bad = arr < 0 if allow_zero else arr <= 0
    if np.any(bad):
        raise InvalidLoads("loads must be positive")
    return arr


def check_rate(value, name="mu"):
    v = float(value)
    if not np.isfinite(v) or v <= 0:
        raise InvalidLoads(f"{name} must be a positive finite number, got {value!r}")
    return v


def check_is_fitted(est, attrs):
    missing = [a for a in attrs if not hasattr(est, a)]
    if missing:
        raise RuntimeError(f"{type(est).__name__} is not fitted yet; call fit() first")
