"""Input validation helpers shared by the estimators and the CLI."""

from __future__ import annotations

import numbers

import numpy as np

from .exceptions import InvalidGeometryError
from .geometry import Cura1DGeometry, Cura2DGeometry


def check_geometry(geom):
    if not isinstance(geom, (Cura1DGeometry, Cura2DGeometry)):
        raise InvalidGeometryError(
            f"expected Cura1DGeometry or Cura2DGeometry, got {type(geom).__name__}")
    return geom


def check_channels(X, n_elements: int) -> np.ndarray:
    """Return X as a 2-D complex array with ``n_elements`` columns."""
    arr = np.asarray(X)
    if arr.ndim == 1:
        arr = arr[None, :]
    if arr.ndim != 2:
        raise ValueError(f"channels must be 1-D or 2-D, got shape {arr.shape}")
    if arr.shape[1] != n_elements:
        raise ValueError(f"channels have {arr.shape[1]} entries per row, expected {n_elements}")
    if arr.shape[0] == 0:
        raise ValueError("no channels given")
    arr = arr.astype(complex, copy=False)
    if not np.all(np.isfinite(arr)):
        raise ValueError("channels contain non-finite values")
    return arr


def check_open_unit(value, name: str) -> float:
    if not isinstance(value, numbers.Real) or not 0.0 < float(value) < 1.0:
        raise ValueError(f"{name} must be a real number in (0, 1), got {value!r}")
    return float(value)


def check_positive_int(value, name: str) -> int:
    if isinstance(value, bool) or not isinstance(value, numbers.Integral) or value < 1:
        raise ValueError(f"{name} must be a positive integer, got {value!r}")
    return int(value)
