"""Effective Rayleigh distance (ERD): where a far-field beam stops being good enough.

The closed forms scale with ``R^2 xi / lambda``; :func:`erd_numeric` scans the
defining condition directly with exact inner products.
"""

from __future__ import annotations

import math
from typing import NamedTuple, Sequence

import numpy as np

from .correlation import _arc, range_scale, xi_factor
from .exceptions import DomainError
from .geometry import Cura2DGeometry, PolarDirection, SphericalLocation, polar_unit_vector, spherical_to_polar
from .specfun import bessel_j0_inverse
from .wavefield import _range_offsets, focusing_vector, steering_vector

SCAN_POINTS_PER_DECADE = 200


class Erd2DBranches(NamedTuple):
    row: float
    arc: float

    @property
    def value(self) -> float:
        return min(self.row, self.arc)


def rayleigh_distance(aperture: float, wavelength: float) -> float:
    if not aperture > 0:
        raise DomainError("aperture must be positive")
    return 2.0 * aperture**2 / wavelength


def _loss_root(delta_gain: float) -> float:
    if not 0.0 < delta_gain < 1.0:
        raise DomainError("delta_gain must lie in (0, 1)")
    return bessel_j0_inverse(1.0 - delta_gain)


def erd_1d(geom, direction: PolarDirection, delta_gain: float):
    """pi R^2 xi / (lambda J0^-1(1 - delta_gain)); vectorised over directions."""
    arc = _arc(geom)
    return range_scale(arc) * xi_factor(direction, arc.bend_half_angle) / _loss_root(delta_gain)


def erd_2d_branches(geom: Cura2DGeometry, direction: PolarDirection, delta_gain: float) -> Erd2DBranches:
    """Both candidate distances; the row branch is +inf for a single row."""
    x = _loss_root(delta_gain)
    arc_val = erd_1d(geom.arc, direction, delta_gain)
    if geom.n_rows == 1:
        row_val = np.full_like(np.asarray(arc_val, dtype=float), np.inf)
    else:
        rho, varphi = direction
        xi_x = (np.sin(rho) * np.cos(varphi)) ** 2
        row_val = math.pi * geom.row_aperture**2 * xi_x / (4.0 * geom.wavelength * x)
    if np.ndim(arc_val) == 0:
        return Erd2DBranches(float(row_val), float(arc_val))
    return Erd2DBranches(np.asarray(row_val), np.asarray(arc_val))


def erd_2d(geom: Cura2DGeometry, direction: PolarDirection, delta_gain: float):
    b = erd_2d_branches(geom, direction, delta_gain)
    return np.minimum(b.row, b.arc) if np.ndim(b.arc) else min(b.row, b.arc)


def erd(geom, direction: PolarDirection, delta_gain: float):
    """Dispatch to the 1-D or 2-D closed form."""
    if isinstance(geom, Cura2DGeometry):
        return erd_2d(geom, direction, delta_gain)
    return erd_1d(geom, direction, delta_gain)


def far_field_mismatch(geom, loc: SphericalLocation) -> float:
    """|b(loc)^H a(direction of loc)|, computed from exact distances."""
    direction = spherical_to_polar(loc.theta, loc.phi)
    b = focusing_vector(geom, loc)
    a = steering_vector(geom, direction)
    return float(abs(np.vdot(b, a)))


def _mismatch_along(geom, direction: PolarDirection, ranges: np.ndarray) -> np.ndarray:
    positions = geom.positions()
    k = geom.wavenumber
    unit = polar_unit_vector(direction)
    proj = positions @ unit
    offs = _range_offsets(positions, np.broadcast_to(unit, (ranges.size, 3)), ranges)
    # b^H a = sum exp(+j k (r_i - r)) exp(+j k u.q) / n
    return np.abs(np.exp(1j * k * (offs + proj)).mean(axis=1))


def erd_numeric(geom, direction: PolarDirection, delta_gain: float, r_scan_max: float,
                r_scan_min: float | None = None) -> float:
    """Largest range with 1 - mismatch >= delta_gain on a log grid, refined by bisection."""
    if not math.isfinite(r_scan_max) or r_scan_max <= 0:
        raise DomainError("r_scan_max must be finite and positive")
    lo_r = geom.wavelength if r_scan_min is None else r_scan_min
    decades = math.log10(r_scan_max / lo_r)
    n = max(2, int(math.ceil(decades * SCAN_POINTS_PER_DECADE)) + 1)
    grid = np.logspace(math.log10(lo_r), math.log10(r_scan_max), n)
    loss = 1.0 - _mismatch_along(geom, direction, grid)
    hit = np.nonzero(loss >= delta_gain)[0]
    if hit.size == 0:
        return 0.0
    k = int(hit[-1])
    if k == n - 1:
        return float(grid[-1])
    lo, hi = float(grid[k]), float(grid[k + 1])
    for _ in range(60):
        mid = math.sqrt(lo * hi)
        if 1.0 - _mismatch_along(geom, direction, np.array([mid]))[0] >= delta_gain:
            lo = mid
        else:
            hi = mid
    return lo


def erd_contour(geom, delta_gain: float, directions: Sequence[PolarDirection]) -> list[tuple[PolarDirection, float]]:
    if len(directions) == 0:
        raise ValueError("direction grid is empty")
    rho = np.array([d[0] for d in directions], dtype=float)
    varphi = np.array([d[1] for d in directions], dtype=float)
    values = np.atleast_1d(erd(geom, PolarDirection(rho, varphi), delta_gain))
    return [(PolarDirection(float(a), float(b)), float(v)) for a, b, v in zip(rho, varphi, values)]
