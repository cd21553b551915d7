"""Array layouts for bent (arc) apertures and the direction coordinate systems.

A 1-D array places ``n_elements`` on a circular arc in the yz-plane with
half opening angle ``bend_half_angle``; a 2-D array stacks ``n_rows`` copies
of that arc along x.  Directions are given either as spherical angles
(theta from +z, phi from +x in the xy-plane) or as polar angles about the
array normal +x: ``rho`` is the deviation from the normal and ``varphi`` the
rotation about it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .exceptions import InvalidGeometryError

SPEED_OF_LIGHT = 299_792_458.0

# Below this bend angle the arc formulas lose precision and the closed-form
# straight-line layout is used instead.
STRAIGHT_LIMIT = 1e-6


class SphericalLocation(NamedTuple):
    """User position: range (m), elevation theta from +z, azimuth phi."""

    range: float | np.ndarray
    theta: float | np.ndarray
    phi: float | np.ndarray


class PolarDirection(NamedTuple):
    """Direction measured from the array normal (+x)."""

    rho: float | np.ndarray
    varphi: float | np.ndarray


@dataclass(frozen=True)
class Cura1DGeometry:
    """Uniformly sampled circular-arc array.

    The radius follows from the other parameters, ``R = (N-1) d / (2 beta)``,
    so the arc length ``L = (N-1) d = 2 beta R`` holds by construction.
    """

    n_elements: int
    bend_half_angle: float
    wavelength: float
    spacing: float | None = None

    def __post_init__(self):
        if int(self.n_elements) != self.n_elements or self.n_elements < 2:
            raise InvalidGeometryError("an arc array needs at least 2 elements")
        object.__setattr__(self, "n_elements", int(self.n_elements))
        if not (math.isfinite(self.wavelength) and self.wavelength > 0):
            raise InvalidGeometryError("wavelength must be positive")
        if self.spacing is None:
            object.__setattr__(self, "spacing", 0.5 * self.wavelength)
        if not (math.isfinite(self.spacing) and self.spacing > 0):
            raise InvalidGeometryError("element spacing must be positive")
        beta = self.bend_half_angle
        if not (math.isfinite(beta) and 0.0 <= beta <= 0.5 * math.pi):
            raise InvalidGeometryError("bend half-angle must lie in [0, pi/2]")

    @classmethod
    def from_radius(cls, n_elements: int, radius: float, wavelength: float,
                    spacing: float | None = None) -> "Cura1DGeometry":
        d = 0.5 * wavelength if spacing is None else spacing
        if not radius > 0:
            raise InvalidGeometryError("radius must be positive")
        return cls(n_elements, (n_elements - 1) * d / (2.0 * radius), wavelength, d)

    @property
    def n_total(self) -> int:
        return self.n_elements

    @property
    def arc_length(self) -> float:
        return (self.n_elements - 1) * self.spacing

    @property
    def is_straight(self) -> bool:
        return self.bend_half_angle < STRAIGHT_LIMIT

    @property
    def radius(self) -> float:
        if self.bend_half_angle == 0.0:
            return math.inf
        return self.arc_length / (2.0 * self.bend_half_angle)

    @property
    def wavenumber(self) -> float:
        return 2.0 * math.pi / self.wavelength

    @property
    def model_radius(self) -> float:
        """Radius used by the closed-form sampling rules.

        Equals ``R`` on a bent array and ``L/2`` in the straight regime, where
        the curvature-dependent factor ``sin(beta)/beta`` is replaced by 1.
        """
        return 0.5 * self.arc_length if self.is_straight else self.radius

    @property
    def model_arc_factor(self) -> float:
        if self.is_straight:
            return 1.0
        b = self.bend_half_angle
        return math.sin(b) / b

    def positions(self) -> np.ndarray:
        return element_positions_1d(self)

    @property
    def aperture(self) -> float:
        """Largest distance between two elements (end-to-end chord)."""
        q = self.positions()
        return float(np.linalg.norm(q[0] - q[-1]))


@dataclass(frozen=True)
class Cura2DGeometry:
    """Rows of identical arcs stacked along x at pitch ``row_spacing``."""

    arc: Cura1DGeometry
    n_rows: int
    row_spacing: float | None = None

    def __post_init__(self):
        if int(self.n_rows) != self.n_rows or self.n_rows < 1:
            raise InvalidGeometryError("n_rows must be a positive integer")
        object.__setattr__(self, "n_rows", int(self.n_rows))
        if self.row_spacing is None:
            object.__setattr__(self, "row_spacing", 0.5 * self.arc.wavelength)
        if not (math.isfinite(self.row_spacing) and self.row_spacing > 0):
            raise InvalidGeometryError("row spacing must be positive")

    @property
    def wavelength(self) -> float:
        return self.arc.wavelength

    @property
    def wavenumber(self) -> float:
        return self.arc.wavenumber

    @property
    def n_total(self) -> int:
        return self.n_rows * self.arc.n_elements

    @property
    def row_aperture(self) -> float:
        return (self.n_rows - 1) * self.row_spacing

    def positions(self) -> np.ndarray:
        return element_positions_2d(self)

    @property
    def aperture(self) -> float:
        return math.hypot(self.row_aperture, self.arc.aperture)


def _arc_yz(geom: Cura1DGeometry) -> tuple[np.ndarray, np.ndarray]:
    n = geom.n_elements
    idx = np.arange(n, dtype=float)
    if geom.is_straight:
        z = 0.5 * geom.arc_length - idx * geom.spacing
        return np.zeros(n), z
    beta = geom.bend_half_angle
    R = geom.radius
    psi = 2.0 * beta * idx / (n - 1)
    y = R * (np.cos(beta - psi) - math.cos(beta))
    z = R * np.sin(beta - psi)
    return y, z


def element_positions_1d(geom: Cura1DGeometry) -> np.ndarray:
    """(N, 3) element coordinates; element 1 sits at the top of the arc."""
    y, z = _arc_yz(geom)
    return np.column_stack([np.zeros_like(y), y, z])


def element_positions_2d(geom: Cura2DGeometry) -> np.ndarray:
    """(M*N, 3) coordinates, row-major over (row m, arc element n)."""
    y, z = _arc_yz(geom.arc)
    n = geom.arc.n_elements
    x = geom.row_spacing * np.arange(1, geom.n_rows + 1, dtype=float)
    return np.column_stack([
        np.repeat(x, n),
        np.tile(y, geom.n_rows),
        np.tile(z, geom.n_rows),
    ])


def spherical_to_polar(theta, phi) -> PolarDirection:
    st = np.sin(theta)
    rho = np.arccos(np.clip(st * np.cos(phi), -1.0, 1.0))
    varphi = np.arctan2(st * np.sin(phi), np.cos(theta))
    if np.ndim(rho) == 0:
        return PolarDirection(float(rho), float(varphi))
    return PolarDirection(rho, varphi)


def polar_to_spherical(direction: PolarDirection) -> tuple:
    """Inverse of :func:`spherical_to_polar` on the coverage region."""
    rho, varphi = direction
    sr = np.sin(rho)
    theta = np.arccos(np.clip(sr * np.cos(varphi), -1.0, 1.0))
    phi = np.arctan2(sr * np.sin(varphi), np.cos(rho))
    if np.ndim(theta) == 0:
        return float(theta), float(phi)
    return theta, phi


def polar_unit_vector(direction: PolarDirection) -> np.ndarray:
    """Unit vector(s) pointing along a polar direction, shape (..., 3)."""
    rho, varphi = np.broadcast_arrays(*(np.asarray(a, dtype=float) for a in direction))
    sr = np.sin(rho)
    return np.stack([np.cos(rho), sr * np.sin(varphi), sr * np.cos(varphi)], axis=-1)


def location_to_cartesian(loc: SphericalLocation) -> np.ndarray:
    r, theta, phi = (np.asarray(a, dtype=float) for a in loc)
    if np.any(r <= 0):
        raise InvalidGeometryError("range must be positive")
    st = np.sin(theta)
    return np.stack([r * st * np.cos(phi), r * st * np.sin(phi), r * np.cos(theta)], axis=-1)


def polar_location(r, direction: PolarDirection) -> SphericalLocation:
    theta, phi = polar_to_spherical(direction)
    return SphericalLocation(r, theta, phi)


def fresnel_min_range(geom) -> float:
    """Smallest range for which second-order distance expansions are trusted."""
    D = geom.aperture
    return 0.5 * math.sqrt(D**3 / geom.wavelength)
