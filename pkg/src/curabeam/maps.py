"""Beam-pattern heatmaps and ERD contours on a plane cut."""

from __future__ import annotations

import math
from dataclasses import replace

import numpy as np

from .erd import erd
from .geometry import (
    Cura2DGeometry,
    PolarDirection,
    SphericalLocation,
    polar_to_spherical,
    spherical_to_polar,
)
from .wavefield import focusing_vector, focusing_vectors_polar


def _pattern(geom, focus: SphericalLocation, r, theta, phi) -> np.ndarray:
    w = focusing_vector(geom, focus)
    rho, varphi = spherical_to_polar(theta, phi)
    b = focusing_vectors_polar(geom.positions(), geom.wavelength, r, rho, varphi)
    return np.abs(b.conj() @ w)


def heatmap_angle_angle(geom, focus: SphericalLocation, theta, phi) -> tuple:
    """|b(r0, theta, phi)^H w(focus)| on a (theta, phi) grid at the focal range."""
    tt, pp = np.meshgrid(np.asarray(theta, float), np.asarray(phi, float), indexing="ij")
    tt, pp = tt.ravel(), pp.ravel()
    gain = _pattern(geom, focus, np.full(tt.size, float(focus.range)), tt, pp)
    return tt, pp, gain


def heatmap_range_angle(geom, focus: SphericalLocation, ranges, angles, axis: str = "theta") -> tuple:
    """Gain over (range, angle) with the other angle held at its focal value."""
    rr, aa = np.meshgrid(np.asarray(ranges, float), np.asarray(angles, float), indexing="ij")
    rr, aa = rr.ravel(), aa.ravel()
    if axis == "theta":
        theta, phi = aa, np.full(aa.size, float(focus.phi))
    elif axis == "phi":
        theta, phi = np.full(aa.size, float(focus.theta)), aa
    else:
        raise ValueError("axis must be 'theta' or 'phi'")
    return rr, aa, _pattern(geom, focus, rr, theta, phi)


def with_bend(geom, beta: float):
    """Same element count, spacing and wavelength, different bend half-angle."""
    if isinstance(geom, Cura2DGeometry):
        return replace(geom, arc=replace(geom.arc, bend_half_angle=float(beta)))
    return replace(geom, bend_half_angle=float(beta))


def erd_plane_cut(geom, delta_gain: float, n_points: int = 181) -> dict:
    """ERD along directions in the yz-plane (x = 0) in front of the array."""
    varphi = np.linspace(0.0, math.pi, n_points)
    rho = np.full(n_points, 0.5 * math.pi)
    d = erd(geom, PolarDirection(rho, varphi), delta_gain)
    d = np.broadcast_to(np.asarray(d, dtype=float), varphi.shape)
    theta, phi = polar_to_spherical(PolarDirection(rho, varphi))
    return {"rho": rho, "varphi": varphi, "theta": theta, "phi": phi, "erd": d,
            "y": d * np.sin(varphi), "z": d * np.cos(varphi)}
