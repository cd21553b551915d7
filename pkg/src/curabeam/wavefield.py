"""Spherical-wave responses, multipath channels and the beam gain.

Most functions accept either a single location (scalar fields) and return
one vector, or arrays of locations and return one row per location.
"""

from __future__ import annotations

import math
import warnings
from typing import NamedTuple, Sequence

import numpy as np

from .geometry import (
    Cura1DGeometry,
    Cura2DGeometry,
    PolarDirection,
    SphericalLocation,
    fresnel_min_range,
    polar_unit_vector,
    spherical_to_polar,
)


class PathSpec(NamedTuple):
    gain: complex
    location: SphericalLocation


class FresnelValidityWarning(UserWarning):
    """Range is too short for the second-order distance expansion."""


def _unit_and_range(loc: SphericalLocation) -> tuple[np.ndarray, np.ndarray]:
    r, theta, phi = (np.asarray(a, dtype=float) for a in loc)
    r, theta, phi = np.broadcast_arrays(r, theta, phi)
    st = np.sin(theta)
    unit = np.stack([st * np.cos(phi), st * np.sin(phi), np.cos(theta)], axis=-1)
    return unit, r


def _positions(geom) -> np.ndarray:
    return geom if isinstance(geom, np.ndarray) else geom.positions()


def _range_offsets(positions: np.ndarray, unit: np.ndarray, r: np.ndarray) -> np.ndarray:
    """r_i - r for every (location, element), free of cancellation at large r."""
    proj = unit @ positions.T
    qq = np.einsum("ij,ij->i", positions, positions)
    r = r[..., None]
    with np.errstate(invalid="ignore"):
        dist = np.sqrt(np.maximum(r * r - 2.0 * r * proj + qq, 0.0))
        out = (qq - 2.0 * r * proj) / (dist + r)
    # infinite range: the offset tends to the plane-wave projection
    return np.where(np.isinf(r), -proj, out)


def element_distances(positions, loc: SphericalLocation) -> np.ndarray:
    """Exact Euclidean distances from the user to every element."""
    positions = _positions(positions)
    unit, r = _unit_and_range(loc)
    user = unit * r[..., None]
    diff = user[..., None, :] - positions
    return np.sqrt(np.sum(diff * diff, axis=-1))


def _arc_offset_printed(arc: Cura1DGeometry) -> float:
    # printed 2-D arc term minus the 1-D arc term: R^2 (cos b - 1)(1 + cos^2 b),
    # written through R sin(b/2) so the straight limit stays finite
    b = arc.bend_half_angle
    half = 0.25 * arc.arc_length * np.sinc(b / (2.0 * np.pi))
    return -2.0 * half * half * (1.0 + math.cos(b) ** 2)


def element_distances_fresnel(geom, loc: SphericalLocation, printed_arc_term: bool = False,
                              warn: bool = True) -> np.ndarray:
    """Second-order expansion of the element distances in 1/r.

    ``r_i ~ r - u.q_i + (|q_i|^2 - (u.q_i)^2) / (2 r)``, which is the arc
    expansion with the bracketed quadratic term written in vector form.  For a
    2-D array ``printed_arc_term=True`` swaps in the alternative arc term
    ``R^2 cos(beta) (1 - 2 cos(beta - psi_n) + cos^2 beta)``.
    """
    positions = geom.positions()
    unit, r = _unit_and_range(loc)
    if warn and np.any(r < fresnel_min_range(geom)):
        warnings.warn("range below the Fresnel validity bound", FresnelValidityWarning,
                      stacklevel=2)
    proj = unit @ positions.T
    qq = np.einsum("ij,ij->i", positions, positions)
    if printed_arc_term and isinstance(geom, Cura2DGeometry):
        qq = qq + _arc_offset_printed(geom.arc)
    r = r[..., None]
    with np.errstate(divide="ignore", invalid="ignore"):
        quad = np.where(np.isinf(r), 0.0, (qq - proj * proj) / (2.0 * r))
    return r - proj + quad


def focusing_vector(geom, loc: SphericalLocation) -> np.ndarray:
    """Unit-norm weights exp(-j k (r_i - r)) / sqrt(n) matched to a point."""
    positions = _positions(geom)
    unit, r = _unit_and_range(loc)
    k = 2.0 * math.pi / _wavelength(geom)
    phase = -k * _range_offsets(positions, unit.reshape(-1, 3), r.reshape(-1))
    out = np.exp(1j * phase) / math.sqrt(positions.shape[0])
    return out[0] if unit.ndim == 1 else out.reshape(unit.shape[:-1] + (positions.shape[0],))


def focusing_vectors_polar(positions: np.ndarray, wavelength: float, r, rho, varphi) -> np.ndarray:
    """Batch focusing vectors addressed directly by polar direction and range."""
    unit = polar_unit_vector(PolarDirection(rho, varphi)).reshape(-1, 3)
    r = np.broadcast_to(np.asarray(r, dtype=float), (unit.shape[0],))
    phase = (-2.0 * math.pi / wavelength) * _range_offsets(positions, unit, r)
    return np.exp(1j * phase) / math.sqrt(positions.shape[0])


def steering_vector(geom, direction: PolarDirection) -> np.ndarray:
    """Plane-wave weights exp(+j k u.q_i) / sqrt(n) for a polar direction."""
    positions = _positions(geom)
    unit = polar_unit_vector(direction)
    k = 2.0 * math.pi / _wavelength(geom)
    out = np.exp(1j * k * (unit @ positions.T)) / math.sqrt(positions.shape[0])
    return out


def _wavelength(geom) -> float:
    return geom.wavelength


def channel(geom, paths: Sequence[PathSpec]) -> np.ndarray:
    """Unnormalised multipath channel sum_l gain_l * b(location_l)."""
    if len(paths) == 0:
        raise ValueError("a channel needs at least one path")
    h = np.zeros(geom.n_total, dtype=complex)
    for gain, loc in paths:
        if not np.isfinite(gain):
            raise ValueError("path gain must be finite")
        h = h + complex(gain) * focusing_vector(geom, loc)
    return h


def beam_gain(u: np.ndarray, v: np.ndarray) -> float:
    """|u^H v| for two weight vectors of equal length."""
    u = np.asarray(u)
    v = np.asarray(v)
    if u.shape != v.shape or u.ndim != 1:
        raise ValueError(f"beam_gain needs two vectors of equal length, got {u.shape} and {v.shape}")
    return float(abs(np.vdot(u, v)))


def direction_of(loc: SphericalLocation) -> PolarDirection:
    return spherical_to_polar(loc.theta, loc.phi)


def is_unit_constant_modulus(w: np.ndarray, atol: float = 1e-12) -> bool:
    """True when every row has unit norm and entries of modulus 1/sqrt(n)."""
    w = np.atleast_2d(np.asarray(w))
    n = w.shape[-1]
    mod_ok = np.all(np.abs(np.abs(w) - 1.0 / math.sqrt(n)) <= atol)
    norm_ok = np.all(np.abs(np.linalg.norm(w, axis=-1) - 1.0) <= atol)
    return bool(mod_ok and norm_ok)
