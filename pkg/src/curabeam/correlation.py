"""Closed-form correlation envelopes between focusing beams.

The angular model is a J0 envelope in the polar angle separation, the range
model a J0 envelope in the reciprocal-range separation.  For stacked arrays
the angular model picks up a Dirichlet factor along x and the range model a
Fresnel envelope.  All outputs lie in [0, 1].
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from .geometry import Cura1DGeometry, Cura2DGeometry, PolarDirection
from .specfun import bessel_j0, fresnel_envelope

THETA_VARIANTS = ("appendix", "lemma_body")


class AngularSeparation(NamedTuple):
    d_rho: float
    d_varphi: float

    @property
    def d_p(self) -> float:
        return float(np.hypot(self.d_rho, self.d_varphi))


def theta_factor(direction: PolarDirection, variant: str = "appendix"):
    """Direction-dependent scaling of the angular beam width.

    ``appendix``:   sqrt(sin^2 rho sin^2 varphi + cos^2 rho cos^2 varphi)
    ``lemma_body``: sqrt(cos^2 rho sin^2 varphi + sin^2 rho cos^2 varphi)
    """
    rho, varphi = direction
    sr, cr = np.sin(rho), np.cos(rho)
    sv, cv = np.sin(varphi), np.cos(varphi)
    if variant == "appendix":
        val = np.sqrt((sr * sv) ** 2 + (cr * cv) ** 2)
    elif variant == "lemma_body":
        val = np.sqrt((cr * sv) ** 2 + (sr * cv) ** 2)
    else:
        raise ValueError(f"unknown theta variant {variant!r}; expected one of {THETA_VARIANTS}")
    return float(val) if np.ndim(val) == 0 else val


def _arc(geom) -> Cura1DGeometry:
    return geom.arc if isinstance(geom, Cura2DGeometry) else geom


def _angular_scale(arc: Cura1DGeometry) -> float:
    # (2 pi / lambda) * R * sin(beta) / beta, with the straight-regime substitution
    return 2.0 * math.pi * arc.model_radius * arc.model_arc_factor / arc.wavelength


def angular_gain_model_1d(geom, direction: PolarDirection, sep: AngularSeparation,
                          variant: str = "appendix"):
    """|J0(k R Theta d_p sin(beta)/beta)| with Theta evaluated at ``direction``."""
    arc = _arc(geom)
    d_p = np.hypot(sep[0], sep[1])
    arg = _angular_scale(arc) * theta_factor(direction, variant) * d_p
    return np.abs(bessel_j0(arg))


def _midpoint(dir1: PolarDirection, dir2: PolarDirection) -> PolarDirection:
    return PolarDirection(0.5 * (np.asarray(dir1[0]) + dir2[0]), 0.5 * (np.asarray(dir1[1]) + dir2[1]))


def angular_gain_between(geom, dir1: PolarDirection, dir2: PolarDirection,
                         variant: str = "appendix"):
    """Symmetric pairwise form: Theta is taken at the midpoint direction."""
    sep = AngularSeparation(np.asarray(dir2[0]) - dir1[0], np.asarray(dir2[1]) - dir1[1])
    return angular_gain_model_1d(geom, _midpoint(dir1, dir2), sep, variant)


def xi_factor(direction: PolarDirection, beta: float):
    """Range sensitivity sqrt(f1^2 + f2^2) of the arc at a direction."""
    rho, varphi = direction
    sr, cr = np.sin(rho), np.cos(rho)
    f1 = sr * np.sin(varphi) * math.sin(beta) - cr * math.cos(beta)
    f2 = cr * np.cos(varphi) * math.sin(beta)
    val = np.hypot(f1, f2)
    return float(val) if np.ndim(val) == 0 else val


def _reciprocal_gap(r1, r2):
    r1 = np.asarray(r1, dtype=float)
    r2 = np.asarray(r2, dtype=float)
    if np.any(r1 <= 0) or np.any(r2 <= 0):
        raise ValueError("ranges must be positive")
    return np.abs(1.0 / r2 - 1.0 / r1)


def range_scale(arc: Cura1DGeometry) -> float:
    """pi R^2 / lambda, the factor mapping xi * d_tau to the J0 argument."""
    return math.pi * arc.model_radius**2 / arc.wavelength


def range_gain_model_1d(geom, direction: PolarDirection, r1, r2):
    """|J0(pi R^2 xi |1/r2 - 1/r1| / lambda)|; an infinite range is allowed."""
    arc = _arc(geom)
    zeta = range_scale(arc) * xi_factor(direction, arc.bend_half_angle) * _reciprocal_gap(r1, r2)
    return np.abs(bessel_j0(zeta))


def ula_array_factor(n_rows: int, spacing: float, wavelength: float, d_u):
    """Normalised Dirichlet kernel |sin(M x) / (M sin x)|, x = pi d d_u / lambda."""
    if n_rows < 1:
        raise ValueError("n_rows must be at least 1")
    x = math.pi * spacing * np.asarray(d_u, dtype=float) / wavelength
    num = np.sin(n_rows * x)
    den = n_rows * np.sin(x)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(np.abs(den) < 1e-300 + 1e-15 * n_rows, 1.0, np.abs(num / den))
    out = np.minimum(out, 1.0)
    return float(out) if out.ndim == 0 else out


def x_cosine_gap(dir1: PolarDirection, dir2: PolarDirection):
    """sin(rho2) cos(varphi2) - sin(rho1) cos(varphi1)."""
    return np.sin(dir2[0]) * np.cos(dir2[1]) - np.sin(dir1[0]) * np.cos(dir1[1])


def angular_gain_model_2d(geom: Cura2DGeometry, dir1: PolarDirection, dir2: PolarDirection,
                          variant: str = "appendix"):
    g_v = angular_gain_between(geom.arc, dir1, dir2, variant)
    g_h = ula_array_factor(geom.n_rows, geom.row_spacing, geom.wavelength, x_cosine_gap(dir1, dir2))
    return g_v * g_h


def fresnel_argument(geom: Cura2DGeometry, r1, r2):
    """eps = d_x^2 M^2 |1/r2 - 1/r1| / lambda."""
    aperture = geom.row_spacing * geom.n_rows
    return aperture**2 * _reciprocal_gap(r1, r2) / geom.wavelength


def range_gain_model_2d(geom: Cura2DGeometry, direction: PolarDirection, r1, r2):
    return range_gain_model_1d(geom.arc, direction, r1, r2) * fresnel_envelope(
        fresnel_argument(geom, r1, r2))
