"""Polar-domain beam codebooks for curved (arc) antenna arrays."""

from .codebook import (
    Codebook,
    DesignSwitches,
    DesignThresholds,
    baseline_dft,
    baseline_uniform_polar,
    baseline_uniform_spherical,
    build_codebook_1d,
    build_codebook_2d,
    size_breakdown,
)
from .correlation import (
    AngularSeparation,
    angular_gain_model_1d,
    angular_gain_model_2d,
    range_gain_model_1d,
    range_gain_model_2d,
    theta_factor,
    xi_factor,
)
from .erd import erd, erd_1d, erd_2d, erd_numeric, rayleigh_distance
from .estimator import DFTCodebook, PolarCodebook, UniformPolarCodebook, UniformSphericalCodebook
from .exceptions import (
    CodebookSizeError,
    ConfigError,
    CurabeamError,
    DomainError,
    InvalidGeometryError,
)
from .geometry import (
    Cura1DGeometry,
    Cura2DGeometry,
    PolarDirection,
    SphericalLocation,
    polar_to_spherical,
    spherical_to_polar,
)
from .specfun import bessel_j0, bessel_j0_inverse, fresnel, fresnel_envelope, fresnel_envelope_inverse
from .trainsim import Scenario, UserRegion, coverage_probe, run_scenario, spectral_efficiency, sweep_select
from .wavefield import beam_gain, channel, focusing_vector, steering_vector

__version__ = "0.1.0"

__all__ = [
    "AngularSeparation", "Codebook", "CodebookSizeError", "ConfigError", "Cura1DGeometry",
    "Cura2DGeometry", "CurabeamError", "DFTCodebook", "DesignSwitches", "DesignThresholds",
    "DomainError", "InvalidGeometryError", "PolarCodebook", "PolarDirection", "Scenario",
    "SphericalLocation", "UniformPolarCodebook", "UniformSphericalCodebook", "UserRegion",
    "angular_gain_model_1d", "angular_gain_model_2d", "baseline_dft", "baseline_uniform_polar",
    "baseline_uniform_spherical", "beam_gain", "bessel_j0", "bessel_j0_inverse",
    "build_codebook_1d", "build_codebook_2d", "channel", "coverage_probe", "erd", "erd_1d",
    "erd_2d", "erd_numeric", "focusing_vector", "fresnel", "fresnel_envelope",
    "fresnel_envelope_inverse", "polar_to_spherical", "range_gain_model_1d",
    "range_gain_model_2d", "rayleigh_distance", "run_scenario", "size_breakdown",
    "spectral_efficiency", "spherical_to_polar", "steering_vector", "sweep_select",
    "theta_factor", "xi_factor",
]
