"""Polar-domain codebooks gated by the effective Rayleigh distance, plus baselines.

Angular grids are rings of constant ``rho`` about the array normal; each ring
carries a number of azimuth samples that grows with its radius.  Every grid
direction then receives a reciprocal-range (tau-uniform) block of ranges
inside its ERD and a short geometric block beyond it.

A :class:`Codebook` stores per-codeword metadata only and synthesises the
weight vectors on demand, so books with hundreds of thousands of entries can
be swept block by block.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import asdict, dataclass, field
from typing import Iterator

import numpy as np

from .correlation import _arc, range_scale, theta_factor, xi_factor
from .erd import erd as erd_any
from .erd import erd_1d, erd_2d
from .exceptions import CodebookSizeError, DomainError
from .geometry import (
    Cura1DGeometry,
    Cura2DGeometry,
    PolarDirection,
    fresnel_min_range,
    polar_to_spherical,
    polar_unit_vector,
    spherical_to_polar,
)
from .specfun import bessel_j0_inverse, fresnel_envelope_inverse
from .wavefield import _range_offsets, focusing_vectors_polar

# Step sizes blow up where the direction factors vanish; floor them.
FACTOR_FLOOR = 0.05

KIND_NEAR = 0
KIND_FAR = 1
KIND_ANGLE = 2
KIND_NAMES = {KIND_NEAR: "near_field", KIND_FAR: "far_field", KIND_ANGLE: "angle_only"}

DEFAULT_MAX_CODEWORDS = 5_000_000


@dataclass(frozen=True)
class DesignThresholds:
    delta_p: float = 0.5
    delta_r: float = 0.5
    delta_gain: float = 0.5
    eta_r: float = 1.0
    eta_a: float = 0.25
    rho_max: float = 0.5 * math.pi
    r_min: float = 10.0
    r_max: float = 2000.0

    def __post_init__(self):
        for name in ("delta_p", "delta_r", "delta_gain", "eta_a"):
            v = getattr(self, name)
            if not 0.0 < v < 1.0:
                raise DomainError(f"{name} must lie in (0, 1), got {v}")
        if not self.eta_r > 0:
            raise DomainError("eta_r must be positive")
        if not 0.0 < self.rho_max <= 0.5 * math.pi + 1e-15:
            raise DomainError("rho_max must lie in (0, pi/2]")
        if not 0.0 < self.r_min < self.r_max:
            raise DomainError("need 0 < r_min < r_max")

    def check_geometry(self, geom) -> None:
        bound = fresnel_min_range(geom)
        if not self.r_min > bound:
            raise DomainError(
                f"r_min={self.r_min} m is inside the minimum distance of interest {bound:.4g} m")


@dataclass(frozen=True)
class DesignSwitches:
    """Formula variants and knobs that are not thresholds."""

    theta_variant: str = "appendix"
    strict_paper_formulas: bool = True
    phi_tilde_max: float | None = None
    max_codewords: int = DEFAULT_MAX_CODEWORDS

    def azimuth_half_width(self, arc: Cura1DGeometry) -> float:
        return arc.bend_half_angle if self.phi_tilde_max is None else float(self.phi_tilde_max)


@dataclass
class AngularGrid:
    rho: np.ndarray
    varphi: np.ndarray
    ring: np.ndarray
    azimuth: np.ndarray
    radial_step: float
    ring_counts: np.ndarray

    def __len__(self) -> int:
        return self.rho.size

    @property
    def directions(self) -> PolarDirection:
        return PolarDirection(self.rho, self.varphi)


@dataclass
class Codebook:
    """Codeword metadata plus a recipe for the weight vectors.

    ``synthesis`` is ``"focus"`` (exact focusing vectors), ``"corrected"``
    (angular Kronecker codeword times a distance phase correction) or
    ``"matrix"`` (explicit rows in ``matrix``).
    """

    geometry: object
    kind: np.ndarray
    rho: np.ndarray
    varphi: np.ndarray
    range: np.ndarray
    ring: np.ndarray
    azimuth: np.ndarray
    range_index: np.ndarray
    synthesis: str
    info: dict = field(default_factory=dict)
    matrix: np.ndarray | None = None
    reference_range: float | None = None

    def __len__(self) -> int:
        return int(self.kind.size)

    @property
    def n_elements(self) -> int:
        return self.geometry.n_total

    @property
    def fingerprint(self) -> str:
        return self.info.get("fingerprint", "")

    def directions(self) -> PolarDirection:
        return PolarDirection(self.rho, self.varphi)

    def vectors(self, start: int = 0, stop: int | None = None) -> np.ndarray:
        """Rows ``start:stop`` of the codeword matrix (one codeword per row)."""
        stop = len(self) if stop is None else min(stop, len(self))
        sl = slice(start, stop)
        if self.synthesis == "matrix":
            return self.matrix[sl]
        positions = self.geometry.positions()
        if self.synthesis == "focus":
            return focusing_vectors_polar(positions, self.geometry.wavelength,
                                          self.range[sl], self.rho[sl], self.varphi[sl])
        if self.synthesis == "corrected":
            return _corrected_codewords(self.geometry, self.rho[sl], self.varphi[sl],
                                        self.range[sl], self.reference_range)
        raise ValueError(f"unknown synthesis {self.synthesis!r}")

    def blocks(self, block_size: int = 8192) -> Iterator[tuple[int, np.ndarray]]:
        for start in range(0, len(self), block_size):
            yield start, self.vectors(start, start + block_size)

    def size_breakdown(self) -> dict:
        n_dir = len(np.unique(np.stack([self.ring, self.azimuth]), axis=1)[0]) if len(self) else 0
        return {
            "total": len(self),
            "angular_points": int(n_dir),
            "near_field": int(np.sum(self.kind == KIND_NEAR)),
            "far_field": int(np.sum(self.kind == KIND_FAR)),
            "angle_only": int(np.sum(self.kind == KIND_ANGLE)),
        }

    def metadata_columns(self) -> dict:
        theta, phi = polar_to_spherical(PolarDirection(self.rho, self.varphi))
        return {
            "index": np.arange(len(self)),
            "kind": np.array([KIND_NAMES[int(k)] for k in self.kind]),
            "range": self.range,
            "rho": self.rho,
            "varphi": self.varphi,
            "theta": theta,
            "phi": phi,
            "ring": self.ring,
            "azimuth": self.azimuth,
            "range_index": self.range_index,
        }


def _geometry_dict(geom) -> dict:
    if isinstance(geom, Cura2DGeometry):
        return {"array": "2d", "arc": asdict(geom.arc), "n_rows": geom.n_rows,
                "row_spacing": geom.row_spacing}
    return {"array": "1d", **asdict(geom)}


def fingerprint(geom, thresholds: DesignThresholds | None, extra: dict | None = None) -> str:
    payload = {"geometry": _geometry_dict(geom),
               "thresholds": asdict(thresholds) if thresholds is not None else None,
               "extra": extra or {}}
    text = json.dumps(payload, sort_keys=True, default=repr)
    return hashlib.sha256(text.encode()).hexdigest()


# -- angular sampling ---------------------------------------------------------


def _clamped_theta(direction, variant: str):
    return np.maximum(theta_factor(direction, variant), FACTOR_FLOOR)


def radial_step_1d(geom: Cura1DGeometry, thresholds: DesignThresholds, direction: PolarDirection,
                   variant: str = "appendix") -> float:
    arc = _arc(geom)
    x = bessel_j0_inverse(thresholds.delta_p)
    step = x * arc.wavelength / (2.0 * math.pi * arc.model_radius * arc.model_arc_factor
                                 * _clamped_theta(direction, variant))
    return float(step) if np.ndim(step) == 0 else step


def azimuth_counts_1d(geom: Cura1DGeometry, thresholds: DesignThresholds, rho: np.ndarray,
                      half_width: float) -> np.ndarray:
    arc = _arc(geom)
    x = bessel_j0_inverse(thresholds.delta_p)
    raw = 4.0 * math.pi * arc.model_radius * arc.model_arc_factor * rho * half_width / (
        arc.wavelength * x)
    return np.maximum(1, np.ceil(raw)).astype(np.int64)


def _ring_grid(step: float, rho_max: float, counts_fn, half_width: float,
               max_points: int) -> AngularGrid:
    n_rings = int(math.floor(rho_max / step))
    rho_rings = step * np.arange(1, n_rings + 1)
    counts = counts_fn(rho_rings) if n_rings else np.zeros(0, dtype=np.int64)
    ring_counts = np.concatenate([[1], counts]).astype(np.int64)
    total = int(ring_counts.sum())
    if total > max_points:
        raise CodebookSizeError(f"angular grid would hold {total} directions (limit {max_points})")
    ring = np.repeat(np.arange(n_rings + 1), ring_counts)
    starts = np.repeat(np.cumsum(ring_counts) - ring_counts, ring_counts)
    az = np.arange(total) - starts
    rho = np.concatenate([[0.0], rho_rings])[ring]
    nphi = ring_counts[ring]
    varphi = np.where(ring == 0, 0.0, -half_width + az * (2.0 * half_width / nphi))
    return AngularGrid(rho, varphi, ring.astype(np.int32), az.astype(np.int32), step, ring_counts)


def angular_grid_1d(geom: Cura1DGeometry, thresholds: DesignThresholds,
                    switches: DesignSwitches = DesignSwitches()) -> AngularGrid:
    """Rings rho_i = i * d_rho with ceil-rounded, uniformly placed azimuths."""
    step = radial_step_1d(geom, thresholds, PolarDirection(0.0, 0.0), switches.theta_variant)
    half = switches.azimuth_half_width(geom)
    return _ring_grid(step, thresholds.rho_max,
                      lambda rho: azimuth_counts_1d(geom, thresholds, rho, half),
                      half, switches.max_codewords)


def radial_step_2d(geom: Cura2DGeometry, thresholds: DesignThresholds, direction: PolarDirection,
                   variant: str = "appendix") -> float:
    arc = geom.arc
    root = math.sqrt(thresholds.eta_a)
    vertical = bessel_j0_inverse(root) * arc.wavelength / (
        2.0 * math.pi * arc.model_radius * arc.model_arc_factor * _clamped_theta(direction, variant))
    if geom.n_rows == 1:
        return float(vertical) if np.ndim(vertical) == 0 else vertical
    rho, varphi = direction
    proj = np.maximum(np.abs(np.cos(rho) * np.cos(varphi)), FACTOR_FLOOR)
    horizontal = geom.wavelength * math.asin(root) / (
        math.pi * geom.n_rows * geom.row_spacing * proj)
    out = np.minimum(vertical, horizontal)
    return float(out) if np.ndim(out) == 0 else out


def azimuth_counts_2d(geom: Cura2DGeometry, thresholds: DesignThresholds, rho: np.ndarray,
                      half_width: float, variant: str = "appendix") -> np.ndarray:
    arc = geom.arc
    root = math.sqrt(thresholds.eta_a)
    rho = np.asarray(rho, dtype=float)
    theta = _clamped_theta(PolarDirection(rho, np.zeros_like(rho)), variant)
    step = bessel_j0_inverse(root) * arc.wavelength / (
        2.0 * math.pi * arc.model_radius * arc.model_arc_factor * theta * rho)
    if geom.n_rows > 1:
        proj = np.maximum(np.abs(np.cos(rho)), FACTOR_FLOOR)
        horizontal = geom.wavelength * math.asin(root) / (
            math.pi * geom.n_rows * geom.row_spacing * proj)
        step = np.minimum(step, horizontal)
    return np.maximum(1, np.ceil(2.0 * half_width / step)).astype(np.int64)


def angular_grid_2d(geom: Cura2DGeometry, thresholds: DesignThresholds,
                    switches: DesignSwitches = DesignSwitches()) -> AngularGrid:
    step = radial_step_2d(geom, thresholds, PolarDirection(0.0, 0.0), switches.theta_variant)
    half = switches.azimuth_half_width(geom.arc)
    return _ring_grid(step, thresholds.rho_max,
                      lambda rho: azimuth_counts_2d(geom, thresholds, rho, half,
                                                    switches.theta_variant),
                      half, switches.max_codewords)


# -- range sampling -----------------------------------------------------------


def reciprocal_step_1d(geom, thresholds: DesignThresholds, direction: PolarDirection):
    """2 lambda J0^-1(delta_r) / (pi R^2 xi), with xi floored."""
    arc = _arc(geom)
    xi = np.maximum(xi_factor(direction, arc.bend_half_angle), FACTOR_FLOOR)
    return 2.0 * bessel_j0_inverse(thresholds.delta_r) / (range_scale(arc) * xi)


def reciprocal_step_2d(geom: Cura2DGeometry, thresholds: DesignThresholds, direction: PolarDirection,
                       strict: bool = True):
    arc_step = reciprocal_step_1d(geom.arc, thresholds, direction)
    if geom.n_rows == 1:
        return arc_step
    eps = fresnel_envelope_inverse(thresholds.delta_r)
    denom = (geom.row_spacing * geom.n_rows) ** 2
    if strict:
        denom *= geom.arc.model_radius
    return np.minimum(geom.wavelength * eps / denom, arc_step)


def _near_counts(erd_vals, d_tau, r_min):
    erd_vals = np.asarray(erd_vals, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        n = np.floor((1.0 / r_min - 1.0 / erd_vals) / d_tau) + 1.0
    return np.where(erd_vals > r_min, n, 0).astype(np.int64)


def _far_counts(erd_vals, thresholds: DesignThresholds):
    erd_vals = np.asarray(erd_vals, dtype=float)
    lo = np.maximum(erd_vals, thresholds.r_min)
    with np.errstate(divide="ignore", invalid="ignore"):
        n = np.ceil(np.log(thresholds.r_max / lo) / math.log1p(thresholds.eta_r))
    n = np.maximum(2, n)
    return np.where(thresholds.r_max > erd_vals, n, 0).astype(np.int64), lo


def near_range_grid(geom, direction: PolarDirection, thresholds: DesignThresholds,
                    d_tau: float | None = None) -> np.ndarray:
    """Ranges 1/(1/erd + (s-1) d_tau), s = 1..M_NF, decreasing from the ERD."""
    e = float(erd_any(geom, direction, thresholds.delta_gain))
    if d_tau is None:
        d_tau = float(reciprocal_step_1d(geom, thresholds, direction))
    n = int(_near_counts(e, d_tau, thresholds.r_min))
    if n == 0:
        return np.zeros(0)
    return 1.0 / (1.0 / e + np.arange(n) * d_tau)


def far_range_grid(geom, direction: PolarDirection, thresholds: DesignThresholds) -> np.ndarray:
    """Geometric grid from max(erd, r_min) to r_max with M_FF >= 2 points."""
    e = float(erd_any(geom, direction, thresholds.delta_gain))
    n, lo = _far_counts(e, thresholds)
    n, lo = int(n), float(lo)
    if n == 0:
        return np.zeros(0)
    ratio = thresholds.r_max / lo
    out = lo * ratio ** (np.arange(n) / (n - 1))
    out[-1] = thresholds.r_max
    return out


@dataclass
class RangePlan:
    """Per-direction range counts that fix the codebook layout."""

    erd: np.ndarray
    d_tau: np.ndarray
    n_near: np.ndarray
    n_far: np.ndarray
    far_start: np.ndarray
    far_low: np.ndarray

    @property
    def n_far_emitted(self) -> np.ndarray:
        return self.n_far - self.far_start

    @property
    def per_direction(self) -> np.ndarray:
        return self.n_near + self.n_far_emitted


def _range_plan(erd_vals, d_tau, thresholds: DesignThresholds) -> RangePlan:
    n_near = _near_counts(erd_vals, d_tau, thresholds.r_min)
    n_far, lo = _far_counts(erd_vals, thresholds)
    # the first far sample coincides with the first near sample (both at the ERD)
    far_start = ((n_near > 0) & (n_far > 0)).astype(np.int64)
    return RangePlan(np.asarray(erd_vals, dtype=float), np.asarray(d_tau, dtype=float),
                     n_near, n_far, far_start, lo)


def _expand(grid: AngularGrid, plan: RangePlan, thresholds: DesignThresholds):
    counts = plan.per_direction
    total = int(counts.sum())
    owner = np.repeat(np.arange(len(grid)), counts)
    starts = np.repeat(np.cumsum(counts) - counts, counts)
    pos = np.arange(total) - starts
    n_near = plan.n_near[owner]
    near = pos < n_near
    # near block listed by ascending range: s = n_near .. 1
    s = n_near - pos
    with np.errstate(divide="ignore"):
        tau = 1.0 / plan.erd[owner] + (s - 1) * plan.d_tau[owner]
    l_idx = plan.far_start[owner] + (pos - n_near)
    n_far = plan.n_far[owner]
    lo = plan.far_low[owner]
    with np.errstate(divide="ignore", invalid="ignore"):
        far_r = lo * (thresholds.r_max / lo) ** (l_idx / np.maximum(n_far - 1, 1))
    far_r = np.where(l_idx == n_far - 1, thresholds.r_max, far_r)
    with np.errstate(divide="ignore"):
        r = np.where(near, 1.0 / tau, far_r)
    kind = np.where(near, KIND_NEAR, KIND_FAR).astype(np.int8)
    range_index = np.where(near, s, l_idx + 1).astype(np.int32)
    return owner, r, kind, range_index


def _check_size(total: int, switches: DesignSwitches):
    if total > switches.max_codewords:
        raise CodebookSizeError(f"codebook would hold {total} codewords (limit {switches.max_codewords})")


def _plan_1d(geom, thresholds, switches):
    grid = angular_grid_1d(geom, thresholds, switches)
    dirs = grid.directions
    plan = _range_plan(erd_1d(geom, dirs, thresholds.delta_gain),
                       reciprocal_step_1d(geom, thresholds, dirs), thresholds)
    return grid, plan


def _plan_2d(geom, thresholds, switches):
    grid = angular_grid_2d(geom, thresholds, switches)
    dirs = grid.directions
    plan = _range_plan(erd_2d(geom, dirs, thresholds.delta_gain),
                       reciprocal_step_2d(geom, thresholds, dirs, switches.strict_paper_formulas),
                       thresholds)
    return grid, plan


def size_breakdown(geom, thresholds: DesignThresholds,
                   switches: DesignSwitches = DesignSwitches()) -> dict:
    """Codebook cardinalities without materialising the codebook."""
    thresholds.check_geometry(geom)
    # counting only needs the angular grid, so lift the codeword limit
    big = DesignSwitches(switches.theta_variant, switches.strict_paper_formulas,
                         switches.phi_tilde_max, max(switches.max_codewords, 50_000_000))
    grid, plan = (_plan_2d if isinstance(geom, Cura2DGeometry) else _plan_1d)(geom, thresholds, big)
    return {
        "total": int(plan.per_direction.sum()),
        "angular_points": len(grid),
        "rings": int(grid.ring_counts.size),
        "near_field": int(plan.n_near.sum()),
        "far_field": int(plan.n_far_emitted.sum()),
        "max_near_per_direction": int(plan.n_near.max()),
        "max_far_per_direction": int(plan.n_far_emitted.max()),
        "radial_step": grid.radial_step,
    }


def _assemble(geom, grid, plan, thresholds, switches, synthesis, reference_range=None) -> Codebook:
    _check_size(int(plan.per_direction.sum()), switches)
    owner, r, kind, range_index = _expand(grid, plan, thresholds)
    info = {
        "scheme": "proposed",
        "theta_variant": switches.theta_variant,
        "strict_paper_formulas": switches.strict_paper_formulas,
        "phi_tilde_max": switches.azimuth_half_width(_arc(geom)),
        "thresholds": asdict(thresholds),
        "radial_step": grid.radial_step,
        "angular_points": len(grid),
        "fingerprint": fingerprint(geom, thresholds, {
            "theta_variant": switches.theta_variant,
            "strict_paper_formulas": switches.strict_paper_formulas,
            "phi_tilde_max": switches.phi_tilde_max, "scheme": "proposed"}),
    }
    return Codebook(geom, kind, grid.rho[owner], grid.varphi[owner], r, grid.ring[owner],
                    grid.azimuth[owner], range_index, synthesis, info,
                    reference_range=reference_range)


def build_codebook_1d(geom: Cura1DGeometry, thresholds: DesignThresholds,
                      switches: DesignSwitches = DesignSwitches()) -> Codebook:
    """Exact focusing codewords on the ERD-gated polar grid of an arc array."""
    thresholds.check_geometry(geom)
    grid, plan = _plan_1d(geom, thresholds, switches)
    return _assemble(geom, grid, plan, thresholds, switches, "focus")


def build_codebook_2d(geom: Cura2DGeometry, thresholds: DesignThresholds,
                      switches: DesignSwitches = DesignSwitches()) -> Codebook:
    """Kronecker angular codewords with a distance phase correction (reference r_max)."""
    thresholds.check_geometry(geom)
    grid, plan = _plan_2d(geom, thresholds, switches)
    return _assemble(geom, grid, plan, thresholds, switches, "corrected",
                     reference_range=thresholds.r_max)


# -- 2-D codewords ------------------------------------------------------------


def _kronecker_rows(geom: Cura2DGeometry, rho, varphi) -> np.ndarray:
    rho = np.atleast_1d(np.asarray(rho, dtype=float))
    varphi = np.atleast_1d(np.asarray(varphi, dtype=float))
    k = geom.wavenumber
    m = geom.row_spacing * np.arange(1, geom.n_rows + 1)
    arc_pos = geom.arc.positions()
    unit = polar_unit_vector(PolarDirection(rho, varphi))
    w_x = np.exp(1j * k * np.outer(unit[:, 0], m)) / math.sqrt(geom.n_rows)
    w_yz = np.exp(1j * k * (unit[:, 1:] @ arc_pos[:, 1:].T)) / math.sqrt(geom.arc.n_elements)
    return (w_x[:, :, None] * w_yz[:, None, :]).reshape(rho.size, -1)


def angular_codeword_2d(geom: Cura2DGeometry, direction: PolarDirection) -> np.ndarray:
    """Row factor along x (Kronecker) arc factor, ordered like the 2-D element list."""
    out = _kronecker_rows(geom, direction[0], direction[1])
    return out[0] if np.ndim(direction[0]) == 0 else out


def _corrected_codewords(geom: Cura2DGeometry, rho, varphi, r, r_ref) -> np.ndarray:
    base = _kronecker_rows(geom, rho, varphi)
    positions = geom.positions()
    unit = polar_unit_vector(PolarDirection(np.atleast_1d(rho), np.atleast_1d(varphi))).reshape(-1, 3)
    r = np.broadcast_to(np.asarray(r, dtype=float), (unit.shape[0],))
    ref = np.full_like(r, r_ref)
    # r_mn(r) - r_mn(r_ref) = [offset(r) - offset(r_ref)] + (r - r_ref)
    diff = _range_offsets(positions, unit, r) - _range_offsets(positions, unit, ref)
    diff = diff + (r - ref)[:, None]
    return base * np.exp(-1j * geom.wavenumber * diff)


def range_codeword_2d(geom: Cura2DGeometry, direction: PolarDirection, r: float,
                      r_ref: float) -> np.ndarray:
    out = _corrected_codewords(geom, direction[0], direction[1], r, r_ref)
    return out[0] if np.ndim(direction[0]) == 0 else out


# -- baselines ----------------------------------------------------------------


def baseline_dft(geom, size: int) -> Codebook:
    """Columns of the unitary DFT matrix (Kronecker DFT for stacked arrays)."""
    n = geom.n_total
    if size < 1 or size > n:
        raise DomainError(f"DFT codebook size must lie in [1, {n}]")
    if isinstance(geom, Cura2DGeometry):
        fm = np.fft.fft(np.eye(geom.n_rows)) / math.sqrt(geom.n_rows)
        fn = np.fft.fft(np.eye(geom.arc.n_elements)) / math.sqrt(geom.arc.n_elements)
        full = np.kron(fm, fn)
    else:
        full = np.fft.fft(np.eye(n)) / math.sqrt(n)
    cols = (np.arange(size) * n) // size
    matrix = np.ascontiguousarray(full[:, cols].T)
    nan = np.full(size, np.nan)
    return Codebook(geom, np.full(size, KIND_ANGLE, dtype=np.int8), nan, nan.copy(),
                    np.full(size, np.inf), np.zeros(size, np.int32), cols.astype(np.int32),
                    np.zeros(size, np.int32), "matrix",
                    {"scheme": "dft", "fingerprint": fingerprint(geom, None, {"scheme": "dft", "size": size})},
                    matrix=matrix)


def coverage_box(half_width: float, rho_max: float, samples: int = 721) -> tuple[float, float, float, float]:
    """Bounding (theta, phi) box of the polar coverage region."""
    rho = np.linspace(0.0, rho_max, samples)
    varphi = np.linspace(-half_width, half_width, samples)
    rr, vv = np.meshgrid(rho, varphi)
    theta, phi = polar_to_spherical(PolarDirection(rr.ravel(), vv.ravel()))
    return float(theta.min()), float(theta.max()), float(phi.min()), float(phi.max())


def _product_selection(n_angles: int, size_budget: int, n_ranges: int):
    """Pick exactly ``size_budget`` entries, spread uniformly over a product grid."""
    total = n_angles * n_ranges
    pick = (np.arange(size_budget) * total) // size_budget
    return pick // n_ranges, pick % n_ranges


def _angle_box_grid(n: int, box) -> tuple[np.ndarray, np.ndarray]:
    t_lo, t_hi, p_lo, p_hi = box
    t_span, p_span = max(t_hi - t_lo, 1e-9), max(p_hi - p_lo, 1e-9)
    n_t = max(1, int(round(math.sqrt(n * t_span / p_span))))
    n_p = max(1, int(math.ceil(n / n_t)))
    theta = t_lo + (np.arange(n_t) + 0.5) * t_span / n_t
    phi = p_lo + (np.arange(n_p) + 0.5) * p_span / n_p
    tt, pp = np.meshgrid(theta, phi, indexing="ij")
    return tt.ravel(), pp.ravel()


def _uniform_baseline(geom, thresholds: DesignThresholds, size_budget: int, n_ranges: int,
                      half_width: float | None, range_law: str) -> Codebook:
    if size_budget < 1:
        raise DomainError("size_budget must be at least 1")
    n_ranges = max(1, min(n_ranges, size_budget))
    n_angles = int(math.ceil(size_budget / n_ranges))
    half = _arc(geom).bend_half_angle if half_width is None else half_width
    box = coverage_box(half, thresholds.rho_max)
    theta, phi = _angle_box_grid(n_angles, box)
    if range_law == "tau":
        t_lo, t_hi = 1.0 / thresholds.r_max, 1.0 / thresholds.r_min
        ranges = 1.0 / (t_lo + (np.arange(n_ranges) + 0.5) * (t_hi - t_lo) / n_ranges)
    else:
        ranges = thresholds.r_min + (np.arange(n_ranges) + 0.5) * (
            thresholds.r_max - thresholds.r_min) / n_ranges
    ia, ir = _product_selection(theta.size, size_budget, n_ranges)
    rho, varphi = spherical_to_polar(theta[ia], phi[ia])
    scheme = "uniform_polar" if range_law == "tau" else "uniform_spherical"
    info = {"scheme": scheme, "n_ranges": n_ranges, "box": box,
            "fingerprint": fingerprint(geom, thresholds, {"scheme": scheme, "size": size_budget,
                                                          "n_ranges": n_ranges, "half": half})}
    return Codebook(geom, np.full(size_budget, KIND_NEAR, dtype=np.int8), np.asarray(rho),
                    np.asarray(varphi), ranges[ir], ia.astype(np.int32),
                    np.zeros(size_budget, np.int32), ir.astype(np.int32) + 1,
                    "focus", info)


def baseline_uniform_polar(geom, thresholds: DesignThresholds, size_budget: int,
                           n_ranges: int = 8, half_width: float | None = None) -> Codebook:
    """Uniform (theta, phi) box crossed with tau-uniform ranges, exact focusing codewords."""
    return _uniform_baseline(geom, thresholds, size_budget, n_ranges, half_width, "tau")


def baseline_uniform_spherical(geom, thresholds: DesignThresholds, size_budget: int,
                               n_ranges: int = 8, half_width: float | None = None) -> Codebook:
    """Uniform (r, theta, phi) grid, exact focusing codewords."""
    return _uniform_baseline(geom, thresholds, size_budget, n_ranges, half_width, "r")
