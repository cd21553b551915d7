"""Exhaustive beam sweeps, spectral efficiency and Monte-Carlo scenarios.

Gains are evaluated as blocked matrix products between channels and
synthesised codeword blocks.  Block boundaries are fixed, independent of the
number of worker threads, so every reduction happens in the same order.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .codebook import Codebook
from .erd import erd as erd_any
from .geometry import PolarDirection, SphericalLocation, polar_to_spherical
from .wavefield import focusing_vectors_polar

CODEWORD_BLOCK = 8192
TRIAL_BLOCK = 256
ROW_TILE_ELEMENTS = 1 << 24


@dataclass(frozen=True)
class UserRegion:
    """Service region in range and polar direction.

    ``range_law`` is ``"tau"`` (uniform in 1/r) or ``"r"``.  With
    ``inside_erd`` the upper range at each sampled direction is clipped to
    that direction's ERD, which concentrates users in the near field.
    """

    r_min: float
    r_max: float
    rho_max: float = 0.5 * math.pi
    phi_tilde_max: float | None = None
    range_law: str = "tau"
    inside_erd: bool = False
    delta_gain: float = 0.5

    def __post_init__(self):
        if not 0 < self.r_min < self.r_max:
            raise ValueError("region needs 0 < r_min < r_max")
        if not 0 < self.rho_max <= 0.5 * math.pi + 1e-15:
            raise ValueError("rho_max must lie in (0, pi/2]")
        if self.range_law not in ("tau", "r"):
            raise ValueError("range_law must be 'tau' or 'r'")


@dataclass
class UserDraw:
    range: np.ndarray
    rho: np.ndarray
    varphi: np.ndarray
    phase: np.ndarray

    def locations(self) -> SphericalLocation:
        theta, phi = polar_to_spherical(PolarDirection(self.rho, self.varphi))
        return SphericalLocation(self.range, theta, phi)


def draw_users(geom, region: UserRegion, rng: np.random.Generator, n: int) -> UserDraw:
    half = geom.arc.bend_half_angle if hasattr(geom, "arc") else geom.bend_half_angle
    if region.phi_tilde_max is not None:
        half = region.phi_tilde_max
    # area-uniform on the polar disc sector
    rho = region.rho_max * np.sqrt(rng.random(n))
    varphi = -half + 2.0 * half * rng.random(n)
    u = rng.random(n)
    phase = 2.0 * math.pi * rng.random(n)
    hi = np.full(n, region.r_max)
    if region.inside_erd:
        hi = np.clip(erd_any(geom, PolarDirection(rho, varphi), region.delta_gain),
                     region.r_min, region.r_max)
    if region.range_law == "tau":
        t_hi, t_lo = 1.0 / region.r_min, 1.0 / hi
        r = 1.0 / (t_lo + u * (t_hi - t_lo))
    else:
        r = region.r_min + u * (hi - region.r_min)
    return UserDraw(r, rho, varphi, phase)


def user_channels(geom, users: UserDraw) -> np.ndarray:
    """Normalised line-of-sight channels, one per row."""
    b = focusing_vectors_polar(geom.positions(), geom.wavelength, users.range, users.rho,
                               users.varphi)
    return b * np.exp(1j * users.phase)[:, None]


def sweep_gains(codebook: Codebook, channels: np.ndarray, precision: str = "double",
                block_size: int = CODEWORD_BLOCK) -> tuple[np.ndarray, np.ndarray]:
    """Best codeword index and |h^H w|^2 for every channel row.

    Ties keep the lowest index.  ``precision="single"`` runs the products in
    complex64, trading ~1e-6 accuracy for speed on very large books.
    """
    if len(codebook) == 0:
        raise ValueError("codebook is empty")
    H = np.atleast_2d(np.asarray(channels))
    if H.shape[1] != codebook.n_elements:
        raise ValueError(f"channels have {H.shape[1]} entries, codebook expects {codebook.n_elements}")
    dtype = np.complex64 if precision == "single" else np.complex128
    Hc = np.conj(H).astype(dtype)
    best = np.full(H.shape[0], -1.0)
    idx = np.zeros(H.shape[0], dtype=np.int64)
    # keep each gain tile around ROW_TILE x block_size entries
    tile = max(1, ROW_TILE_ELEMENTS // block_size)
    for start, W in codebook.blocks(block_size):
        Wt = W.T.astype(dtype)
        for lo in range(0, H.shape[0], tile):
            G = Hc[lo:lo + tile] @ Wt
            P = G.real * G.real + G.imag * G.imag
            local = np.argmax(P, axis=1)
            val = P[np.arange(P.shape[0]), local].astype(float)
            better = val > best[lo:lo + tile]
            best[lo:lo + tile] = np.where(better, val, best[lo:lo + tile])
            idx[lo:lo + tile] = np.where(better, local + start, idx[lo:lo + tile])
    return idx, best


def sweep_select(codebook: Codebook, channel_vector: np.ndarray) -> tuple[int, float]:
    """argmax_w |h^H w|^2 over the codebook; the training overhead is len(codebook)."""
    h = np.asarray(channel_vector)
    if h.ndim != 1:
        raise ValueError("sweep_select takes a single channel vector")
    idx, gain = sweep_gains(codebook, h[None, :])
    return int(idx[0]), float(gain[0])


def spectral_efficiency(gain, snr_db):
    gain = np.asarray(gain, dtype=float)
    if np.any(gain < 0) or np.any(gain > 1 + 1e-9):
        raise ValueError("gain must lie in [0, 1]")
    out = np.log2(1.0 + 10.0 ** (np.asarray(snr_db, dtype=float) / 10.0) * gain)
    return float(out) if out.ndim == 0 else out


@dataclass
class CoverageStats:
    n_samples: int
    minimum: float
    mean: float
    p5: float
    fractions: dict
    best_gain: np.ndarray = field(repr=False)
    best_index: np.ndarray = field(repr=False)
    users: UserDraw = field(repr=False)


def coverage_probe(codebook: Codebook, region: UserRegion, n_samples: int, seed: int,
                   thresholds: Sequence[float] = (0.5,), precision: str = "double",
                   block_size: int = CODEWORD_BLOCK) -> CoverageStats:
    """Distribution of max_w |b(s)^H w| over random service-region points."""
    if n_samples < 1:
        raise ValueError("n_samples must be at least 1")
    rng = np.random.default_rng(seed)
    users = draw_users(codebook.geometry, region, rng, n_samples)
    users.phase[:] = 0.0
    H = user_channels(codebook.geometry, users)
    idx, power = sweep_gains(codebook, H, precision, block_size)
    corr = np.sqrt(np.minimum(power, 1.0))
    fractions = {float(t): float(np.mean(corr >= t)) for t in thresholds}
    return CoverageStats(n_samples, float(corr.min()), float(corr.mean()),
                         float(np.percentile(corr, 5)), fractions, corr, idx, users)


@dataclass
class Scenario:
    geometry: object
    codebooks: Mapping[str, Codebook]
    region: UserRegion
    snr_db: Sequence[float]
    trials: int
    master_seed: int = 0

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if len(self.snr_db) == 0:
            raise ValueError("snr grid is empty")
        if not self.codebooks:
            raise ValueError("no codebooks given")
        for name, cb in self.codebooks.items():
            if cb.n_elements != self.geometry.n_total:
                raise ValueError(f"codebook {name!r} does not match the array size")


@dataclass
class CodebookResult:
    size: int
    mean_se: dict
    mean_gain: float
    histogram: dict
    selected: np.ndarray = field(repr=False)
    gains: np.ndarray = field(repr=False)

    @property
    def overhead(self) -> int:
        return self.size


@dataclass
class TrainingResult:
    per_codebook: dict
    genie_se: dict
    trials: int
    snr_db: list


def trial_rng(master_seed: int, trial: int) -> np.random.Generator:
    """Independent stream for one trial, keyed by (master seed, trial index)."""
    return np.random.default_rng(np.random.SeedSequence(master_seed, spawn_key=(trial,)))


def _draw_trials(scenario: Scenario) -> UserDraw:
    parts = [draw_users(scenario.geometry, scenario.region, trial_rng(scenario.master_seed, t), 1)
             for t in range(scenario.trials)]
    return UserDraw(*(np.concatenate([getattr(p, f) for p in parts])
                      for f in ("range", "rho", "varphi", "phase")))


def run_scenario(scenario: Scenario, n_jobs: int = 1) -> TrainingResult:
    users = _draw_trials(scenario)
    H = user_channels(scenario.geometry, users)
    chunks = [(lo, min(lo + TRIAL_BLOCK, scenario.trials)) for lo in range(0, scenario.trials, TRIAL_BLOCK)]
    snr = [float(s) for s in scenario.snr_db]
    per = {}
    for name, cb in scenario.codebooks.items():
        def work(span, cb=cb):
            return sweep_gains(cb, H[span[0]:span[1]])

        if n_jobs > 1:
            with ThreadPoolExecutor(max_workers=n_jobs) as pool:
                outs = list(pool.map(work, chunks))
        else:
            outs = [work(c) for c in chunks]
        sel = np.concatenate([o[0] for o in outs])
        gain = np.minimum(np.concatenate([o[1] for o in outs]), 1.0)
        uniq, counts = np.unique(sel, return_counts=True)
        per[name] = CodebookResult(
            size=len(cb),
            mean_se={s: float(np.mean(spectral_efficiency(gain, s))) for s in snr},
            mean_gain=float(gain.mean()),
            histogram={int(u): int(c) for u, c in zip(uniq, counts)},
            selected=sel,
            gains=gain,
        )
    genie = {s: float(np.mean(spectral_efficiency(np.ones(scenario.trials), s))) for s in snr}
    return TrainingResult(per, genie, scenario.trials, snr)
