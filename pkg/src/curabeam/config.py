"""Run configuration: one JSON document, merged over defaults, validated on load."""

from __future__ import annotations

import copy
import hashlib
import json
import math
from pathlib import Path
from typing import Any

from .codebook import DesignSwitches, DesignThresholds
from .exceptions import ConfigError, CurabeamError
from .geometry import SPEED_OF_LIGHT, Cura1DGeometry, Cura2DGeometry

DEFAULT_CONFIG: dict[str, Any] = {
    "geometry": {
        "array": "1d",
        "n_elements": 512,
        "n_rows": 8,
        "bend_half_angle": math.pi / 6,
        "spacing": None,
        "row_spacing": None,
        "carrier_frequency": 30e9,
        "wavelength": None,
    },
    "thresholds": {
        "delta_p": 0.5,
        "delta_r": 0.5,
        "delta_gain": 0.5,
        "eta_r": 1.0,
        "eta_a": 0.25,
        "rho_max": math.pi / 2,
        "r_min": 25.0,
        "r_max": 2000.0,
    },
    "switches": {
        "theta_variant": "appendix",
        "strict_paper_formulas": True,
        "phi_tilde_max": None,
        "max_codewords": 5_000_000,
    },
    "scenario": {
        "snr_db": [0.0, 10.0, 20.0],
        "trials": 500,
        "seed": 0,
        "range_law": "tau",
        "inside_erd": True,
        "codebooks": ["proposed", "dft", "uniform_polar", "uniform_spherical"],
        "baseline_ranges": 8,
        "coverage_samples": 10000,
        "coverage_thresholds": [0.45, 0.5],
        "precision": "double",
    },
    "heatmap": {
        "mode": "angle_angle",
        "focus": {"range": 50.0, "theta": math.pi / 2, "phi": math.pi / 2},
        "axis": "theta",
        "theta_span": [0.0, math.pi],
        "phi_span": [0.0, math.pi],
        "range_span": [25.0, 10000.0],
        "points": [91, 91],
    },
    "erd_map": {
        "betas": [0.0, math.pi / 6, math.pi / 4, math.pi / 3],
        "points": 181,
    },
    "validation": {
        "directions": 20,
        "seed": 0,
    },
    "output": {
        "directory": "out",
        "write_matrix": True,
        "max_matrix_bytes": 2_000_000_000,
    },
    "runtime": {
        "jobs": 1,
    },
}

# blocks that do not change results and so stay out of the hash
_UNHASHED = ("output", "runtime")
_FREE_FORM = {("heatmap", "focus")}

CODEBOOK_NAMES = ("proposed", "dft", "uniform_polar", "uniform_spherical")


def _merge(base: dict, update: dict, path: tuple = ()) -> dict:
    out = copy.deepcopy(base)
    for key, value in update.items():
        where = ".".join(path + (key,))
        if key not in base:
            raise ConfigError(f"unknown config key {where!r}")
        if isinstance(base[key], dict) and path + (key,) not in _FREE_FORM:
            if not isinstance(value, dict):
                raise ConfigError(f"config key {where!r} must be an object")
            out[key] = _merge(base[key], value, path + (key,))
        else:
            out[key] = copy.deepcopy(value)
    return out


def parse_override(text: str) -> tuple[list[str], Any]:
    """``a.b=value``; the value is read as JSON when possible, else as a string."""
    if "=" not in text:
        raise ConfigError(f"override {text!r} is not of the form key=value")
    key, raw = text.split("=", 1)
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    parts = [p for p in key.strip().split(".") if p]
    if not parts:
        raise ConfigError(f"override {text!r} has an empty key")
    return parts, value


def _nest(parts: list[str], value) -> dict:
    out: Any = value
    for p in reversed(parts):
        out = {p: out}
    return out


def _mentions(update: dict, block: str, key: str) -> bool:
    return isinstance(update.get(block), dict) and key in update[block]


def _drop_other_wavelength_source(cfg: dict, update: dict) -> None:
    # a layer naming only one of wavelength / carrier frequency replaces the other
    said_lambda = _mentions(update, "geometry", "wavelength")
    said_fc = _mentions(update, "geometry", "carrier_frequency")
    if said_lambda and not said_fc:
        cfg["geometry"]["carrier_frequency"] = None
    elif said_fc and not said_lambda:
        cfg["geometry"]["wavelength"] = None


def load_config(path: str | Path | None = None, overrides: list[str] = (),
                seed: int | None = None) -> dict:
    user: dict = {}
    if path is not None:
        try:
            user = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        if not isinstance(user, dict):
            raise ConfigError("config root must be a JSON object")
    cfg = _merge(DEFAULT_CONFIG, user)
    _drop_other_wavelength_source(cfg, user)
    for text in overrides:
        parts, value = parse_override(text)
        update = _nest(parts, value)
        cfg = _merge(cfg, update)
        _drop_other_wavelength_source(cfg, update)
    if seed is not None:
        cfg["scenario"]["seed"] = int(seed)
    validate_config(cfg)
    return cfg


def config_hash(cfg: dict) -> str:
    hashed = {k: v for k, v in cfg.items() if k not in _UNHASHED}
    text = json.dumps(hashed, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(text.encode()).hexdigest()


def wavelength_of(geo: dict) -> float:
    fc, lam = geo.get("carrier_frequency"), geo.get("wavelength")
    if (fc is None) == (lam is None):
        raise ConfigError("give exactly one of geometry.carrier_frequency and geometry.wavelength")
    value = SPEED_OF_LIGHT / float(fc) if lam is None else float(lam)
    if not (math.isfinite(value) and value > 0):
        raise ConfigError("wavelength must be positive")
    return value


def build_geometry(cfg: dict, bend_half_angle: float | None = None):
    geo = cfg["geometry"]
    lam = wavelength_of(geo)
    beta = geo["bend_half_angle"] if bend_half_angle is None else bend_half_angle
    try:
        arc = Cura1DGeometry(geo["n_elements"], float(beta), lam,
                             None if geo["spacing"] is None else float(geo["spacing"]))
        if geo["array"] == "1d":
            return arc
        if geo["array"] == "2d":
            return Cura2DGeometry(arc, geo["n_rows"],
                                  None if geo["row_spacing"] is None else float(geo["row_spacing"]))
    except (CurabeamError, TypeError, ValueError) as exc:
        raise ConfigError(f"invalid geometry: {exc}") from exc
    raise ConfigError(f"geometry.array must be '1d' or '2d', got {geo['array']!r}")


def build_thresholds(cfg: dict) -> DesignThresholds:
    try:
        return DesignThresholds(**{k: float(v) for k, v in cfg["thresholds"].items()})
    except (CurabeamError, TypeError, ValueError) as exc:
        raise ConfigError(f"invalid thresholds: {exc}") from exc


def build_switches(cfg: dict) -> DesignSwitches:
    sw = cfg["switches"]
    if sw["theta_variant"] not in ("appendix", "lemma_body"):
        raise ConfigError("switches.theta_variant must be 'appendix' or 'lemma_body'")
    if not isinstance(sw["strict_paper_formulas"], bool):
        raise ConfigError("switches.strict_paper_formulas must be true or false")
    phi = sw["phi_tilde_max"]
    if phi is not None and not (isinstance(phi, (int, float)) and 0 <= phi <= math.pi):
        raise ConfigError("switches.phi_tilde_max must be null or an angle in [0, pi]")
    return DesignSwitches(sw["theta_variant"], sw["strict_paper_formulas"],
                          None if phi is None else float(phi), int(sw["max_codewords"]))


def validate_config(cfg: dict) -> None:
    geom = build_geometry(cfg)
    thr = build_thresholds(cfg)
    try:
        thr.check_geometry(geom)
    except CurabeamError as exc:
        raise ConfigError(str(exc)) from exc
    build_switches(cfg)
    sc = cfg["scenario"]
    if not isinstance(sc["trials"], int) or sc["trials"] < 1:
        raise ConfigError("scenario.trials must be a positive integer")
    if not isinstance(sc["seed"], int) or not 0 <= sc["seed"] < 2**64:
        raise ConfigError("scenario.seed must be an unsigned 64-bit integer")
    if not sc["snr_db"] or not all(isinstance(s, (int, float)) for s in sc["snr_db"]):
        raise ConfigError("scenario.snr_db must be a non-empty list of numbers")
    if sc["range_law"] not in ("tau", "r"):
        raise ConfigError("scenario.range_law must be 'tau' or 'r'")
    unknown = set(sc["codebooks"]) - set(CODEBOOK_NAMES)
    if not sc["codebooks"] or unknown:
        raise ConfigError(f"scenario.codebooks must be a non-empty subset of {CODEBOOK_NAMES}")
    if sc["precision"] not in ("single", "double"):
        raise ConfigError("scenario.precision must be 'single' or 'double'")
    if not isinstance(sc["coverage_samples"], int) or sc["coverage_samples"] < 1:
        raise ConfigError("scenario.coverage_samples must be a positive integer")
    hm = cfg["heatmap"]
    if hm["mode"] not in ("angle_angle", "range_angle"):
        raise ConfigError("heatmap.mode must be 'angle_angle' or 'range_angle'")
    if hm["axis"] not in ("theta", "phi"):
        raise ConfigError("heatmap.axis must be 'theta' or 'phi'")
    focus = hm["focus"]
    if set(focus) != {"range", "theta", "phi"} or not focus["range"] > 0:
        raise ConfigError("heatmap.focus needs range > 0, theta and phi")
    if len(hm["points"]) != 2 or min(hm["points"]) < 1:
        raise ConfigError("heatmap.points must be two positive integers")
    betas = cfg["erd_map"]["betas"]
    if not betas or not all(0 <= b <= math.pi / 2 for b in betas):
        raise ConfigError("erd_map.betas must be a non-empty list of angles in [0, pi/2]")
    if int(cfg["runtime"]["jobs"]) < 1:
        raise ConfigError("runtime.jobs must be at least 1")
