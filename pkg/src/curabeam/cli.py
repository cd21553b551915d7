"""Command-line entry point.

Every subcommand reads one JSON config (merged over built-in defaults),
writes deterministic files into the output directory and prints a short
summary.  Exit codes: 0 success, 2 configuration error, 3 numerical or
domain error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import config as cfgmod
from ._io import atomic_write_bytes, write_csv, write_json
from .codebook import (
    baseline_dft,
    baseline_uniform_polar,
    baseline_uniform_spherical,
    build_codebook_1d,
    build_codebook_2d,
    size_breakdown,
)
from .erd import erd_2d_branches
from .exceptions import CodebookSizeError, ConfigError, CurabeamError
from .geometry import Cura2DGeometry, PolarDirection, SphericalLocation
from .maps import erd_plane_cut, heatmap_angle_angle, heatmap_range_angle, with_bend
from .trainsim import Scenario, UserRegion, coverage_probe, run_scenario
from .validation import (
    dimension_consistency_report,
    erd_consistency_scan,
    lemma1_error_scan,
    lemma2_error_scan,
    sample_directions,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DOMAIN = 3


class Run:
    """Resolved config plus the objects every subcommand needs."""

    def __init__(self, cfg: dict):
        self.cfg = cfg
        self.hash = cfgmod.config_hash(cfg)
        self.geometry = cfgmod.build_geometry(cfg)
        self.thresholds = cfgmod.build_thresholds(cfg)
        self.switches = cfgmod.build_switches(cfg)
        self.out = Path(cfg["output"]["directory"])

    @property
    def arc(self):
        return self.geometry.arc if isinstance(self.geometry, Cura2DGeometry) else self.geometry

    def proposed(self):
        build = build_codebook_2d if isinstance(self.geometry, Cura2DGeometry) else build_codebook_1d
        return build(self.geometry, self.thresholds, self.switches)

    def region(self, inside_erd: bool) -> UserRegion:
        t = self.thresholds
        sc = self.cfg["scenario"]
        return UserRegion(t.r_min, t.r_max, t.rho_max, self.switches.phi_tilde_max,
                          sc["range_law"], inside_erd, t.delta_gain)

    def csv(self, name, header, rows):
        write_csv(self.out / name, header, rows, self.hash)

    def json(self, name, payload):
        write_json(self.out / name, payload, self.hash)


def _columns(cols: dict):
    keys = list(cols)
    return keys, zip(*(cols[k] for k in keys))


# -- subcommands ----------------------------------------------------------------


def cmd_codebook(run: Run) -> dict:
    sizes = size_breakdown(run.geometry, run.thresholds, run.switches)
    manifest = {"geometry": run.cfg["geometry"], "thresholds": run.cfg["thresholds"],
                "switches": run.cfg["switches"], "size": sizes, "n_elements": run.geometry.n_total}
    n = run.geometry.n_total
    matrix_bytes = sizes["total"] * n * 16
    limit = run.cfg["output"]["max_matrix_bytes"]
    if sizes["total"] > run.switches.max_codewords:
        manifest.update(materialized=False,
                        reason=f"{sizes['total']} codewords exceed the size guard "
                               f"of {run.switches.max_codewords}; counts only")
        run.json("codebook_manifest.json", manifest)
        return {"codewords": sizes["total"], "materialized": False, "size": sizes}
    cb = run.proposed()
    meta = cb.metadata_columns()
    header, rows = _columns(meta)
    run.csv("codebook_metadata.csv", header, rows)
    manifest.update(materialized=True, synthesis=cb.synthesis, fingerprint=cb.fingerprint,
                    reference_range=cb.reference_range, metadata_file="codebook_metadata.csv")
    if run.cfg["output"]["write_matrix"] and matrix_bytes <= limit:
        digest = hashlib.sha256()
        chunks = []
        for _, W in cb.blocks():
            # codeword-major rows, (re, im) interleaved, little-endian float64
            data = np.ascontiguousarray(W.astype("<c16")).view("<f8").tobytes()
            digest.update(data)
            chunks.append(data)
        atomic_write_bytes(run.out / "codebook_matrix.bin", b"".join(chunks))
        manifest["matrix"] = {"file": "codebook_matrix.bin", "dtype": "float64 little-endian",
                              "layout": "codeword-major, real/imag interleaved",
                              "shape": [len(cb), n, 2], "sha256": digest.hexdigest()}
    else:
        manifest["matrix"] = None
        manifest["matrix_skipped"] = (f"matrix would take {matrix_bytes} bytes, limit {limit}"
                                      if run.cfg["output"]["write_matrix"] else "disabled")
    run.json("codebook_manifest.json", manifest)
    return {"codewords": len(cb), "materialized": True, "size": sizes}


def cmd_heatmap(run: Run) -> dict:
    hm = run.cfg["heatmap"]
    f = hm["focus"]
    focus = SphericalLocation(float(f["range"]), float(f["theta"]), float(f["phi"]))
    n1, n2 = hm["points"]
    if hm["mode"] == "angle_angle":
        theta = np.linspace(*hm["theta_span"], n1)
        phi = np.linspace(*hm["phi_span"], n2)
        c1, c2, gain = heatmap_angle_angle(run.geometry, focus, theta, phi)
        names = ("theta", "phi")
    else:
        lo, hi = hm["range_span"]
        ranges = np.geomspace(lo, hi, n1)
        span = hm["theta_span"] if hm["axis"] == "theta" else hm["phi_span"]
        c1, c2, gain = heatmap_range_angle(run.geometry, focus, ranges,
                                           np.linspace(*span, n2), hm["axis"])
        names = ("range", hm["axis"])
    run.csv(f"heatmap_{hm['mode']}.csv", ["coord1", "coord2", "gain"], zip(c1, c2, gain))
    run.json(f"heatmap_{hm['mode']}.json", {"mode": hm["mode"], "coord1": names[0],
                                           "coord2": names[1], "focus": f, "points": [n1, n2],
                                           "peak_gain": float(gain.max())})
    return {"mode": hm["mode"], "points": int(gain.size), "peak_gain": float(gain.max())}


def cmd_erd_map(run: Run) -> dict:
    em = run.cfg["erd_map"]
    files = []
    for beta in em["betas"]:
        geom = with_bend(run.geometry, beta)
        cut = erd_plane_cut(geom, run.thresholds.delta_gain, em["points"])
        name = f"erd_contour_beta_{math.degrees(beta):g}deg.csv"
        header, rows = _columns(cut)
        run.csv(name, header, rows)
        entry = {"bend_half_angle": beta, "file": name,
                 "max_erd": float(np.max(cut["erd"])), "min_erd": float(np.min(cut["erd"]))}
        if isinstance(geom, Cura2DGeometry):
            br = erd_2d_branches(geom, PolarDirection(cut["rho"], cut["varphi"]), run.thresholds.delta_gain)
            entry["row_branch_active"] = int(np.sum(np.asarray(br.row) <= np.asarray(br.arc)))
        files.append(entry)
    run.json("erd_map.json", {"delta_gain": run.thresholds.delta_gain, "plane": "yz",
                              "contours": files})
    return {"contours": len(files)}


def _scenario_codebooks(run: Run) -> dict:
    sc = run.cfg["scenario"]
    wanted = sc["codebooks"]
    proposed = run.proposed()
    size = len(proposed)
    books = {}
    if "proposed" in wanted:
        books["proposed"] = proposed
    if "dft" in wanted:
        # a DFT book cannot exceed the array size
        books["dft"] = baseline_dft(run.geometry, min(size, run.geometry.n_total))
    half = run.switches.phi_tilde_max
    if "uniform_polar" in wanted:
        books["uniform_polar"] = baseline_uniform_polar(run.geometry, run.thresholds, size,
                                                        sc["baseline_ranges"], half)
    if "uniform_spherical" in wanted:
        books["uniform_spherical"] = baseline_uniform_spherical(run.geometry, run.thresholds, size,
                                                                sc["baseline_ranges"], half)
    return books


def cmd_sweep(run: Run) -> dict:
    sc = run.cfg["scenario"]
    books = _scenario_codebooks(run)
    scenario = Scenario(run.geometry, books, run.region(sc["inside_erd"]), sc["snr_db"],
                        sc["trials"], sc["seed"])
    result = run_scenario(scenario, n_jobs=int(run.cfg["runtime"]["jobs"]))
    rows = []
    for name, res in result.per_codebook.items():
        for snr in result.snr_db:
            rows.append((name, res.size, snr, res.mean_se[snr], res.mean_gain,
                         result.genie_se[snr], result.trials))
    run.csv("sweep.csv", ["codebook", "size", "snr_db", "mean_se", "mean_gain", "genie_se",
                          "trials"], rows)
    hist = []
    for name, res in result.per_codebook.items():
        hist.extend((name, k, v) for k, v in sorted(res.histogram.items()))
    run.csv("sweep_histogram.csv", ["codebook", "index", "count"], hist)
    run.json("sweep_summary.json", {
        "trials": result.trials, "seed": sc["seed"], "snr_db": result.snr_db,
        "genie_se": {repr(s): v for s, v in result.genie_se.items()},
        "codebooks": {n: {"size": r.size, "overhead": r.overhead, "mean_gain": r.mean_gain,
                          "mean_se": {repr(s): v for s, v in r.mean_se.items()}}
                      for n, r in result.per_codebook.items()},
    })
    return {n: r.size for n, r in result.per_codebook.items()}


def cmd_coverage(run: Run) -> dict:
    sc = run.cfg["scenario"]
    cb = run.proposed()
    stats = coverage_probe(cb, run.region(False), sc["coverage_samples"], sc["seed"],
                           sc["coverage_thresholds"], sc["precision"])
    u = stats.users
    theta, phi = u.locations()[1:]
    run.csv("coverage.csv", ["sample", "range", "rho", "varphi", "theta", "phi",
                             "max_correlation", "best_index"],
            zip(range(stats.n_samples), u.range, u.rho, u.varphi, theta, phi,
                stats.best_gain, stats.best_index))
    summary = {"n_samples": stats.n_samples, "minimum": stats.minimum, "mean": stats.mean,
               "p5": stats.p5, "fractions": {repr(k): v for k, v in stats.fractions.items()},
               "codebook_size": len(cb), "precision": sc["precision"], "seed": sc["seed"]}
    run.json("coverage_summary.json", summary)
    return {"minimum": stats.minimum, "mean": stats.mean, "p5": stats.p5}


def cmd_validate(run: Run) -> dict:
    val = run.cfg["validation"]
    arc = run.arc
    dirs = sample_directions(arc, val["directions"], val["seed"])
    reports = [lemma1_error_scan(arc, dirs, variant=run.switches.theta_variant),
               lemma2_error_scan(arc, dirs),
               erd_consistency_scan(arc, dirs, run.thresholds.delta_gain)]
    if isinstance(run.geometry, Cura2DGeometry):
        reports.append(dimension_consistency_report(run.geometry, run.thresholds))
    run.json("validation.json", {"reports": [r.to_dict() for r in reports]})
    for r in reports:
        status = "PASS" if r.passed else "FAIL"
        print(f"{status} {r.model}: max error {r.max_abs_error:.4g} (tolerance {r.tolerance})")
    return {r.model: r.passed for r in reports}


COMMANDS = {
    "codebook": cmd_codebook,
    "heatmap": cmd_heatmap,
    "erd-map": cmd_erd_map,
    "sweep": cmd_sweep,
    "coverage": cmd_coverage,
    "validate": cmd_validate,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="curabeam", description="Polar-domain codebooks for arc arrays")
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("--config", help="JSON run configuration")
    p.add_argument("--out", help="output directory (overrides output.directory)")
    p.add_argument("--seed", type=int, help="master seed (overrides scenario.seed)")
    p.add_argument("--jobs", type=int, help="worker threads (does not change results)")
    p.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
                   help="override one config entry, e.g. --set geometry.n_elements=128")
    return p


def _fail(code: int, exc: Exception) -> int:
    print(json.dumps({"error": type(exc).__name__, "message": str(exc), "exit_code": code}),
          file=sys.stderr)
    return code


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    overrides = list(args.overrides)
    if args.out is not None:
        overrides.append(f"output.directory={json.dumps(args.out)}")
    if args.jobs is not None:
        overrides.append(f"runtime.jobs={args.jobs}")
    try:
        run = Run(cfgmod.load_config(args.config, overrides, args.seed))
    except ConfigError as exc:
        return _fail(EXIT_CONFIG, exc)
    try:
        summary = COMMANDS[args.command](run)
    except ConfigError as exc:
        return _fail(EXIT_CONFIG, exc)
    except (CodebookSizeError, CurabeamError, ValueError, ArithmeticError) as exc:
        return _fail(EXIT_DOMAIN, exc)
    print(json.dumps({"command": args.command, "config_sha256": run.hash,
                      "output": str(run.out), **summary}, sort_keys=True, default=str))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
