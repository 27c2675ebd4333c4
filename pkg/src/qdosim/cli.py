"""Batch driver: point solves, sweeps, curve analysis, and SVG export.

Commands
    qdo vqe     --theta X --d X [--config PATH] [--out DIR] [--seed N]
    qdo oracle  --theta X --d X [--config PATH] [--out DIR] [--seed N]
    qdo sweep   [--config PATH] [--out DIR] [--seed N] [--engine vqe|oracle]
    qdo analyze CURVE.csv [CURVE.csv ...] [--out DIR]
    qdo render  INPUT [INPUT ...] [--out DIR]

Exit codes: 0 success, 1 config/input error, 2 solver failure, 3 sweep with
fewer than 90% healthy rows. QDO_THREADS bounds the sweep worker pool.
"""

from __future__ import annotations

import argparse
import csv
import datetime
import io
import json
import math
import os
import sys
import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace

import numpy as np

from . import analysis as ana
from .config import ConfigError, RunConfig, load_config
from .errors import QdoError
from .fock import (
    FockConfig,
    FockVector,
    QuadratureGrid,
    joint_position_density,
    partial_trace,
    wigner_antisymmetric_slice,
    wigner_single_mode,
)
from .fock import mutual_information
from .model import ModelParams, uncoupled_ground_energy
from .oracle import ground_state_exact
from .svg import heat_map, line_plot
from .vqe import point_seed, train

ARTIFACT_VERSION = "0.1.0"
CURVE_HEADER = ["d", "E_b", "energy", "norm", "entropy", "correlation", "status"]


def _atomic_write(path: str, data: str):
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _json_dumps(obj) -> str:
    return json.dumps(obj, indent=2, allow_nan=True) + "\n"


def _utc_now() -> str:
    return datetime.datetime.now(datetime.timezone.utc).isoformat()


class Manifest:
    """Run metadata: written before the first point, finalized after the last."""

    def __init__(self, out_dir: str, cfg: RunConfig):
        self.path = os.path.join(out_dir, "manifest.json")
        self.data = {
            "artifact_version": ARTIFACT_VERSION,
            "seed": cfg.seed,
            "config": cfg.snapshot(),
            "started_utc": _utc_now(),
            "finished_utc": None,
            "points": [],
        }
        _atomic_write(self.path, _json_dumps(self.data))

    def add_point(self, theta: float, d: float, status: str):
        self.data["points"].append({"theta": theta, "d": d, "status": status})

    def finalize(self):
        self.data["finished_utc"] = _utc_now()
        _atomic_write(self.path, _json_dumps(self.data))


def _model_for(cfg: RunConfig, theta: float, d: float) -> ModelParams:
    m = cfg.model
    return ModelParams(
        theta=theta, d=d, omega1=m.omega1, omega2=m.omega2,
        m1=m.m1, m2=m.m2, q1=m.q1, q2=m.q2, softening=m.softening,
    )


def _base_model(cfg: RunConfig, theta: float) -> ModelParams:
    return _model_for(cfg, theta, 1.0)


def _point_record(cfg: RunConfig, theta: float, d: float, engine: str) -> dict:
    p = _model_for(cfg, theta, d)
    vcfg = cfg.vqe_config()
    grid = vcfg.grid
    if engine == "oracle":
        energy, state = ground_state_exact(p, vcfg.fock, cfg.analysis.quad_order)
        norm, steps, converged, params = 1.0, 0, True, None
    else:
        res = train(p, replace(vcfg, seed=point_seed(cfg.seed, theta, d)))
        energy, state, norm = res.energy, res.state, res.final_norm
        steps, converged = res.steps_taken, res.converged
        params = res.params.to_vector().tolist()
    record = {
        "theta": theta,
        "d": d,
        "engine": engine,
        "seed": cfg.seed,
        "energy": energy,
        "binding_energy": energy - uncoupled_ground_energy(p),
        "norm": norm,
        "entropy": 0.5 * mutual_information(state),
        "correlation": ana.correlation_coefficient(state, grid),
        "steps": steps,
        "converged": converged,
        "params": params,
    }
    if cfg.analysis.cat_fit:
        fit = ana.fit_cat(state)
        record["cat_fit"] = {
            "alpha_re": fit.alpha.real,
            "alpha_im": fit.alpha.imag,
            "fidelity": fit.fidelity,
        }
    else:
        record["cat_fit"] = None
    if cfg.output.save_states:
        amps = state.amplitudes
        record["state"] = [[a.real, a.imag] for a in amps]  # row-major (n1, n2)
    return record


def cmd_point(cfg: RunConfig, theta: float, d: float, engine: str, out_dir: str) -> int:
    manifest = Manifest(out_dir, cfg)
    try:
        record = _point_record(cfg, theta, d, engine)
    except QdoError as exc:
        manifest.add_point(theta, d, f"error: {exc}")
        manifest.finalize()
        print(f"solver failure: {exc}", file=sys.stderr)
        return 2
    manifest.add_point(theta, d, "ok")
    manifest.finalize()
    name = f"point-{engine}-theta{theta:g}-d{d:g}.json"
    _atomic_write(os.path.join(out_dir, name), _json_dumps(record))
    print(os.path.join(out_dir, name))
    return 0


def _curve_rows(curve: ana.BindingCurve) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CURVE_HEADER)
    for pt in curve.points:
        writer.writerow(
            [pt.d, pt.E_b, pt.energy, pt.norm, pt.entropy, pt.correlation, pt.status]
        )
    return buf.getvalue()


def _n_workers() -> int:
    env = os.environ.get("QDO_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def cmd_sweep(cfg: RunConfig, out_dir: str) -> int:
    manifest = Manifest(out_dir, cfg)
    vcfg = cfg.vqe_config()
    d_values = cfg.d_grid()

    def one_theta(theta: float) -> ana.BindingCurve:
        # warm starts couple the d-points of one slice; slices are independent
        return ana.sweep(
            theta, d_values, vcfg, engine=cfg.engine,
            base=_base_model(cfg, theta), quad_order=cfg.analysis.quad_order,
        )

    thetas = list(cfg.model.thetas)
    with ThreadPoolExecutor(max_workers=min(_n_workers(), len(thetas))) as pool:
        curves = list(pool.map(one_theta, thetas))

    total = ok = 0
    for theta, curve in zip(thetas, curves):
        for pt in curve.points:
            manifest.add_point(theta, pt.d, pt.status)
            total += 1
            ok += pt.status == "ok"
        _atomic_write(os.path.join(out_dir, f"curve-theta{theta:g}.csv"), _curve_rows(curve))
    manifest.finalize()
    print(f"{ok}/{total} points ok -> {out_dir}")
    return 0 if ok >= 0.9 * total else 3


def _read_curve(path: str):
    with open(path, encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0] != CURVE_HEADER:
        raise ConfigError(f"{path}: not a curve CSV (header mismatch)")
    pts = []
    for row in rows[1:]:
        d, eb, energy, norm, entropy, corr = (float(v) for v in row[:6])
        pts.append(
            ana.CurvePoint(
                d=d, E_b=eb, energy=energy, norm=norm,
                entropy=entropy, correlation=corr, source="file", status=row[6],
            )
        )
    theta = 0.0
    stem = os.path.basename(path)
    if "theta" in stem:
        try:
            theta = float(stem.split("theta", 1)[1].rsplit(".csv", 1)[0])
        except ValueError:
            pass
    return ana.BindingCurve(theta=theta, points=pts)


def cmd_analyze(paths, out_dir: str, bandwidth: float) -> int:
    table = []
    for path in paths:
        curve = _read_curve(path)
        stem = os.path.splitext(os.path.basename(path))[0]
        row = {"curve": stem, "theta": curve.theta}
        try:
            fit = ana.fit_morse(curve)
            row.update(
                morse={"E_b": fit.E_b, "d_b": fit.d_b, "s": fit.s,
                       "residual_l2": fit.residual_l2, "converged": fit.converged},
                inflection_d=ana.inflection_point(fit),
                bound_state=True,
                status="ok",
            )
        except QdoError as exc:
            row.update(morse=None, inflection_d=None, bound_state=False,
                       status=f"fit-failed: {exc}")
        table.append(row)
        _atomic_write(os.path.join(out_dir, f"{stem}-morse.json"), _json_dumps(row))

        d, s_raw, s_smooth = ana.entropy_profile(curve, bandwidth)
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["d", "entropy", "smoothed"])
        for values in zip(d, s_raw, s_smooth):
            writer.writerow(list(values))
        _atomic_write(os.path.join(out_dir, f"{stem}-entropy.csv"), buf.getvalue())

    _atomic_write(os.path.join(out_dir, "analysis-report.json"), _json_dumps(table))
    print(os.path.join(out_dir, "analysis-report.json"))
    return 0


def _render_curve(path: str, out_dir: str, fits: dict):
    curve = _read_curve(path)
    stem = os.path.splitext(os.path.basename(path))[0]
    d, eb = curve.d, curve.E_b
    series = {"binding energy": (d, eb)}
    fit = fits.get(stem)
    if fit is not None:
        dd = np.linspace(d.min(), d.max(), 200) if d.size else np.array([])
        series["Morse fit"] = (dd, ana.morse_curve(dd, fit["E_b"], fit["d_b"], fit["s"]))
    _atomic_write(os.path.join(out_dir, f"{stem}-binding.svg"),
                  line_plot(series, "d", "E_b"))
    ent_d, ent, smooth = ana.entropy_profile(curve)
    _atomic_write(
        os.path.join(out_dir, f"{stem}-entropy.svg"),
        line_plot({"entropy": (ent_d, ent), "kernel smooth": (ent_d, smooth)},
                  "d", "entanglement entropy"),
    )
    corr = np.array([pt.correlation for pt in curve.points])
    _atomic_write(os.path.join(out_dir, f"{stem}-correlation.svg"),
                  line_plot({"correlation": (d, corr)}, "d", "C(X1, X2)"))


def _render_state(path: str, out_dir: str):
    with open(path, encoding="utf-8") as fh:
        record = json.load(fh)
    if "state" not in record or record["state"] is None:
        raise ConfigError(f"{path}: no state amplitudes to render")
    amps = np.array([complex(re, im) for re, im in record["state"]])
    dim = int(round(math.sqrt(amps.size)))
    state = FockVector(FockConfig(dim_per_mode=dim), amps)
    stem = os.path.splitext(os.path.basename(path))[0]
    grid = QuadratureGrid(-4.0, 4.0, 161)
    ext = (grid.x_min, grid.x_max, grid.x_min, grid.x_max)
    _atomic_write(os.path.join(out_dir, f"{stem}-joint-density.svg"),
                  heat_map(joint_position_density(state, grid), ext, "X1", "X2"))
    for mode in (1, 2):
        w = wigner_single_mode(partial_trace(state, mode), grid, grid)
        _atomic_write(os.path.join(out_dir, f"{stem}-wigner-mode{mode}.svg"),
                      heat_map(w, ext, "X", "P"))
    ws = wigner_antisymmetric_slice(state, grid, grid)
    _atomic_write(os.path.join(out_dir, f"{stem}-wigner-slice.svg"),
                  heat_map(ws, ext, "X", "P"))


def cmd_render(paths, out_dir: str) -> int:
    fits = {}
    csvs, jsons = [], []
    for path in paths:
        if path.endswith(".json"):
            jsons.append(path)
        elif path.endswith(".csv"):
            csvs.append(path)
        else:
            print(f"unsupported input: {path}", file=sys.stderr)
            return 1
    for path in jsons:
        with open(path, encoding="utf-8") as fh:
            record = json.load(fh)
        if isinstance(record, dict) and record.get("morse"):
            fits[record["curve"]] = record["morse"]
    try:
        for path in csvs:
            _render_curve(path, out_dir, fits)
        for path in jsons:
            with open(path, encoding="utf-8") as fh:
                record = json.load(fh)
            if isinstance(record, dict) and "state" in record and record["state"]:
                _render_state(path, out_dir)
    except (QdoError, ValueError, KeyError, json.JSONDecodeError) as exc:
        print(f"render failed: {exc}", file=sys.stderr)
        return 1
    print(out_dir)
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qdo", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("vqe", "oracle", "sweep"):
        sp = sub.add_parser(name)
        sp.add_argument("--config", default=None)
        sp.add_argument("--out", default=None)
        sp.add_argument("--seed", type=int, default=None)
        if name != "oracle":
            sp.add_argument("--engine", choices=("vqe", "oracle"), default=None)
        if name in ("vqe", "oracle"):
            sp.add_argument("--theta", type=float, required=True)
            sp.add_argument("--d", type=float, required=True)
    for name in ("analyze", "render"):
        sp = sub.add_parser(name)
        sp.add_argument("inputs", nargs="+")
        sp.add_argument("--out", default=None)
        if name == "analyze":
            sp.add_argument("--bandwidth", type=float, default=0.12)
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command in ("vqe", "oracle", "sweep"):
            cfg = load_config(args.config) if args.config else RunConfig()
            if args.seed is not None:
                cfg.seed = args.seed
            if getattr(args, "engine", None):
                cfg.engine = args.engine
            out_dir = args.out or cfg.output.directory
            if args.command == "sweep":
                return cmd_sweep(cfg, out_dir)
            return cmd_point(cfg, args.theta, args.d, args.command, out_dir)
        out_dir = args.out or "qdo-out"
        if args.command == "analyze":
            return cmd_analyze(args.inputs, out_dir, args.bandwidth)
        return cmd_render(args.inputs, out_dir)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"missing input: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
