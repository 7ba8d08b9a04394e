"""Command-line runner: ``run``, ``sweep``, ``metric`` and ``validate``.

Exit codes: 0 ok, 1 config error, 2 runtime error, 3 validation failure.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from ._accel import USE_NUMBA
from .config import ExperimentConfig, build_body, load_config, parse_config
from .conjecture import conjecture_report, report_to_dict
from .errors import ConfigInvalid, HilbertDynError
from .geometry import boundary_point
from .metric import MetricConvention, hilbert_distance
from .suites import SUITES
from .validation import run_all

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME, EXIT_VALIDATION = 0, 1, 2, 3
SUMMARY_COLUMNS = ["map_id", "body", "verdict", "tau_hat", "D_upper", "delta_hat", "gv_gap",
                   "single_face", "runtime_ms"]


# ---------------------------------------------------------------------------
# serialization

def fmt17(x) -> str:
    """Decimal with 17 significant digits (round-trips any double)."""
    return format(float(x), ".17g")


def _encode(obj, indent, level):
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if obj is None or isinstance(obj, (bool, np.bool_)):
        return json.dumps(None if obj is None else bool(obj))
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        # JSON has no inf/nan; non-finite values become null.
        return fmt17(obj) if math.isfinite(obj) else "null"
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_encode(v, indent, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple, set, frozenset)):
        seq = sorted(obj) if isinstance(obj, (set, frozenset)) else obj
        if not seq:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in seq):
            return "[" + ", ".join(_encode(v, indent, level + 1) for v in seq) + "]"
        return "[\n" + ",\n".join(pad + _encode(v, indent, level + 1) for v in seq) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps17(obj, indent: int = 2) -> str:
    return _encode(obj, indent, 0) + "\n"


def orbit_csv(orbit) -> str:
    N = orbit.points.shape[1]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n"] + [f"coord_{i}" for i in range(N)] + ["displacement", "from_start"])
    disp = np.concatenate([[0.0], orbit.displacements])
    for n, p in enumerate(orbit.points):
        w.writerow([n] + [fmt17(v) for v in p] + [fmt17(disp[n]), fmt17(orbit.from_start[n])])
    return buf.getvalue()


def _outline(body, samples: int = 180) -> np.ndarray:
    B = body.affine_basis()
    c = body.witness
    if B.shape[0] == 1:
        return np.array([boundary_point(body, c, c + B[0]), boundary_point(body, c, c - B[0])])
    verts = getattr(body, "vertices", None)
    if verts is not None and len(verts) >= 3:
        ang = np.arctan2(verts[:, 1] - c[1], verts[:, 0] - c[0])
        return verts[np.argsort(ang)]
    th = 2 * np.pi * np.arange(samples) / samples
    return np.array([boundary_point(body, c, c + np.array([np.cos(t), np.sin(t)])) for t in th])


def orbit_svg(body, orbit, report: dict, size: int = 480) -> str:
    outline = _outline(body)
    pts = np.vstack([outline, orbit.points])
    lo, hi = pts.min(axis=0), pts.max(axis=0)
    span = float(max(hi - lo)) or 1.0
    margin = 20

    def xy(p):
        u = margin + (p[0] - lo[0]) / span * (size - 2 * margin)
        v = size - margin - (p[1] - lo[1]) / span * (size - 2 * margin)
        return f"{u:.3f},{v:.3f}"

    closed = "polygon" if len(outline) > 2 else "polyline"
    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
             f'viewBox="0 0 {size} {size}">',
             f'<rect width="{size}" height="{size}" fill="white"/>',
             f'<{closed} points="{" ".join(xy(p) for p in outline)}" fill="none" stroke="black"/>',
             f'<polyline points="{" ".join(xy(p) for p in orbit.points)}" fill="none" '
             'stroke="steelblue" stroke-width="0.8"/>']
    parts += [f'<circle cx="{xy(p).split(",")[0]}" cy="{xy(p).split(",")[1]}" r="1.8" fill="steelblue"/>'
              for p in orbit.points]
    for c in report.get("clusters") or []:
        u, v = xy(c).split(",")
        parts.append(f'<circle cx="{u}" cy="{v}" r="5" fill="none" stroke="crimson" stroke-width="1.5"/>')
    if report.get("star_witness") is not None:
        u, v = xy(report["star_witness"]).split(",")
        parts.append(f'<rect x="{float(u) - 4:.3f}" y="{float(v) - 4:.3f}" width="8" height="8" '
                     'fill="none" stroke="darkorange" stroke-width="1.5"/>')
    parts.append(f'<text x="{margin}" y="14" font-size="11" font-family="monospace">'
                 f'{report["orbit"]["map_id"]}: {report["verdict"]}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


# ---------------------------------------------------------------------------
# run / sweep

def _config_digest(raw: dict) -> str:
    return hashlib.sha256(json.dumps(raw, sort_keys=True).encode()).hexdigest()


def execute(cfg: ExperimentConfig, out_dir) -> dict:
    """Run one experiment and write its outputs. Returns the report dict."""
    rep = conjecture_report(cfg.map, cfg.body, cfg.start, cfg.report)
    doc = report_to_dict(rep, {"config_sha256": _config_digest(cfg.raw), "version": __version__,
                               "map_id": cfg.map_id, "body": cfg.body_name,
                               "backend": "numba" if USE_NUMBA else "numpy"})
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if cfg.emit.get("csv", True):
        (out / "orbit.csv").write_text(orbit_csv(rep.orbit))
    if cfg.emit.get("json", True):
        (out / "report.json").write_text(dumps17(doc))
    if cfg.emit.get("svg", True) and cfg.body.dim == 2:
        try:
            (out / "orbit.svg").write_text(orbit_svg(cfg.body, rep.orbit, doc))
        except Exception as exc:  # the picture never changes the outcome
            print(f"warning: svg not written: {exc}", file=sys.stderr)
    return doc


def cmd_run(args) -> int:
    try:
        cfg = load_config(args.config)
    except ConfigInvalid as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except HilbertDynError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    try:
        doc = execute(cfg, args.out or cfg.output_dir or ".")
    except HilbertDynError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    print(f"{cfg.map_id}: {doc['verdict']}")
    return EXIT_OK


def _sweep_one(job):
    name, raw, out_dir = job
    t0 = time.perf_counter()
    row = {"map_id": str(raw.get("map_id", name)) if isinstance(raw, dict) else name,
           "body": str(raw.get("body_name", "")) if isinstance(raw, dict) else ""}
    try:
        cfg = parse_config(raw)
        doc = execute(cfg, out_dir)
        est = doc["estimates"]
        row.update(map_id=cfg.map_id, body=cfg.body_name, verdict=doc["verdict"],
                   tau_hat=fmt17(est["tau_hat"]), D_upper=fmt17(est["D_upper"]),
                   delta_hat=fmt17(est["delta_hat"]),
                   gv_gap="" if doc["gv"] is None else fmt17(doc["gv"]["d_tau_gap"]),
                   single_face=str(doc["single_face"]).lower(), error="")
    except Exception as exc:
        row.update(verdict="Error", error=f"{type(exc).__name__}: {exc}")
    row["runtime_ms"] = f"{(time.perf_counter() - t0) * 1000:.1f}"
    return name, row


def max_workers(n_jobs: int) -> int:
    env = os.environ.get("HILBERT_DYN_THREADS")
    cap = os.cpu_count() or 1
    if env:
        try:
            cap = max(1, int(env))
        except ValueError:
            pass
    return max(1, min(cap, n_jobs))


def sweep(jobs: list, out_dir) -> list:
    """Run (name, raw_config) jobs, each into ``out_dir/name``; returns rows in job order."""
    out = Path(out_dir)
    tasks = [(name, raw, str(out / name)) for name, raw in jobs]
    workers = max_workers(len(tasks))
    if workers == 1:
        results = [_sweep_one(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_sweep_one, tasks))
    return [row for _, row in results]


def write_summary(rows: list, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, SUMMARY_COLUMNS, extrasaction="ignore", lineterminator="\n")
        w.writeheader()
        w.writerows(rows)


def cmd_sweep(args) -> int:
    jobs = []
    if args.suite:
        for raw in SUITES[args.suite](args.seed):
            jobs.append((raw["map_id"], raw))
    if args.dir:
        d = Path(args.dir)
        if not d.is_dir():
            print(f"config error: {d} is not a directory", file=sys.stderr)
            return EXIT_CONFIG
        for p in sorted(d.glob("*.json")):
            try:
                jobs.append((p.stem, json.loads(p.read_text())))
            except (OSError, json.JSONDecodeError) as exc:
                jobs.append((p.stem, {"_unreadable": str(exc)}))
    if not jobs:
        print("config error: no configs to sweep", file=sys.stderr)
        return EXIT_CONFIG
    Path(args.out).mkdir(parents=True, exist_ok=True)
    rows = sweep(jobs, args.out)
    write_summary(rows, Path(args.out) / "summary.csv")
    for row in rows:
        if row["verdict"] == "Error":
            print(f"{row['map_id']}: {row['error']}", file=sys.stderr)
    ok = sum(r["verdict"] != "Error" for r in rows)
    print(f"{ok}/{len(rows)} runs succeeded; summary at {Path(args.out) / 'summary.csv'}")
    return EXIT_OK if ok else EXIT_RUNTIME


# ---------------------------------------------------------------------------
# metric / validate

def _parse_point(text: str) -> np.ndarray:
    p = Path(text)
    if p.is_file():
        text = p.read_text()
    vals = [v for v in text.replace("\n", ",").split(",") if v.strip()]
    try:
        return np.array([float(v) for v in vals])
    except ValueError as exc:
        raise ConfigInvalid(f"bad point {text!r}") from exc


def cmd_metric(args) -> int:
    try:
        raw = json.loads(Path(args.body).read_text())
        body = build_body(raw["body"] if "body" in raw else raw)
        x, y = _parse_point(args.x), _parse_point(args.y)
        conv = MetricConvention.parse(args.scale)
    except ConfigInvalid as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (OSError, ValueError, KeyError, TypeError) as exc:
        print(f"config error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except HilbertDynError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    try:
        d = hilbert_distance(body, x, y, conv)
    except HilbertDynError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    print(format(d, ".12g"))
    return EXIT_OK


def cmd_validate(args) -> int:
    results = run_all(args.seed, inject_scale_mismatch=args.inject_scale_mismatch)
    for r in results:
        print(r.line())
    failed = [r.name for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} suites passed")
    return EXIT_VALIDATION if failed else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hilbert-dyn", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run one experiment config")
    p.add_argument("--config", required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("sweep", help="run every *.json config in a directory (or a built-in suite)")
    p.add_argument("--dir", default=None)
    p.add_argument("--suite", choices=sorted(SUITES), default=None)
    p.add_argument("--seed", type=int, default=0, help="seed for --suite generation")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("metric", help="Hilbert distance between two points")
    p.add_argument("--body", required=True, help="JSON file with a body spec (or a config with 'body')")
    p.add_argument("--x", required=True, help="comma-separated coordinates or a file holding them")
    p.add_argument("--y", required=True)
    p.add_argument("--scale", choices=["half", "one"], default="one")
    p.set_defaults(func=cmd_metric)

    p = sub.add_parser("validate", help="run the built-in oracle suite")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--inject-scale-mismatch", action="store_true",
                   help="negative control: compare scale-1/2 chords against the scale-1 closed form")
    p.set_defaults(func=cmd_validate)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigInvalid as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except HilbertDynError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
