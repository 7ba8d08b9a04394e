"""JSON experiment configs -> bodies, maps and report settings."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .conjecture import ReportConfig
from .errors import ConfigInvalid, Unbounded
from .geometry import ConvexBody, Ellipsoid, HPolytope, Intersection, StandardSimplex
from .maps import Composition, Identity, KleinProjective, ProjectiveLinear, Semicontraction, Topical
from .metric import MetricConvention

DEFAULT_EMIT = {"csv": True, "json": True, "svg": True}


@dataclass
class ExperimentConfig:
    body: ConvexBody
    map: Semicontraction
    start: Optional[np.ndarray]
    report: ReportConfig
    emit: dict = field(default_factory=lambda: dict(DEFAULT_EMIT))
    map_id: str = "map"
    body_name: str = "body"
    output_dir: Optional[str] = None
    raw: dict = field(default_factory=dict)


def _req(d, key, where):
    if key not in d:
        raise ConfigInvalid(f"{where}: missing '{key}'")
    return d[key]


def build_body(spec) -> ConvexBody:
    if not isinstance(spec, dict):
        raise ConfigInvalid("body must be an object")
    kind = str(_req(spec, "type", "body")).lower()
    if kind == "hpolytope":
        return HPolytope(_req(spec, "normals", "hpolytope"), _req(spec, "offsets", "hpolytope"),
                         witness=spec.get("witness"))
    if kind == "ellipsoid":
        return Ellipsoid(_req(spec, "center", "ellipsoid"), _req(spec, "shape", "ellipsoid"))
    if kind == "simplex":
        return StandardSimplex(_req(spec, "n", "simplex"))
    if kind == "intersection":
        return Intersection([build_body(p) for p in _req(spec, "parts", "intersection")],
                            witness=spec.get("witness"))
    raise ConfigInvalid(f"unknown body type {kind!r}")


def build_map(spec, body: ConvexBody, map_id: Optional[str] = None) -> Semicontraction:
    if not isinstance(spec, dict):
        raise ConfigInvalid("map must be an object")
    kind = str(_req(spec, "type", "map")).lower()
    mid = map_id or spec.get("id") or kind
    if kind == "identity":
        return Identity(body.dim, map_id=mid)
    if kind == "projective_linear":
        return ProjectiveLinear(_req(spec, "matrix", "projective_linear"), map_id=mid)
    if kind == "topical":
        return Topical(_req(spec, "coefficients", "topical"), _req(spec, "ops", "topical"), map_id=mid)
    if kind == "klein_projective":
        return KleinProjective(_req(spec, "matrix", "klein_projective"), body, map_id=mid)
    if kind == "composition":
        parts = [build_map(p, body) for p in _req(spec, "maps", "composition")]
        return Composition(parts, map_id=mid)
    raise ConfigInvalid(f"unknown map type {kind!r}")


def parse_config(raw: dict) -> ExperimentConfig:
    """Validate a config document. Geometry/map construction failures that are
    detectable up front (bad shapes, non-SPD, empty interior) are config errors."""
    if not isinstance(raw, dict):
        raise ConfigInvalid("config must be a JSON object")
    try:
        body = build_body(_req(raw, "body", "config"))
        map_id = str(raw.get("map_id", raw.get("map", {}).get("id", "map")))
        m = build_map(_req(raw, "map", "config"), body, map_id)
        if getattr(m, "dim", None) not in (None, body.dim):
            raise ConfigInvalid(f"map dimension {m.dim} does not match body dimension {body.dim}")
        start = raw.get("start")
        if start is not None:
            start = body.check_point(start)
        tol = raw.get("tolerances", {}) or {}
        defaults = ReportConfig()
        report = ReportConfig(
            conv=MetricConvention.parse(raw.get("scale", 1)),
            max_iter=int(raw.get("max_iter", defaults.max_iter)),
            seed=int(raw.get("seed", defaults.seed)),
            tail_fraction=float(raw.get("tail_fraction", defaults.tail_fraction)),
            cluster_tol=float(tol.get("cluster", defaults.cluster_tol)),
            face_tol=float(tol.get("face", defaults.face_tol)),
            boundary_tol=float(tol.get("boundary", defaults.boundary_tol)),
            chain_tol=float(tol.get("chain", defaults.chain_tol)),
            gv_tol=float(tol.get("gv", defaults.gv_tol)),
            probes=int(raw.get("probes", defaults.probes)),
        )
    except (ConfigInvalid, Unbounded):
        raise
    except Exception as exc:  # malformed numbers, shapes, etc.
        raise ConfigInvalid(f"{type(exc).__name__}: {exc}") from exc
    if report.max_iter < 1:
        raise ConfigInvalid("max_iter must be >= 1")
    emit = dict(DEFAULT_EMIT)
    emit.update({k: bool(v) for k, v in (raw.get("emit") or {}).items()})
    return ExperimentConfig(body, m, start, report, emit, map_id,
                            str(raw.get("body_name", raw["body"].get("type"))),
                            raw.get("output_dir"), raw)


def load_config(path) -> ExperimentConfig:
    try:
        raw = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigInvalid(f"cannot read config {path}: {exc}") from exc
    return parse_config(raw)
