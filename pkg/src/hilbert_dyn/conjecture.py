"""Limit sets of escaping orbits, the closed face containing them, star
witnesses, and the per-run verdict."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.cluster.hierarchy import fcluster, linkage

from .dynamics import (
    DriftEstimates,
    GVGap,
    Orbit,
    OrbitClassification,
    StopReason,
    classify_orbit,
    drift_estimates,
    gv_gap,
    is_monotone_escape,
    iterate,
    near_monotone_stats,
)
from .errors import HilbertDynError, NotEscaping, NotOnBoundary, Unbounded
from .geometry import (
    ConvexBody,
    ExposedPoint,
    Location,
    PolytopeFace,
    boundary_point,
    contains,
    face_contains,
    segment_in_boundary,
)
from .horo import DEFAULT_EPSILONS, fixed_point_certificate, karlsson_certificate
from .maps import Semicontraction, banach_fixed_point, beardon_approximant, certify_nonexpansive
from .metric import ONE, MetricConvention, hilbert_distances

VERDICTS = ("FixedPoint", "SingleFace", "StarOnly", "Inconclusive")


@dataclass(frozen=True)
class ReportConfig:
    conv: MetricConvention = ONE
    max_iter: int = 200
    seed: int = 0
    tail_fraction: float = 0.25
    cluster_tol: float = 1e-4
    face_tol: float = 1e-6
    boundary_tol: float = 1e-9
    chain_tol: float = 1e-6
    gv_tol: float = 1e-2
    probes: int = 400
    epsilons: tuple = DEFAULT_EPSILONS
    beardon_ks: tuple = (9, 99, 999)
    beardon_pairs: int = 200
    beardon_max_steps: int = 100_000
    segment_samples: int = 33
    perturbation: float = 1e-2

    def tolerances(self) -> dict:
        return {"boundary": self.boundary_tol, "cluster": self.cluster_tol, "face": self.face_tol,
                "chain": self.chain_tol, "gv": self.gv_tol}


# -- limit sets and faces ---------------------------------------------------

def limit_set(orbit: Orbit, body: ConvexBody, tail_fraction: float = 0.25,
              cluster_tol: float = 1e-4) -> list:
    """Single-linkage clusters of the orbit tail, projected to the boundary
    along the ray from the body's interior witness through each cluster mean."""
    if not 0 < tail_fraction <= 1:
        raise ValueError("tail_fraction must lie in (0, 1]")
    if not classify_orbit(orbit, body).escaping:
        raise NotEscaping("limit sets are computed for escaping orbits only")
    q = max(1, math.ceil(tail_fraction * len(orbit)))
    tail = orbit.points[-q:]
    if len(tail) == 1:
        labels = np.array([1])
    else:
        labels = fcluster(linkage(tail, method="single"), t=cluster_tol, criterion="distance")
    reps = []
    seen = []
    for lab in labels:
        if lab in seen:
            continue
        seen.append(lab)
        mean = tail[labels == lab].mean(axis=0)
        reps.append(boundary_point(body, body.witness, mean))
    return reps


def attractor_face(clusters, body: ConvexBody, tol: float = 1e-6):
    """(face, single_face). Polytopes intersect active sets; strictly convex
    and intersection bodies accept exactly one cluster."""
    if not clusters:
        raise ValueError("clusters must be nonempty")
    for c in clusters:
        if contains(body, c, tol) is not Location.BOUNDARY:
            raise NotOnBoundary(f"cluster {c} is not on the boundary")
    if hasattr(body, "active_set"):
        common = frozenset.intersection(*(body.active_set(c, tol) for c in clusters))
        if not common:
            return None, False
        face = PolytopeFace(common, body.face_vertices(common))
        return face, all(face_contains(body, face, c, tol) for c in clusters)
    if len(clusters) == 1:
        return ExposedPoint(np.array(clusters[0])), True
    return None, False


def star_witness(clusters, body: ConvexBody, tol: float = 1e-6, samples: int = 33):
    """First boundary point z whose segments to every cluster lie in the boundary."""
    cands = [np.asarray(c, dtype=np.float64) for c in clusters]
    if hasattr(body, "active_set"):
        for c in clusters:
            for i in sorted(body.active_set(c, tol)):
                cands.extend(body.face_vertices(frozenset([i])))
    for z in cands:
        try:
            if all(segment_in_boundary(body, z, w, tol, samples) for w in clusters):
                return z
        except NotOnBoundary:
            continue
    return None


def faces_match(f1, f2, tol: float = 1e-3) -> bool:
    if f1 is None or f2 is None:
        return f1 is None and f2 is None
    if isinstance(f1, PolytopeFace) and isinstance(f2, PolytopeFace):
        return f1.active == f2.active
    if isinstance(f1, ExposedPoint) and isinstance(f2, ExposedPoint):
        return bool(np.linalg.norm(f1.p - f2.p) <= tol)
    return False


# -- report -----------------------------------------------------------------

@dataclass(eq=False)
class LimitSetReport:
    clusters: list
    face: object
    single_face: bool
    star_witness: Optional[np.ndarray]
    beardon_point: Optional[np.ndarray]
    verdict: str
    gromov_sup: float


@dataclass(eq=False)
class ConjectureReport:
    limit: LimitSetReport
    orbit: Orbit
    classification: OrbitClassification
    estimates: DriftEstimates
    certificate_slack: Optional[float]
    gv: Optional[GVGap]
    monotone_escape: bool
    perturbed_start: np.ndarray
    perturbed_classification: OrbitClassification
    perturbed_face: object
    faces_coincide: bool
    beardon_trace: list = field(default_factory=list)
    notes: list = field(default_factory=list)
    config: ReportConfig = field(default_factory=ReportConfig)

    @property
    def verdict(self) -> str:
        return self.limit.verdict


def perturbed_start(body: ConvexBody, x0, size: float, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    B = body.affine_basis()
    u = rng.standard_normal(B.shape[0]) @ B
    u /= np.linalg.norm(u)
    step = size
    for _ in range(60):
        x1 = x0 + step * u
        if body.slack(x1) > 1e-6 and body.affine_residual(x1)[0] <= 1e-12:
            return x1
        step /= 2
    return x0.copy()


def gromov_sup(body: ConvexBody, tail_x, tail_z, basepoint, conv: MetricConvention) -> float:
    """max_k (x_k, z_k)_basepoint over index-aligned tail points."""
    n = min(len(tail_x), len(tail_z))
    if n == 0:
        return 0.0
    X, Z = tail_x[-n:], tail_z[-n:]
    B = np.broadcast_to(basepoint, X.shape)
    vals = 0.5 * (hilbert_distances(body, X, B, conv) + hilbert_distances(body, Z, B, conv)
                  - hilbert_distances(body, X, Z, conv))
    return float(vals.max())


def beardon_points(m: Semicontraction, body: ConvexBody, x0, cfg: ReportConfig):
    """Fixed points y_k of certified approximants, one trace entry per k."""
    trace = []
    for k in cfg.beardon_ks:
        fk = beardon_approximant(m, x0, k)
        entry = {"k": int(k)}
        try:
            cert = certify_nonexpansive(fk, body, cfg.beardon_pairs, cfg.seed, cfg.conv)
        except HilbertDynError as exc:
            entry.update(certified=False, error=type(exc).__name__)
            trace.append(entry)
            continue
        entry["max_ratio"] = cert.max_ratio
        entry["certified"] = cert.max_ratio < 1.0
        if entry["certified"]:
            y, steps, ok = banach_fixed_point(fk, x0, 1e-12, cfg.beardon_max_steps)
            entry.update(point=y, steps=steps, converged=ok)
        trace.append(entry)
    pts = [e["point"] for e in trace if e.get("converged")]
    point = None
    if len(pts) >= 2:
        if np.linalg.norm(pts[-1] - pts[-2]) <= 1e-3:
            point = pts[-1]
        else:
            # y_k -> boundary at rate ~1/k; their radial boundary projections
            # converge to the same limit much faster.
            proj = [boundary_point(body, body.witness, p) for p in pts[-2:]
                    if np.linalg.norm(p - body.witness) > 0]
            if len(proj) == 2 and np.linalg.norm(proj[1] - proj[0]) <= 1e-3:
                point = proj[1]
    return point, trace


def probe_bounded(body: ConvexBody, x0, seed: int = 0, directions: int = 16) -> None:
    """Chord queries through x0 along the affine basis and seeded random
    directions; raises Unbounded if any of them is open-ended."""
    B = body.affine_basis()
    rng = np.random.default_rng(seed)
    D = np.vstack([B, rng.standard_normal((directions, B.shape[0])) @ B])
    for d in D:
        t_min, t_max = body.line_interval(x0, d)
        if not (np.isfinite(t_min) and np.isfinite(t_max)):
            raise Unbounded(f"chord through {x0.tolist()} along {d.tolist()} never leaves the body")


def conjecture_report(m: Semicontraction, body: ConvexBody, x0=None,
                      config: Optional[ReportConfig] = None) -> ConjectureReport:
    cfg = config or ReportConfig()
    conv = cfg.conv
    x0 = body.witness.copy() if x0 is None else body.check_point(x0)
    notes = []
    probe_bounded(body, x0, cfg.seed)

    orbit = iterate(m, x0, body, cfg.max_iter, conv)
    cls = classify_orbit(orbit, body)
    est = drift_estimates(orbit, m, body, cfg.probes, cfg.seed)

    clusters, face, single, star, cert, beardon, trace = [], None, False, None, None, None, []
    if cls.escaping:
        clusters = limit_set(orbit, body, cfg.tail_fraction, cfg.cluster_tol)
        face, single = attractor_face(clusters, body, cfg.face_tol)
        star = star_witness(clusters, body, cfg.face_tol, cfg.segment_samples)
        try:
            cert = karlsson_certificate(orbit, body, cfg.epsilons)
        except HilbertDynError as exc:
            notes.append(f"certificate unavailable: {type(exc).__name__}: {exc}")
        beardon, trace = beardon_points(m, body, x0, cfg)
        if est.delta_hat < 1e-6:
            notes.append("escaping with delta_hat < 1e-6 (liminf displacement zero case)")
    elif cls.bounded:
        cert = fixed_point_certificate(orbit, body)
    gv = gv_gap(est, cert, orbit, cfg.gv_tol) if cert is not None else None

    x1 = perturbed_start(body, x0, cfg.perturbation, cfg.seed)
    orbit2 = iterate(m, x1, body, cfg.max_iter, conv)
    cls2 = classify_orbit(orbit2, body)
    face2 = None
    if cls2.escaping:
        face2, _ = attractor_face(limit_set(orbit2, body, cfg.tail_fraction, cfg.cluster_tol),
                                  body, cfg.face_tol)
    if cls.escaping or cls2.escaping:
        coincide = cls.kind == cls2.kind and faces_match(face, face2, 10 * cfg.cluster_tol)
    else:
        coincide = True  # no boundary limit from either start
    q = max(1, math.ceil(cfg.tail_fraction * min(len(orbit), len(orbit2))))
    gsup = gromov_sup(body, orbit.points[-q:], orbit2.points[-q:], x0, conv)

    if cls.bounded and orbit.stop_reason is StopReason.CONVERGED:
        verdict = "FixedPoint"
        clusters = [orbit.points[-1]]
    elif cls.escaping and single:
        verdict = "SingleFace"
    elif cls.escaping and star is not None:
        verdict = "StarOnly"
    else:
        verdict = "Inconclusive"
        if cls.escaping and beardon is None:
            notes.append("Beardon point did not converge; star/face tie left unresolved")
        elif not cls.escaping:
            notes.append(f"orbit {cls.kind}: {cls.note or 'bounded without convergence'}")

    limit = LimitSetReport(clusters, face, single, star, beardon, verdict, gsup)
    return ConjectureReport(limit, orbit, cls, est, None if cert is None else cert.slack, gv,
                            is_monotone_escape(orbit, body), x1, cls2, face2, coincide, trace,
                            notes, cfg)


def report_to_dict(rep: ConjectureReport, provenance: Optional[dict] = None) -> dict:
    lim = rep.limit
    est = rep.estimates

    def vec(p):
        return None if p is None else [float(v) for v in p]

    def face(f):
        return None if f is None else f.to_dict()

    out = {
        "verdict": lim.verdict,
        "clusters": [vec(c) for c in lim.clusters],
        "face": face(lim.face),
        "single_face": bool(lim.single_face),
        "star_witness": vec(lim.star_witness),
        "beardon_point": vec(lim.beardon_point),
        "gromov_sup": lim.gromov_sup,
        "classification": {"kind": rep.classification.kind, "radius": rep.classification.radius,
                           "min_boundary_gap": rep.classification.min_boundary_gap},
        "estimates": {"tau_hat": est.tau_hat, "tau_upper": est.tau_upper,
                      "delta_hat": est.delta_hat, "D_upper": est.D_upper, "window": est.window},
        "chain_holds": bool(0 <= est.tau_hat <= est.D_upper + rep.config.chain_tol
                            and est.D_upper <= est.delta_hat + rep.config.chain_tol),
        "certificate_slack": rep.certificate_slack,
        "gv": None if rep.gv is None else {"d_tau_gap": rep.gv.d_tau_gap,
                                           "horo_payoff": rep.gv.horo_payoff,
                                           "witnesses_max": bool(rep.gv.witnesses_max)},
        "monotone_escape": bool(rep.monotone_escape),
        "near_monotone": near_monotone_stats(rep.orbit),
        "orbit": {"points": len(rep.orbit), "stop_reason": rep.orbit.stop_reason.value,
                  "map_id": rep.orbit.map_id},
        "perturbed": {"start": vec(rep.perturbed_start), "classification": rep.perturbed_classification.kind,
                      "face": face(rep.perturbed_face), "faces_coincide": bool(rep.faces_coincide)},
        "beardon_trace": [{k: (vec(v) if k == "point" else v) for k, v in e.items()}
                          for e in rep.beardon_trace],
        "notes": list(rep.notes),
        "provenance": {"seed": rep.config.seed, "max_iter": rep.config.max_iter,
                       "iterations": rep.orbit.steps, "scale": rep.config.conv.scale,
                       "probes": rep.config.probes, "segment_samples": rep.config.segment_samples,
                       "tolerances": rep.config.tolerances()},
    }
    if lim.beardon_point is not None and lim.clusters:
        out["beardon_cluster_gap"] = float(min(np.linalg.norm(lim.beardon_point - c) for c in lim.clusters))
    if provenance:
        out["provenance"].update(provenance)
    return out
