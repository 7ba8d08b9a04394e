"""Orbits of semicontractions and their asymptotic numbers.

For an orbit x_k = f^k(x) with a_k = d(x, x_k):

* translation number tau  = lim a_n / n = inf_m a_m / m   (subadditivity)
* step displacement delta = lim d(x_n, x_{n+1})           (nonincreasing)
* minimal displacement D  = inf_p d(p, f(p))

and 0 <= tau <= D <= delta.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import HilbertDynError, MapLeftDomain, MissingCertificate, OrbitTooShort
from .geometry import DEFAULT_TOL, ConvexBody, sample_interior
from .maps import Semicontraction
from .metric import ONE, MetricConvention, hilbert_distance, hilbert_distances

CONVERGED_TOL = 1e-14
MIN_ORBIT = 8
GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0


class StopReason(enum.Enum):
    MAX_ITER = "MaxIter"
    BOUNDARY_PROXIMITY = "BoundaryProximity"
    CONVERGED = "Converged"


@dataclass(eq=False)
class Orbit:
    points: np.ndarray
    displacements: np.ndarray
    from_start: np.ndarray
    map_id: str
    stop_reason: StopReason
    conv: MetricConvention = ONE

    def __len__(self):
        return len(self.points)

    @property
    def steps(self) -> int:
        return len(self.points) - 1


def iterate(m: Semicontraction, x0, body: ConvexBody, max_iter: int = 200,
            conv: MetricConvention = ONE) -> Orbit:
    x0 = body.check_point(x0)
    if body.slack(x0) <= DEFAULT_TOL:
        raise MapLeftDomain("start point is not interior")
    pts = [x0]
    disp = []
    fs = [0.0]
    stop = StopReason.MAX_ITER
    x = x0
    for _ in range(max_iter):
        y = m.apply(x)
        s = body.slack(y)
        if s < -DEFAULT_TOL or body.affine_residual(y)[0] > DEFAULT_TOL:
            raise MapLeftDomain(f"iterate {len(pts)} left the domain: {y}")
        if s <= 0:
            stop = StopReason.BOUNDARY_PROXIMITY
            break
        d = hilbert_distances(body, np.vstack([x, x0]), np.vstack([y, y]), conv)
        pts.append(y)
        disp.append(d[0])
        fs.append(d[1])
        x = y
        if s < body.proximity_threshold:
            stop = StopReason.BOUNDARY_PROXIMITY
            break
        if d[0] < CONVERGED_TOL:
            stop = StopReason.CONVERGED
            break
    return Orbit(np.array(pts), np.array(disp), np.array(fs), m.map_id, stop, conv)


# -- estimates --------------------------------------------------------------

@dataclass(frozen=True)
class DriftEstimates:
    tau_hat: float
    tau_upper: float
    delta_hat: float
    D_upper: float
    window: int
    D_argmin: Optional[np.ndarray] = field(default=None, repr=False, compare=False)


def _check_length(orbit: Orbit):
    if len(orbit) < MIN_ORBIT and orbit.stop_reason is not StopReason.CONVERGED:
        raise OrbitTooShort(f"orbit has {len(orbit)} points, need {MIN_ORBIT}")


def tau_bounds(orbit: Orbit):
    """(tau_hat, tau_upper, window).

    tau_hat is the least-squares slope of a_n over the last half of the orbit,
    clipped to [0, min_m a_m/m] where the true limit must lie.
    """
    a = orbit.from_start
    n = len(a) - 1
    if n == 0:
        return 0.0, 0.0, 0
    tau_upper = float(np.min(a[1:] / np.arange(1, n + 1)))
    if orbit.stop_reason is StopReason.CONVERGED:
        # a_m stays constant past the end, so inf_m a_m / m = 0.
        tau_upper = 0.0
    lo = n // 2
    idx = np.arange(lo, n + 1)
    slope = float(np.polyfit(idx, a[lo:], 1)[0]) if idx.size >= 2 else 0.0
    return min(max(slope, 0.0), tau_upper), tau_upper, int(idx.size)


def _golden_min(g, lo, hi, evals):
    a, b = lo, hi
    c = b - GOLDEN * (b - a)
    d = a + GOLDEN * (b - a)
    gc, gd = g(c), g(d)
    best = min((gc, c), (gd, d))
    for _ in range(max(evals - 2, 0)):
        if gc < gd:
            b, d, gd = d, c, gc
            c = b - GOLDEN * (b - a)
            gc = g(c)
            best = min(best, (gc, c))
        else:
            a, c, gc = c, d, gd
            d = a + GOLDEN * (b - a)
            gd = g(d)
            best = min(best, (gd, d))
    return best


def minimal_displacement_search(m: Semicontraction, body: ConvexBody, seeds, budget: int,
                                conv: MetricConvention = ONE, line_evals: int = 10):
    """Coordinate-wise golden-section descent on p -> d(p, f(p)).

    Returns (best value, best point, evaluations used). Every returned value is
    an honest upper bound for the minimal displacement.
    """
    used = 0

    def g(p):
        nonlocal used
        used += 1
        try:
            if body.slack(p) <= 0:
                return np.inf
            return hilbert_distance(body, p, m.apply(p), conv)
        except (HilbertDynError, FloatingPointError):
            return np.inf

    basis = body.affine_basis()
    basis = basis / np.linalg.norm(basis, axis=1)[:, None]
    best_val, best_pt = np.inf, None
    seeds = list(seeds)
    per_seed = max(budget // max(len(seeds), 1), line_evals + 1)
    for p in seeds:
        p = np.array(p, dtype=np.float64)
        val = g(p)
        start = used
        while used - start + line_evals <= per_seed and used + line_evals <= budget:
            improved = False
            for u in basis:
                if used - start + line_evals > per_seed:
                    break
                t_lo, t_hi = body.line_interval(p, u)
                if not (np.isfinite(t_lo) and np.isfinite(t_hi)):
                    break
                cand_val, t = _golden_min(lambda s: g(p + s * u), 0.5 * t_lo, 0.5 * t_hi, line_evals)
                if cand_val < val:
                    val, p = cand_val, p + t * u
                    improved = True
            if not improved:
                break
        if val < best_val:
            best_val, best_pt = val, p
        if used >= budget:
            break
    return best_val, best_pt, used


def drift_estimates(orbit: Orbit, m: Semicontraction, body: ConvexBody, probes: int = 400,
                    seed: int = 0, restarts: int = 8) -> DriftEstimates:
    _check_length(orbit)
    tau_hat, tau_upper, window = tau_bounds(orbit)
    delta_hat = float(orbit.displacements[-1]) if orbit.steps else 0.0
    # Orbit points are free probes: d(x_k, f(x_k)) is already cached.
    if orbit.steps:
        k = int(np.argmin(orbit.displacements))
        D_upper, D_pt = float(orbit.displacements[k]), orbit.points[k]
    else:
        D_upper, D_pt = 0.0, orbit.points[0]
    if D_upper > 0 and probes > 0:
        rng = np.random.default_rng(seed)
        tail = orbit.points[max(0, orbit.steps - 2): orbit.steps]
        seeds = [*tail[::-1], *sample_interior(body, restarts, rng, margin=0.05)]
        val, pt, _ = minimal_displacement_search(m, body, seeds, probes, orbit.conv)
        if val < D_upper:
            D_upper, D_pt = float(val), pt
    return DriftEstimates(tau_hat, tau_upper, delta_hat, D_upper, window, D_pt)


# -- classification ---------------------------------------------------------

@dataclass(frozen=True)
class OrbitClassification:
    kind: str  # "Bounded" | "Escaping" | "Undetermined"
    radius: Optional[float] = None
    min_boundary_gap: Optional[float] = None
    note: str = ""

    @property
    def bounded(self):
        return self.kind == "Bounded"

    @property
    def escaping(self):
        return self.kind == "Escaping"


def classify_orbit(orbit: Orbit, body: ConvexBody) -> OrbitClassification:
    a = orbit.from_start
    if orbit.stop_reason is StopReason.CONVERGED:
        return OrbitClassification("Bounded", radius=float(a.max()))
    if len(orbit) < MIN_ORBIT:
        return OrbitClassification("Undetermined", note="orbit too short; run longer")
    q = max(len(a) // 4, 2)
    gap = float(np.min(body.slack(orbit.points[-q:])))
    tail = a[-q:]
    if gap < 1e-6 and np.all(np.diff(tail) > -1e-12) and tail[-1] > tail[0]:
        return OrbitClassification("Escaping", min_boundary_gap=gap)
    half = len(a) // 2
    if a[half:].max() <= a[:half].max() + 1e-9:
        return OrbitClassification("Bounded", radius=float(a.max()))
    return OrbitClassification("Undetermined", note="neither bounded nor escaping yet; run longer")


def is_monotone_escape(orbit: Orbit, body: ConvexBody) -> bool:
    if len(orbit) < 2:
        return False
    if not np.all(np.diff(orbit.from_start) >= -1e-12):
        return False
    return classify_orbit(orbit, body).escaping


def near_monotone_stats(orbit: Orbit) -> dict:
    """Largest drop of a_n and the fraction of decreasing steps (reported only)."""
    diffs = np.diff(orbit.from_start)
    if diffs.size == 0:
        return {"max_drop": 0.0, "decreasing_fraction": 0.0}
    return {"max_drop": float(max(0.0, -diffs.min())),
            "decreasing_fraction": float(np.mean(diffs < -1e-12))}


# -- Gaubert-Vigeral check --------------------------------------------------

@dataclass(frozen=True)
class GVGap:
    d_tau_gap: float
    horo_payoff: float
    witnesses_max: bool


def gv_gap(estimates: DriftEstimates, certificate, orbit: Orbit, tol: float = 1e-2) -> GVGap:
    """|D - tau| and inf over the orbit tail of h(x) - h(f x) for the
    certificate horofunction h."""
    if certificate is None:
        raise MissingCertificate("gv_gap needs a horofunction certificate")
    K = min(certificate.check_range, orbit.steps)
    lo = K // 2
    if K - lo >= 1:
        hv = certificate.h.evaluate_many(orbit.points[lo:K + 1])
        payoff = float(np.min(hv[:-1] - hv[1:]))
    else:
        payoff = 0.0
    gap = abs(estimates.D_upper - estimates.tau_hat)
    return GVGap(gap, payoff, payoff >= estimates.tau_hat - tol)
