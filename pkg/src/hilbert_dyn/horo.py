"""Horofunction approximants h_z = d(z, .) - d(z, x0), Busemann limits along
rays, Poincaré-disk closed forms, and the record-time certificate
h(f^k x) <= -tau k for escaping orbits."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .dynamics import Orbit, classify_orbit, tau_bounds
from .errors import BoundedOrbitSuspected, InsufficientLength, NotEscaping, RayTooShort
from .geometry import ConvexBody
from .metric import ONE, MetricConvention, hilbert_distance, hilbert_distances, poincare_distance

DEFAULT_EPSILONS = tuple(2.0 ** -i for i in range(1, 9))


class HorofunctionApproximant:
    """x -> d(anchor, x) - d(anchor, basepoint). Immutable after construction."""

    def __init__(self, body: ConvexBody, anchor, basepoint, conv: MetricConvention = ONE):
        self.body = body
        self.anchor = body.check_point(anchor).copy()
        self.basepoint = body.check_point(basepoint).copy()
        self.conv = conv
        self.offset = hilbert_distance(body, self.anchor, self.basepoint, conv)

    def evaluate(self, x) -> float:
        return hilbert_distance(self.body, self.anchor, x, self.conv) - self.offset

    def evaluate_many(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        A = np.broadcast_to(self.anchor, X.shape)
        return hilbert_distances(self.body, A, X, self.conv) - self.offset

    __call__ = evaluate


def evaluate(h: HorofunctionApproximant, x) -> float:
    return h.evaluate(x)


def horoball_contains(h: HorofunctionApproximant, x, level: float) -> bool:
    return h.evaluate(x) <= level


# -- Poincaré disk closed forms ---------------------------------------------

def poincare_busemann(zeta, z) -> float:
    """log(|zeta - z|^2 / (1 - |z|^2)) for zeta on the unit circle."""
    zeta = np.asarray(zeta, dtype=np.float64)
    z = np.asarray(z, dtype=np.float64)
    return float(np.log(np.sum((zeta - z) ** 2) / (1.0 - np.sum(z * z))))


def poincare_phi(anchor, z, basepoint=(0.0, 0.0)) -> float:
    return poincare_distance(anchor, z) - poincare_distance(anchor, basepoint)


def poincare_ray(zeta, lengths) -> np.ndarray:
    """Points at Poincaré distance L from 0 towards boundary point zeta."""
    zeta = np.asarray(zeta, dtype=np.float64)
    return np.tanh(np.asarray(lengths, dtype=np.float64) / 2.0)[:, None] * zeta[None, :]


# -- Busemann limits --------------------------------------------------------

def geodesic_ray(body: ConvexBody, start, target, lengths, conv: MetricConvention = ONE) -> np.ndarray:
    """Points on the straight segment from ``start`` to boundary point
    ``target`` at the requested Hilbert distances from ``start``."""
    start = body.check_point(start)
    d = body.check_point(target) - start
    t_lo, t_hi = body.line_interval(start, d)
    neg = -t_lo / t_hi  # chord rescaled so the target sits at s = 1
    E = np.exp(np.asarray(lengths, dtype=np.float64) / conv.scale)
    s = neg * (E - 1.0) / (1.0 + E * neg)
    return start[None, :] + (s * t_hi)[:, None] * d[None, :]


@dataclass(frozen=True)
class BusemannEstimate:
    value: float
    gap: float
    values: np.ndarray = field(repr=False)
    monotone: bool = True


def busemann_along(ray: Sequence, x, basepoint, body: Optional[ConvexBody] = None,
                   conv: MetricConvention = ONE,
                   dist: Optional[Callable] = None) -> BusemannEstimate:
    """d(g_k, x) - d(g_k, basepoint) along ray points g_k.

    ``dist`` overrides the Hilbert distance (e.g. ``poincare_distance``).
    ``monotone`` checks that d(g_k, x) - d(g_k, g_0) is nonincreasing within
    1e-9, as the triangle inequality demands.
    """
    if dist is None:
        if body is None:
            raise ValueError("busemann_along needs a body or a distance function")
        dist = lambda p, q: hilbert_distance(body, p, q, conv)  # noqa: E731
    ray = [np.asarray(p, dtype=np.float64) for p in ray]
    if len(ray) < 3:
        raise RayTooShort("a ray needs at least 3 points")
    out = np.array([dist(g, basepoint) for g in ray])
    if np.any(np.diff(out) <= 0):
        raise NotEscaping("ray points do not move away from the basepoint")
    to_x = np.array([dist(g, x) for g in ray])
    vals = to_x - out
    from_start = np.array([dist(g, ray[0]) for g in ray])
    monotone = bool(np.all(np.diff(to_x - from_start) <= 1e-9))
    return BusemannEstimate(float(vals[-1]), float(abs(vals[-1] - vals[-2])), vals, monotone)


# -- record times and the certificate ---------------------------------------

@dataclass(frozen=True)
class RecordSelection:
    epsilon: float
    tau: float
    records: tuple
    b_values: np.ndarray = field(repr=False)

    @property
    def bounded_suspected(self) -> bool:
        n = len(self.b_values)
        return not any(r >= n // 2 for r in self.records)


def select_records(distances_from_start, tau: float, epsilon: float, strict: bool = True) -> RecordSelection:
    """Indices n > 0 where b(n) = a_n - (tau - epsilon) n beats every earlier b(m)."""
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    a = np.asarray(distances_from_start, dtype=np.float64)
    if a.size == 0:
        raise ValueError("distances must be nonempty")
    b = a - (tau - epsilon) * np.arange(a.size)
    prior = np.maximum.accumulate(b)
    records = tuple(int(n) for n in range(1, a.size) if b[n] > prior[n - 1])
    sel = RecordSelection(float(epsilon), float(tau), records, b)
    if strict and sel.bounded_suspected:
        raise BoundedOrbitSuspected("no record in the last half of the orbit", sel)
    return sel


@dataclass(frozen=True, eq=False)
class RecordCertificate:
    h: HorofunctionApproximant
    slack: float
    tau: float
    anchor_index: int
    check_range: int
    selections: tuple = ()


def karlsson_certificate(orbit: Orbit, body: ConvexBody, epsilons=DEFAULT_EPSILONS,
                         tau: Optional[float] = None) -> RecordCertificate:
    """Anchor h at the last record time of the smallest epsilon and report
    slack = max_{1<=k<=K} h(f^k x) + tau k."""
    if len(orbit) < 8:
        raise InsufficientLength("certificate needs at least 8 orbit points")
    cls = classify_orbit(orbit, body)
    if not cls.escaping:
        raise BoundedOrbitSuspected(f"orbit classified {cls.kind}; no escaping certificate")
    if tau is None:
        tau = tau_bounds(orbit)[0]
    eps = sorted(epsilons, reverse=True)
    sels = tuple(select_records(orbit.from_start, tau, e) for e in eps)
    anchor = sels[-1].records[-1]
    K = min(orbit.steps // 2, anchor - 1)
    if K < 1:
        raise InsufficientLength("no checkable range before the anchor")
    h = HorofunctionApproximant(body, orbit.points[anchor], orbit.points[0], orbit.conv)
    hv = h.evaluate_many(orbit.points[1:K + 1])
    slack = float(np.max(hv + tau * np.arange(1, K + 1)))
    return RecordCertificate(h, slack, float(tau), anchor, K, sels)


def fixed_point_certificate(orbit: Orbit, body: ConvexBody) -> RecordCertificate:
    """For bounded orbits: h anchored at the last iterate (approximate fixed point), tau = 0."""
    h = HorofunctionApproximant(body, orbit.points[-1], orbit.points[0], orbit.conv)
    K = orbit.steps
    slack = float(np.max(h.evaluate_many(orbit.points[1:]))) if K else 0.0
    return RecordCertificate(h, slack, 0.0, K, K)
