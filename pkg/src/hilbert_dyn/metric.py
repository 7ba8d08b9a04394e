"""Hilbert's cross-ratio distance, the simplex closed form, the Gromov
product and the Poincaré-disk distance used as an oracle."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import DistanceOverflow, NotInSimplex, OutsideDisk, OutsideDomain, Unbounded
from .geometry import DEFAULT_TOL, ConvexBody

DISTANCE_CAP = 1e6


@dataclass(frozen=True)
class MetricConvention:
    """Multiplier in front of the log cross-ratio.

    ``scale=1`` is the cone / Perron-Frobenius convention (simplex closed form,
    Birkhoff's coefficient). ``scale=0.5`` makes the Hilbert metric on the
    unit disk the curvature -1 Klein model.
    """

    scale: float = 1.0

    def __post_init__(self):
        if self.scale not in (1.0, 0.5):
            raise ValueError("scale must be 1 or 1/2")

    @classmethod
    def parse(cls, value) -> "MetricConvention":
        if isinstance(value, MetricConvention):
            return value
        names = {"one": 1.0, "1": 1.0, "half": 0.5, "1/2": 0.5, "0.5": 0.5}
        if isinstance(value, str):
            if value.strip().lower() not in names:
                raise ValueError(f"unknown scale {value!r}")
            return cls(names[value.strip().lower()])
        return cls(float(value))


ONE = MetricConvention(1.0)
HALF = MetricConvention(0.5)


def _check_rows(body, P):
    s = body.slack(P)
    res = body.affine_residual(P)
    if np.any(res > DEFAULT_TOL) or np.any(s < -DEFAULT_TOL):
        raise OutsideDomain("point outside the domain")
    if np.any(s <= 0):
        raise DistanceOverflow("point on the boundary: distance is infinite")


def hilbert_distances(body: ConvexBody, X, Y, conv: MetricConvention = ONE, cap: float = DISTANCE_CAP) -> np.ndarray:
    """Row-wise Hilbert distances between two (n, N) arrays of interior points."""
    X = np.ascontiguousarray(np.atleast_2d(np.asarray(X, dtype=np.float64)))
    Y = np.ascontiguousarray(np.atleast_2d(np.asarray(Y, dtype=np.float64)))
    if X.shape != Y.shape or X.shape[1] != body.dim:
        from .errors import DimensionMismatch
        raise DimensionMismatch(f"expected (n, {body.dim}) arrays, got {X.shape} and {Y.shape}")
    _check_rows(body, X)
    _check_rows(body, Y)
    same = np.all(X == Y, axis=1)
    nx, px, ny, py = body.pair_intervals(X, Y)
    open_ended = ~same & ~(np.isfinite(nx) & np.isfinite(px))
    if np.any(open_ended):
        # Rounding-level separations give no usable direction; treat as equal.
        tiny = np.linalg.norm(X - Y, axis=1) <= 1e-13 * (1.0 + np.linalg.norm(X, axis=1))
        if np.any(open_ended & ~tiny):
            raise Unbounded("chord parameter interval is infinite; the body is unbounded")
        same = same | open_ended
    d = conv.scale * kernels.cross_ratio_log(nx, px, ny, py)
    d = np.where(same, 0.0, np.maximum(d, 0.0))
    if np.any(~np.isfinite(d)) or np.any(d > cap):
        raise DistanceOverflow(f"distance exceeds cap {cap:g}")
    return d


def hilbert_distance(body: ConvexBody, x, y, conv: MetricConvention = ONE, cap: float = DISTANCE_CAP) -> float:
    """conv.scale * log(((1 - t_min) / -t_min) * (t_max / (t_max - 1)))."""
    x = body.check_point(x)
    y = body.check_point(y)
    return float(hilbert_distances(body, x[None, :], y[None, :], conv, cap)[0])


def _check_simplex(P):
    P = np.atleast_2d(np.asarray(P, dtype=np.float64))
    if np.any(P <= 0) or np.any(np.abs(P.sum(axis=1) - 1.0) > DEFAULT_TOL):
        raise NotInSimplex("points must have positive coordinates summing to 1")
    return P


def simplex_distances(X, Y) -> np.ndarray:
    X = _check_simplex(X)
    Y = _check_simplex(Y)
    return kernels.simplex_spread(X, Y)


def simplex_distance(x, y) -> float:
    """log(max_i(x_i/y_i) / min_i(x_i/y_i)); the scale-1 Hilbert distance on the simplex."""
    return float(simplex_distances(x, y)[0])


def gromov_product(body: ConvexBody, x, xp, basept, conv: MetricConvention = ONE) -> float:
    d_xb = hilbert_distance(body, x, basept, conv)
    d_pb = hilbert_distance(body, xp, basept, conv)
    d_xp = hilbert_distance(body, x, xp, conv)
    return 0.5 * (d_xb + d_pb - d_xp)


def _as_complex(z):
    if isinstance(z, (complex, np.complexfloating)):
        z = np.array([z.real, z.imag])
    z = np.asarray(z, dtype=np.float64)
    if z.shape != (2,):
        raise ValueError("Poincaré points are pairs of reals")
    w = complex(z[0], z[1])
    if abs(w) >= 1.0:
        raise OutsideDisk(f"{tuple(z)} is not in the open unit disk")
    return w


def poincare_distance(z, w) -> float:
    """Curvature -1 Poincaré distance log((1+rho)/(1-rho)), rho = |z-w|/|1 - z conj(w)|."""
    a = _as_complex(z)
    b = _as_complex(w)
    if a == b:
        return 0.0
    rho = abs(a - b) / abs(1.0 - a * b.conjugate())
    return float(2.0 * np.arctanh(rho))
