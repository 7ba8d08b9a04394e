"""Bounded convex domains and the exact geometric queries on them.

Points are plain 1-D float arrays. Bodies expose a *normalized slack*: positive
inside, zero on the boundary, negative outside, already divided by the
relative-tolerance scale (``1 + |b_i|`` for half-spaces, ``1 + ||p||`` for
quadrics), so classification is a comparison against ``tol``.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.optimize import linprog

from . import kernels
from .errors import (
    DegenerateChord,
    DimensionMismatch,
    EmptyInterior,
    NotOnBoundary,
    OutsideDomain,
    Unbounded,
)

DEFAULT_TOL = 1e-9
MAX_DIM = 16


class Location(enum.Enum):
    INTERIOR = "Interior"
    BOUNDARY = "Boundary"
    OUTSIDE = "Outside"


@dataclass(frozen=True, eq=False)
class Chord:
    """Boundary points cut by the line p(t) = x + t (y - x)."""

    a: np.ndarray
    b: np.ndarray
    t_min: float
    t_max: float


@dataclass(frozen=True, eq=False)
class PolytopeFace:
    active: frozenset
    vertices: np.ndarray = field(repr=False)

    def to_dict(self):
        return {"kind": "PolytopeFace", "active": sorted(int(i) for i in self.active),
                "vertices": [list(map(float, v)) for v in self.vertices]}


@dataclass(frozen=True, eq=False)
class ExposedPoint:
    p: np.ndarray

    def to_dict(self):
        return {"kind": "ExposedPoint", "p": list(map(float, self.p))}


def as_point(p, dim=None) -> np.ndarray:
    arr = np.asarray(p, dtype=np.float64)
    if arr.ndim != 1 or not 1 <= arr.size <= MAX_DIM:
        raise DimensionMismatch(f"point must be a vector of length 1..{MAX_DIM}, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("point has non-finite coordinates")
    if dim is not None and arr.size != dim:
        raise DimensionMismatch(f"point has dimension {arr.size}, body has {dim}")
    return arr


class ConvexBody:
    """Base class. Subclasses implement ``_slacks``, ``pair_intervals``,
    ``_face`` and ``_segment_in_boundary``."""

    dim: int
    kind: str = "body"
    strictly_convex: bool = False
    # Interior slack below which iterates are considered at the boundary.
    # Slacks obtained by subtraction keep only ~1e-16 absolute accuracy, so
    # bodies other than the simplex stop earlier than 1e-12.
    proximity_threshold: float = 1e-9

    def slack(self, p):
        """Normalized minimum slack of one point (float) or of rows (array)."""
        P = np.asarray(p, dtype=np.float64)
        if P.ndim == 1:
            return float(self._min_slack(P[None, :])[0])
        return self._min_slack(P)

    def _min_slack(self, P):
        return self._slacks(P).min(axis=1)

    def affine_residual(self, P):
        P = np.atleast_2d(P)
        return np.zeros(P.shape[0])

    def affine_basis(self) -> np.ndarray:
        return np.eye(self.dim)

    def pair_intervals(self, X, Y):
        """Four interval magnitudes per row, see :mod:`hilbert_dyn.kernels`."""
        raise NotImplementedError

    def line_interval(self, x, d):
        x = np.asarray(x, dtype=np.float64)
        d = np.asarray(d, dtype=np.float64)
        nx, px, _, _ = self.pair_intervals(x[None, :], (x + d)[None, :])
        return -float(nx[0]), float(px[0])

    def check_point(self, p):
        return as_point(p, self.dim)

    def to_dict(self):
        raise NotImplementedError


class HPolytope(ConvexBody):
    """{x : a_i . x <= b_i for all i}. Rows are normalized to unit length."""

    kind = "hpolytope"

    def __init__(self, normals, offsets, witness=None):
        A = np.atleast_2d(np.asarray(normals, dtype=np.float64))
        b = np.asarray(offsets, dtype=np.float64).reshape(-1)
        if A.shape[0] != b.size:
            raise DimensionMismatch("normals and offsets have different lengths")
        if not 1 <= A.shape[1] <= MAX_DIM:
            raise DimensionMismatch(f"dimension must be 1..{MAX_DIM}")
        norms = np.linalg.norm(A, axis=1)
        if np.any(norms == 0):
            raise ValueError("HPolytope constraint rows must be nonzero")
        self.raw_normals = A
        self.raw_offsets = b
        self.A = A / norms[:, None]
        self.b = b / norms
        self._scale = 1.0 + np.abs(self.b)
        self.dim = A.shape[1]
        self.witness = self._find_witness() if witness is None else self.check_point(witness)
        if self.slack(self.witness) <= DEFAULT_TOL:
            raise EmptyInterior("interior witness is not an interior point")

    def _find_witness(self):
        m, n = self.A.shape
        # max s  s.t.  A x + s <= b,  s <= 1
        c = np.zeros(n + 1)
        c[-1] = -1.0
        A_ub = np.hstack([self.A, np.ones((m, 1))])
        bounds = [(None, None)] * n + [(None, 1.0)]
        res = linprog(c, A_ub=A_ub, b_ub=self.b, bounds=bounds, method="highs")
        if res.status != 0 or res.x[-1] <= DEFAULT_TOL:
            raise EmptyInterior("HPolytope has empty interior")
        return res.x[:-1]

    def _slacks(self, P):
        P = np.atleast_2d(P)
        return (self.b[None, :] - P @ self.A.T) / self._scale[None, :]

    def pair_intervals(self, X, Y):
        return kernels.slack_intervals(self._slacks(X), self._slacks(Y))

    def active_set(self, p, tol=DEFAULT_TOL) -> frozenset:
        s = self._slacks(np.asarray(p, dtype=np.float64))[0]
        return frozenset(int(i) for i in np.flatnonzero(np.abs(s) <= tol))

    @cached_property
    def vertices(self) -> np.ndarray:
        """All vertices, by solving every N-subset of constraints (N <= 3 only)."""
        m, n = self.A.shape
        if n > 3:
            return np.empty((0, n))
        found = []
        for rows in itertools.combinations(range(m), n):
            M = self.A[list(rows)]
            if abs(np.linalg.det(M)) < 1e-12:
                continue
            v = np.linalg.solve(M, self.b[list(rows)])
            if self._slacks(v)[0].min() >= -1e-9:
                if not any(np.allclose(v, w, atol=1e-9) for w in found):
                    found.append(v)
        return np.array(found).reshape(-1, n)

    def _face(self, p, tol):
        active = self.active_set(p, tol)
        if not active:
            raise NotOnBoundary("point has no tight constraint")
        return PolytopeFace(active, self.face_vertices(active))

    def face_vertices(self, active) -> np.ndarray:
        V = self.vertices
        if V.size == 0:
            return V
        S = self._slacks(V)[:, sorted(active)]
        return V[np.all(np.abs(S) <= 1e-9, axis=1)]

    def _segment_in_boundary(self, p, q, tol, samples):
        return bool(self.active_set(p, tol) & self.active_set(q, tol))

    def to_dict(self):
        return {"type": "hpolytope", "normals": self.raw_normals.tolist(),
                "offsets": self.raw_offsets.tolist()}


class StandardSimplex(ConvexBody):
    """{x in R^N : x_i > 0, sum x_i = 1}. Constraint i is x_i >= 0."""

    kind = "simplex"
    proximity_threshold = 1e-12

    def __init__(self, n):
        n = int(n)
        if not 2 <= n <= MAX_DIM:
            raise DimensionMismatch(f"simplex ambient dimension must be 2..{MAX_DIM}")
        self.dim = n
        self.witness = np.full(n, 1.0 / n)

    def _slacks(self, P):
        return np.atleast_2d(np.asarray(P, dtype=np.float64))

    def affine_residual(self, P):
        P = np.atleast_2d(P)
        return np.abs(P.sum(axis=1) - 1.0)

    def affine_basis(self):
        B = np.zeros((self.dim - 1, self.dim))
        B[:, :-1] = np.eye(self.dim - 1)
        B[:, -1] = -1.0
        return B

    def pair_intervals(self, X, Y):
        return kernels.slack_intervals(self._slacks(X), self._slacks(Y))

    def active_set(self, p, tol=DEFAULT_TOL) -> frozenset:
        return frozenset(int(i) for i in np.flatnonzero(np.abs(np.asarray(p)) <= tol))

    @property
    def vertices(self):
        return np.eye(self.dim)

    def face_vertices(self, active):
        keep = [j for j in range(self.dim) if j not in active]
        return np.eye(self.dim)[keep]

    def _face(self, p, tol):
        active = self.active_set(p, tol)
        if not active:
            raise NotOnBoundary("point has no zero coordinate")
        return PolytopeFace(active, self.face_vertices(active))

    def _segment_in_boundary(self, p, q, tol, samples):
        return bool(self.active_set(p, tol) & self.active_set(q, tol))

    def to_dict(self):
        return {"type": "simplex", "n": self.dim}


class Ellipsoid(ConvexBody):
    """{x : (x-c)^T shape^{-1} (x-c) < 1}."""

    kind = "ellipsoid"
    strictly_convex = True

    def __init__(self, center, shape):
        c = np.asarray(center, dtype=np.float64).reshape(-1)
        S = np.atleast_2d(np.asarray(shape, dtype=np.float64))
        if S.shape != (c.size, c.size):
            raise DimensionMismatch("shape matrix does not match center")
        if not np.allclose(S, S.T) or np.linalg.eigvalsh(S).min() <= 0:
            raise ValueError("ellipsoid shape must be symmetric positive definite")
        self.center = as_point(c)
        self.shape = S
        self.Q = np.linalg.inv(S)
        self.dim = c.size
        self.witness = self.center.copy()

    def _min_slack(self, P):
        U = np.atleast_2d(P) - self.center
        q = np.einsum("ij,jk,ik->i", U, self.Q, U)
        raw = (1.0 - q) / (1.0 + np.sqrt(q))
        return raw / (1.0 + np.linalg.norm(np.atleast_2d(P), axis=1))

    def pair_intervals(self, X, Y):
        return kernels.quadric_intervals(X, Y, self.center, self.Q)

    def _face(self, p, tol):
        return ExposedPoint(np.array(p, dtype=np.float64))

    def _segment_in_boundary(self, p, q, tol, samples):
        return _sampled_segment(self, p, q, tol, samples)

    def to_dict(self):
        return {"type": "ellipsoid", "center": self.center.tolist(), "shape": self.shape.tolist()}


class Intersection(ConvexBody):
    kind = "intersection"

    def __init__(self, parts, witness=None):
        parts = list(parts)
        if not parts:
            raise ValueError("Intersection needs at least one part")
        dims = {p.dim for p in parts}
        if len(dims) != 1:
            raise DimensionMismatch("Intersection parts have different dimensions")
        if any(isinstance(p, StandardSimplex) for p in parts):
            raise ValueError("StandardSimplex cannot be intersected (lower-dimensional hull)")
        self.parts = parts
        self.dim = dims.pop()
        self.strictly_convex = all(p.strictly_convex for p in parts)
        if witness is not None:
            self.witness = self.check_point(witness)
            if self.slack(self.witness) <= DEFAULT_TOL:
                raise EmptyInterior("witness is not interior to every part")
        else:
            cands = [p.witness for p in parts] + [np.mean([p.witness for p in parts], axis=0)]
            best = max(cands, key=self.slack)
            if self.slack(best) <= DEFAULT_TOL:
                raise EmptyInterior("no common interior point found; pass a witness")
            self.witness = np.array(best)

    def _min_slack(self, P):
        return np.min([part._min_slack(P) for part in self.parts], axis=0)

    def pair_intervals(self, X, Y):
        ivs = [part.pair_intervals(X, Y) for part in self.parts]
        return tuple(np.min([iv[k] for iv in ivs], axis=0) for k in range(4))

    def _face(self, p, tol):
        return ExposedPoint(np.array(p, dtype=np.float64))

    def _segment_in_boundary(self, p, q, tol, samples):
        return _sampled_segment(self, p, q, tol, samples)

    def to_dict(self):
        return {"type": "intersection", "parts": [p.to_dict() for p in self.parts]}


def _sampled_segment(body, p, q, tol, samples):
    ts = np.linspace(0.0, 1.0, max(int(samples), 2))
    P = p[None, :] + ts[:, None] * (q - p)[None, :]
    s = body.slack(P)
    return bool(np.all(np.abs(s) <= tol))


# -- operations -------------------------------------------------------------

def contains(body: ConvexBody, p, tol: float = DEFAULT_TOL) -> Location:
    if tol <= 0:
        raise ValueError("tol must be positive")
    p = body.check_point(p)
    if body.affine_residual(p)[0] > tol:
        return Location.OUTSIDE
    s = body.slack(p)
    if s > tol:
        return Location.INTERIOR
    if s < -tol:
        return Location.OUTSIDE
    return Location.BOUNDARY


def chord(body: ConvexBody, x, y) -> Chord:
    x = body.check_point(x)
    y = body.check_point(y)
    for p in (x, y):
        if body.slack(p) <= 0 or body.affine_residual(p)[0] > DEFAULT_TOL:
            raise OutsideDomain(f"{p} is not an interior point")
    d = y - x
    if np.linalg.norm(d) <= 1e-12 * (1.0 + np.linalg.norm(x)):
        raise DegenerateChord("x and y coincide")
    nx, px, _, _ = body.pair_intervals(x[None, :], y[None, :])
    t_min, t_max = -float(nx[0]), float(px[0])
    if not (np.isfinite(t_min) and np.isfinite(t_max)):
        raise Unbounded("chord parameter interval is infinite; the body is unbounded")
    return Chord(x + t_min * d, x + t_max * d, t_min, t_max)


def minimal_face(body: ConvexBody, p, tol: float = DEFAULT_TOL):
    p = body.check_point(p)
    if contains(body, p, tol) is not Location.BOUNDARY:
        raise NotOnBoundary(f"{p} is not a boundary point")
    return body._face(p, tol)


def segment_in_boundary(body: ConvexBody, p, q, tol: float = DEFAULT_TOL, samples: int = 33) -> bool:
    p = body.check_point(p)
    q = body.check_point(q)
    for r in (p, q):
        if contains(body, r, tol) is not Location.BOUNDARY:
            raise NotOnBoundary(f"{r} is not a boundary point")
    return body._segment_in_boundary(p, q, tol, samples)


def face_contains(body: ConvexBody, face, p, tol: float = DEFAULT_TOL) -> bool:
    """Whether boundary point p lies in the closed face."""
    if isinstance(face, PolytopeFace):
        return face.active <= body.active_set(p, tol)
    return bool(np.linalg.norm(np.asarray(p) - face.p) <= tol * (1.0 + np.linalg.norm(face.p)))


def boundary_point(body: ConvexBody, origin, through) -> np.ndarray:
    """Where the ray from interior ``origin`` through ``through`` leaves the body."""
    origin = body.check_point(origin)
    d = body.check_point(through) - origin
    if np.linalg.norm(d) == 0:
        raise DegenerateChord("ray direction is zero")
    _, t_max = body.line_interval(origin, d)
    if not np.isfinite(t_max):
        raise Unbounded("ray never leaves the body")
    return origin + t_max * d


def sample_interior(body: ConvexBody, n: int, rng: np.random.Generator, margin: float = 1e-3) -> np.ndarray:
    """n interior points; Dirichlet on the simplex, random rays from the
    witness elsewhere (radial fraction at most 1 - margin)."""
    if isinstance(body, StandardSimplex):
        X = rng.dirichlet(np.ones(body.dim), size=n)
        return (1.0 - margin) * X + margin / body.dim
    B = body.affine_basis()
    U = rng.standard_normal((n, B.shape[0])) @ B
    U /= np.linalg.norm(U, axis=1)[:, None]
    W = np.broadcast_to(body.witness, U.shape)
    _, t_max, _, _ = body.pair_intervals(W, W + U)
    if not np.all(np.isfinite(t_max)):
        raise Unbounded("cannot sample an unbounded body")
    frac = (1.0 - margin) * rng.random(n) ** (1.0 / B.shape[0])
    return W + (frac * t_max)[:, None] * U
