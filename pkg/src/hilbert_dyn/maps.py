"""Concrete semicontractions of Hilbert domains.

Cone maps (``ProjectiveLinear``, ``Topical``) act on the standard simplex by
applying a homogeneous map of the positive cone and renormalizing to unit
l1-norm. ``KleinProjective`` acts on homogeneous coordinates (x, 1); a
projective map sending a convex body into itself does not increase its Hilbert
distances.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import MapLeftDomain, NonPositiveEntry, ZeroImage
from .geometry import ConvexBody, sample_interior
from .metric import ONE, MetricConvention, hilbert_distances, simplex_distance


class Semicontraction:
    """Base class: subclasses define ``dim``, ``map_id`` and ``apply``."""

    dim: int
    map_id: str = "map"
    experimental: bool = False

    def apply(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def apply_many(self, X: np.ndarray) -> np.ndarray:
        return np.array([self.apply(x) for x in np.atleast_2d(X)])

    def __call__(self, x):
        return self.apply(np.asarray(x, dtype=np.float64))

    def to_dict(self) -> dict:
        raise NotImplementedError


class Identity(Semicontraction):
    def __init__(self, dim: Optional[int] = None, map_id: str = "identity"):
        self.dim = dim
        self.map_id = map_id

    def apply(self, x):
        return np.array(x, dtype=np.float64)

    def apply_many(self, X):
        return np.array(X, dtype=np.float64)

    def to_dict(self):
        return {"type": "identity"}


def _nonneg_square(matrix, what):
    A = np.atleast_2d(np.asarray(matrix, dtype=np.float64))
    if A.shape[0] != A.shape[1]:
        raise ValueError(f"{what} matrix must be square")
    if np.any(A < 0) or not np.all(np.isfinite(A)):
        raise ValueError(f"{what} matrix must be nonnegative and finite")
    if np.any(A.max(axis=1) <= 0):
        raise ValueError(f"{what} matrix has a zero row; interior would leave the simplex")
    return A


class ProjectiveLinear(Semicontraction):
    """x -> A x / ||A x||_1 on the standard simplex."""

    def __init__(self, matrix, map_id: str = "projective_linear"):
        self.A = _nonneg_square(matrix, "ProjectiveLinear")
        self.dim = self.A.shape[0]
        self.map_id = map_id

    def apply(self, x):
        y = self.A @ x
        s = y.sum()
        if not s > 0:
            raise ZeroImage("cone map sent a positive vector to 0")
        return y / s

    def apply_many(self, X):
        Y = np.atleast_2d(X) @ self.A.T
        s = Y.sum(axis=1)
        if np.any(~(s > 0)):
            raise ZeroImage("cone map sent a positive vector to 0")
        return Y / s[:, None]

    def to_dict(self):
        return {"type": "projective_linear", "matrix": self.A.tolist()}


class Topical(Semicontraction):
    """(T x)_i = max_j or min_j of c_ij x_j over c_ij > 0, renormalized.

    Order-preserving and homogeneous of degree one, hence nonexpansive for the
    Hilbert metric on the simplex.
    """

    def __init__(self, coefficients, ops: Sequence[str], map_id: str = "topical"):
        self.C = _nonneg_square(coefficients, "Topical")
        ops = [str(o).lower() for o in ops]
        if len(ops) != self.C.shape[0] or any(o not in ("max", "min") for o in ops):
            raise ValueError("ops must list 'max' or 'min' for every row")
        self.ops = ops
        self.dim = self.C.shape[0]
        self.map_id = map_id
        self._is_max = np.array([o == "max" for o in ops])
        self._mask = self.C > 0

    def apply(self, x):
        return self.apply_many(x[None, :])[0]

    def apply_many(self, X):
        T = np.atleast_2d(X)[:, None, :] * self.C[None, :, :]
        hi = np.where(self._mask[None], T, -np.inf).max(axis=2)
        lo = np.where(self._mask[None], T, np.inf).min(axis=2)
        Y = np.where(self._is_max[None, :], hi, lo)
        s = Y.sum(axis=1)
        if np.any(~(s > 0)):
            raise ZeroImage("topical map sent a positive vector to 0")
        return Y / s[:, None]

    def to_dict(self):
        return {"type": "topical", "coefficients": self.C.tolist(), "ops": list(self.ops)}


class KleinProjective(Semicontraction):
    """x -> (M [x; 1])[:N] / (M [x; 1])[N].

    With a ``body`` the map is certified at construction: ``samples`` seeded
    interior points must land in the interior.
    """

    def __init__(self, matrix, body: Optional[ConvexBody] = None, map_id: str = "klein_projective",
                 samples: int = 1000, seed: int = 0):
        M = np.atleast_2d(np.asarray(matrix, dtype=np.float64))
        if M.shape[0] != M.shape[1] or M.shape[0] < 2:
            raise ValueError("KleinProjective matrix must be (N+1)x(N+1)")
        self.M = M
        self.dim = M.shape[0] - 1
        self.map_id = map_id
        self.body = body
        if body is not None:
            if body.dim != self.dim:
                raise ValueError("KleinProjective matrix does not match the body dimension")
            X = np.vstack([body.witness, sample_interior(body, samples, np.random.default_rng(seed))])
            Y = self.apply_many(X)
            if np.any(body.slack(Y) <= 0) or np.any(body.affine_residual(Y) > 1e-9):
                raise MapLeftDomain("KleinProjective map does not send the body into its interior")

    def apply(self, x):
        h = self.M[:-1, :-1] @ x + self.M[:-1, -1]
        den = self.M[-1, :-1] @ x + self.M[-1, -1]
        if not den > 0:
            raise MapLeftDomain("projective image at infinity or behind the viewer")
        return h / den

    def apply_many(self, X):
        X = np.atleast_2d(X)
        H = X @ self.M[:-1, :-1].T + self.M[:-1, -1]
        den = X @ self.M[-1, :-1] + self.M[-1, -1]
        if np.any(~(den > 0)):
            raise MapLeftDomain("projective image at infinity or behind the viewer")
        return H / den[:, None]

    def to_dict(self):
        return {"type": "klein_projective", "matrix": self.M.tolist()}


class Composition(Semicontraction):
    """Applies ``maps`` left to right: Composition([f, g])(x) = g(f(x))."""

    def __init__(self, maps: Sequence[Semicontraction], map_id: Optional[str] = None,
                 experimental: bool = False):
        maps = list(maps)
        if not maps:
            raise ValueError("Composition needs at least one map")
        dims = {m.dim for m in maps if m.dim is not None}
        if len(dims) > 1:
            raise ValueError(f"Composition components do not chain: dimensions {sorted(dims)}")
        self.maps = maps
        self.dim = dims.pop() if dims else None
        self.map_id = map_id or "∘".join(m.map_id for m in reversed(maps))
        self.experimental = experimental or any(m.experimental for m in maps)

    def apply(self, x):
        for m in self.maps:
            x = m.apply(x)
        return x

    def apply_many(self, X):
        for m in self.maps:
            X = m.apply_many(X)
        return X

    def to_dict(self):
        return {"type": "composition", "maps": [m.to_dict() for m in self.maps]}


def apply(m: Semicontraction, x) -> np.ndarray:
    return m.apply(np.asarray(x, dtype=np.float64))


# -- Klein-model builders ---------------------------------------------------

def klein_boost(t: float, direction) -> np.ndarray:
    """Lorentz boost of rapidity t along ``direction``; translates the Klein
    ball by t (scale 1/2) along that diameter."""
    u = np.asarray(direction, dtype=np.float64)
    u = u / np.linalg.norm(u)
    n = u.size
    M = np.eye(n + 1)
    M[:n, :n] += (np.cosh(t) - 1.0) * np.outer(u, u)
    M[:n, n] = np.sinh(t) * u
    M[n, :n] = np.sinh(t) * u
    M[n, n] = np.cosh(t)
    return M


def rotation_2d(angle: float, center=(0.0, 0.0)) -> np.ndarray:
    c, s = np.cos(angle), np.sin(angle)
    R = np.array([[c, -s], [s, c]])
    z = np.asarray(center, dtype=np.float64)
    M = np.eye(3)
    M[:2, :2] = R
    M[:2, 2] = z - R @ z
    return M


def affine_contraction(lam: float, target) -> np.ndarray:
    """x -> lam x + (1 - lam) target."""
    v = np.asarray(target, dtype=np.float64)
    n = v.size
    M = np.eye(n + 1)
    M[:n, :n] *= lam
    M[:n, n] = (1.0 - lam) * v
    return M


def barycentric_diagonal(vertices, weights) -> np.ndarray:
    """Projective map of a simplex (given by its vertices) that scales
    barycentric coordinates by ``weights``."""
    V = np.asarray(vertices, dtype=np.float64)
    H = np.vstack([V.T, np.ones(V.shape[0])])
    return H @ np.diag(np.asarray(weights, dtype=np.float64)) @ np.linalg.inv(H)


# -- certification ----------------------------------------------------------

@dataclass(frozen=True, eq=False)
class NonexpansivenessCertificate:
    pairs_tested: int
    max_ratio: float
    witness: Optional[tuple] = None


def sample_pairs(body: ConvexBody, pairs: int, seed: int, min_sep: float = 1e-6):
    rng = np.random.default_rng(seed)
    X = sample_interior(body, pairs, rng)
    Y = sample_interior(body, pairs, rng)
    keep = np.linalg.norm(X - Y, axis=1) > min_sep
    return X[keep], Y[keep]


def certify_nonexpansive(m: Semicontraction, body: ConvexBody, pairs: int = 1000, seed: int = 0,
                         conv: MetricConvention = ONE, X=None, Y=None) -> NonexpansivenessCertificate:
    """Exact maximum of d(f x, f y) / d(x, y) over seeded interior pairs.

    Explicit ``X``, ``Y`` override the sampling (shared sample sets).
    """
    if pairs < 1:
        raise ValueError("pairs must be >= 1")
    if X is None:
        X, Y = sample_pairs(body, pairs, seed)
    d0 = hilbert_distances(body, X, Y, conv)
    d1 = hilbert_distances(body, m.apply_many(X), m.apply_many(Y), conv)
    ok = d0 > 0
    ratios = d1[ok] / d0[ok]
    i = int(np.argmax(ratios))
    max_ratio = float(ratios[i])
    witness = None
    if max_ratio > 1.0 + 1e-9:
        idx = np.flatnonzero(ok)[i]
        witness = (X[idx].copy(), Y[idx].copy())
    return NonexpansivenessCertificate(int(ok.sum()), max_ratio, witness)


def birkhoff_diameter(matrix) -> float:
    """Projective diameter of the image of the positive cone under A."""
    A = np.atleast_2d(np.asarray(matrix, dtype=np.float64))
    if np.any(~(A > 0)):
        raise NonPositiveEntry("Birkhoff diameter needs a strictly positive matrix")
    cols = (A / A.sum(axis=0)).T
    n = cols.shape[0]
    return max((simplex_distance(cols[j], cols[l]) for j in range(n) for l in range(j + 1, n)), default=0.0)


def birkhoff_coefficient(matrix) -> float:
    return float(np.tanh(birkhoff_diameter(matrix) / 4.0))


# -- Beardon approximants ---------------------------------------------------

def beardon_approximant(m: Semicontraction, basepoint, k: int) -> Composition:
    """x -> (1 - 1/(k+1)) m(x) + (1/(k+1)) basepoint.

    Flagged experimental: callers must certify it before relying on the
    contraction property.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    basepoint = np.asarray(basepoint, dtype=np.float64)
    w = 1.0 / (k + 1)
    avg = KleinProjective(affine_contraction(1.0 - w, basepoint), map_id=f"avg{k}")
    return Composition([m, avg], map_id=f"beardon[{m.map_id},k={k}]", experimental=True)


def banach_fixed_point(m: Semicontraction, x0, tol: float = 1e-12, max_steps: int = 100_000):
    """Iterate until the Euclidean step is below ``tol``.

    Returns (point, steps, converged).
    """
    x = np.asarray(x0, dtype=np.float64)
    for step in range(1, max_steps + 1):
        y = m.apply(x)
        if np.linalg.norm(y - x) < tol:
            return y, step, True
        x = y
    return x, max_steps, False
