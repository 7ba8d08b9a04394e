"""Built-in benchmark configurations.

``dim2_suite`` holds ten seeded nonexpansive maps of planar bodies (square,
triangle, pentagon, disk). ``cone_suite`` holds cone maps of simplices plus the
Klein-model boost. ``benchmark_suite`` is their union.
"""

from __future__ import annotations

import numpy as np

from .maps import affine_contraction, barycentric_diagonal, klein_boost, rotation_2d

SQUARE = np.array([[1.0, 1.0], [-1.0, 1.0], [-1.0, -1.0], [1.0, -1.0]])
TRIANGLE = np.array([[-1.0, -1.0], [1.0, -1.0], [0.0, 1.0]])
PENTAGON = np.array([[np.cos(a), np.sin(a)] for a in np.pi / 2 + 2 * np.pi * np.arange(5) / 5])


def polygon_body(vertices) -> dict:
    """H-representation of a convex polygon given counterclockwise vertices."""
    V = np.asarray(vertices, dtype=np.float64)
    normals, offsets = [], []
    for i in range(len(V)):
        p, q = V[i], V[(i + 1) % len(V)]
        n = np.array([q[1] - p[1], p[0] - q[0]])
        normals.append(n.tolist())
        offsets.append(float(n @ p))
    return {"type": "hpolytope", "normals": normals, "offsets": offsets}


DISK = {"type": "ellipsoid", "center": [0.0, 0.0], "shape": [[1.0, 0.0], [0.0, 1.0]]}


def _klein(M) -> dict:
    return {"type": "klein_projective", "matrix": np.asarray(M).tolist()}


def _cfg(map_id, body_name, body, m, seed, **extra) -> dict:
    cfg = {"map_id": map_id, "body_name": body_name, "body": body, "map": m, "seed": seed,
           "max_iter": 200, "scale": 1}
    cfg.update(extra)
    return cfg


def dim2_suite(seed: int = 0) -> list:
    rng = np.random.default_rng(seed)
    sq, tri, pent = polygon_body(SQUARE), polygon_body(TRIANGLE), polygon_body(PENTAGON)

    def lam():
        return float(rng.uniform(0.3, 0.7))

    def edge_point(V):
        i = int(rng.integers(len(V)))
        s = float(rng.uniform(0.2, 0.8))
        return (1 - s) * V[i] + s * V[(i + 1) % len(V)]

    def interior_point(V):
        w = rng.dirichlet(np.ones(len(V)))
        return 0.8 * (w @ V)

    weights = np.array([float(rng.uniform(1.5, 3.0)), 1.0, float(rng.uniform(0.4, 0.9))])
    angle = float(rng.uniform(0.3, 3.0))
    boost_t = float(rng.uniform(0.3, 1.0))
    boost_dir = rng.standard_normal(2)
    zeta = rng.standard_normal(2)
    zeta /= np.linalg.norm(zeta)
    return [
        _cfg("square-vertex", "square", sq, _klein(affine_contraction(lam(), SQUARE[int(rng.integers(4))])), seed),
        _cfg("square-edge", "square", sq, _klein(affine_contraction(lam(), edge_point(SQUARE))), seed),
        _cfg("triangle-barycentric", "triangle", tri, _klein(barycentric_diagonal(TRIANGLE, weights)), seed),
        _cfg("triangle-interior", "triangle", tri, _klein(affine_contraction(lam(), interior_point(TRIANGLE))), seed),
        _cfg("pentagon-vertex", "pentagon", pent, _klein(affine_contraction(lam(), PENTAGON[int(rng.integers(5))])), seed),
        _cfg("pentagon-rotate-contract", "pentagon", pent,
             {"type": "composition", "maps": [_klein(affine_contraction(lam(), interior_point(PENTAGON))),
                                              _klein(rotation_2d(2 * np.pi / 5))]}, seed),
        _cfg("disk-boost", "disk", DISK, _klein(klein_boost(boost_t, boost_dir)), seed, scale=0.5),
        _cfg("disk-rotation", "disk", DISK, _klein(rotation_2d(angle)), seed),
        _cfg("disk-boundary-contract", "disk", DISK, _klein(affine_contraction(lam(), zeta)), seed),
        _cfg("pentagon-edge", "pentagon", pent, _klein(affine_contraction(lam(), edge_point(PENTAGON))), seed),
    ]


def cone_suite(seed: int = 0) -> list:
    rng = np.random.default_rng(seed + 1)
    s2, s3 = {"type": "simplex", "n": 2}, {"type": "simplex", "n": 3}

    def pl(M):
        return {"type": "projective_linear", "matrix": np.asarray(M, dtype=float).tolist()}

    return [
        _cfg("diag21", "simplex2", s2, pl([[2, 0], [0, 1]]), seed),
        _cfg("perron1112", "simplex2", s2, pl([[1, 1], [1, 2]]), seed),
        _cfg("uppertri21", "simplex2", s2, pl([[2, 1], [0, 1]]), seed),
        _cfg("diag221", "simplex3", s3, pl(np.diag([2, 2, 1])), seed),
        _cfg("diag321", "simplex3", s3, pl(np.diag([3, 2, 1])), seed),
        _cfg("positive3", "simplex3", s3, pl(rng.uniform(0.5, 2.0, size=(3, 3))), seed),
        _cfg("topical-bounded", "simplex3", s3,
             {"type": "topical", "coefficients": [[2, 0, 0], [1, 1, 0], [0, 1, 1]], "ops": ["max"] * 3}, seed),
        _cfg("topical-escape", "simplex3", s3,
             {"type": "topical", "coefficients": [[2, 1, 0], [0, 1, 1], [0, 1, 1]],
              "ops": ["max", "max", "min"]}, seed),
        _cfg("identity", "simplex3", s3, {"type": "identity"}, seed),
        _cfg("klein-boost", "disk", DISK, _klein(klein_boost(0.5, [1.0, 0.0])), seed, scale=0.5),
    ]


def benchmark_suite(seed: int = 0) -> list:
    return dim2_suite(seed) + cone_suite(seed)


SUITES = {"dim2": dim2_suite, "cone": cone_suite, "benchmark": benchmark_suite}
