"""Built-in oracle suite behind ``hilbert-dyn validate``.

Each check returns a :class:`CheckResult`; the text rendering is
deterministic for a given seed (no timings, fixed float formatting).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dynamics import iterate
from .geometry import Ellipsoid, HPolytope, Intersection, StandardSimplex, sample_interior
from .horo import karlsson_certificate, poincare_busemann, poincare_phi
from .maps import KleinProjective, ProjectiveLinear, birkhoff_coefficient, certify_nonexpansive, klein_boost
from .metric import HALF, ONE, MetricConvention, hilbert_distance, hilbert_distances, simplex_distances


@dataclass
class CheckResult:
    name: str
    passed: bool
    measured: dict = field(default_factory=dict)

    def line(self) -> str:
        vals = " ".join(f"{k}={_fmt(v)}" for k, v in self.measured.items())
        return f"{'PASS' if self.passed else 'FAIL'} {self.name} {vals}".rstrip()


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v))
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.6e}"
    return str(v)


def unit_disk():
    return Ellipsoid([0.0, 0.0], np.eye(2))


def unit_square():
    return HPolytope([[1, 0], [-1, 0], [0, 1], [0, -1]], [1, 1, 1, 1])


def lens_body():
    """Disk of radius 1 intersected with the square [-0.8, 0.8]^2."""
    return Intersection([unit_disk(), HPolytope([[1, 0], [-1, 0], [0, 1], [0, -1]], [0.8] * 4)])


def check_disk_oracle() -> CheckResult:
    d = hilbert_distance(unit_disk(), [0.0, 0.0], [0.5, 0.0], HALF)
    err = abs(d - 0.5 * np.log(3.0))
    return CheckResult("disk-oracle", err <= 1e-9, {"distance": d, "abs_err": err})


def check_metric_axioms(seed: int = 0, triples: int = 10_000) -> CheckResult:
    bodies = {"disk": unit_disk(), "square": unit_square(), "simplex3": StandardSimplex(3),
              "lens": lens_body()}
    rng = np.random.default_rng(seed)
    worst_tri, worst_sym, min_d = 0.0, 0.0, np.inf
    for body in bodies.values():
        X, Y, Z = (sample_interior(body, triples, rng) for _ in range(3))
        dxy = hilbert_distances(body, X, Y)
        dyx = hilbert_distances(body, Y, X)
        dyz = hilbert_distances(body, Y, Z)
        dxz = hilbert_distances(body, X, Z)
        worst_tri = max(worst_tri, float(np.max(dxz - dxy - dyz)))
        worst_sym = max(worst_sym, float(np.max(np.abs(dxy - dyx))))
        min_d = min(min_d, float(dxy.min()))
    # Symmetry is exact in exact arithmetic; the two orders take different
    # rounding paths, so allow a few ulps of the distance.
    ok = worst_tri <= 1e-9 and worst_sym <= 1e-12 and min_d >= 0
    return CheckResult("metric-axioms", ok, {"max_triangle_violation": max(worst_tri, 0.0),
                                             "max_asymmetry": worst_sym, "min_distance": min_d})


def check_simplex_vs_chord(seed: int = 0, pairs: int = 1000, conv: MetricConvention = ONE) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for n in (2, 3, 4):
        body = StandardSimplex(n)
        X = sample_interior(body, pairs, rng)
        Y = sample_interior(body, pairs, rng)
        worst = max(worst, float(np.max(np.abs(simplex_distances(X, Y) - hilbert_distances(body, X, Y, conv)))))
    return CheckResult("simplex-vs-chord", worst <= 1e-8, {"max_abs_diff": worst, "scale": conv.scale})


def check_poincare_horofunction(radius: float = 0.9999) -> CheckResult:
    grid = np.linspace(-1.0, 1.0, 21)
    worst, at_zero = 0.0, 0.0
    for ang in 2 * np.pi * np.arange(8) / 8:
        zeta = np.array([np.cos(ang), np.sin(ang)])
        anchor = radius * zeta
        at_zero = max(at_zero, abs(poincare_busemann(zeta, [0.0, 0.0])))
        for x in grid:
            for y in grid:
                z = np.array([x, y])
                if z @ z >= 0.999:
                    continue
                worst = max(worst, abs(poincare_phi(anchor, z) - poincare_busemann(zeta, z)))
    return CheckResult("poincare-horofunction", worst <= 1e-3 and at_zero == 0.0,
                       {"sup_grid_error": worst, "h_at_zero": at_zero})


def check_birkhoff(seed: int = 0, pairs: int = 10_000) -> CheckResult:
    A = np.array([[1.0, 1.0], [1.0, 2.0]])
    bound = birkhoff_coefficient(A)
    cert = certify_nonexpansive(ProjectiveLinear(A), StandardSimplex(2), pairs, seed)
    ok = 0.16 <= cert.max_ratio <= 0.171573 + 1e-9 and cert.max_ratio <= bound + 1e-9
    return CheckResult("birkhoff-contraction", ok, {"max_ratio": cert.max_ratio, "bound": bound,
                                                    "pairs": cert.pairs_tested})


def check_certificates() -> CheckResult:
    S = StandardSimplex(2)
    o = iterate(ProjectiveLinear([[2.0, 0.0], [0.0, 1.0]]), [0.5, 0.5], S, 40)
    c1 = karlsson_certificate(o, S)
    D = unit_disk()
    boost = KleinProjective(klein_boost(0.5, [1.0, 0.0]), D)
    ob = iterate(boost, [0.0, 0.0], D, 40, HALF)
    c2 = karlsson_certificate(ob, D)
    ok = c1.slack <= 1e-6 and c2.slack <= 1e-6 and abs(c2.tau - 0.5) <= 1e-6
    return CheckResult("record-certificates", ok, {"diag21_slack": c1.slack, "boost_slack": c2.slack,
                                                  "boost_tau": c2.tau})


def run_all(seed: int = 0, inject_scale_mismatch: bool = False) -> list:
    return [
        check_disk_oracle(),
        check_metric_axioms(seed),
        check_simplex_vs_chord(seed, conv=HALF if inject_scale_mismatch else ONE),
        check_poincare_horofunction(),
        check_birkhoff(seed),
        check_certificates(),
    ]
