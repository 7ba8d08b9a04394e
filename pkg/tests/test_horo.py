import numpy as np
import pytest

from hilbert_dyn.dynamics import iterate
from hilbert_dyn.errors import BoundedOrbitSuspected, NotEscaping, RayTooShort
from hilbert_dyn.geometry import sample_interior
from hilbert_dyn.horo import (HorofunctionApproximant, busemann_along, evaluate, geodesic_ray, horoball_contains,
                              karlsson_certificate, poincare_busemann, poincare_phi, poincare_ray,
                              select_records)
from hilbert_dyn.maps import KleinProjective, ProjectiveLinear, klein_boost
from hilbert_dyn.metric import HALF, hilbert_distance, hilbert_distances, poincare_distance

LOG2 = np.log(2)


def test_evaluate_examples(disk, simplex2):
    h = HorofunctionApproximant(disk, [0.9, 0], [0, 0], HALF)
    assert evaluate(h, [0, 0]) == 0.0
    # d((0.9,0),(0.5,0)) - d((0.9,0),0) on the diameter, each an arctanh difference
    oracle = (np.arctanh(0.9) - np.arctanh(0.5)) - np.arctanh(0.9)
    assert evaluate(h, [0.5, 0]) == pytest.approx(oracle, abs=1e-12)
    assert oracle == pytest.approx(-0.549306, abs=1e-6)
    eps = 1e-6
    h = HorofunctionApproximant(simplex2, [1 - eps, eps], [0.5, 0.5])
    assert evaluate(h, [0.25, 0.75]) == pytest.approx(np.log(3), abs=1e-5)


def test_horoball_examples(disk, simplex2):
    h = HorofunctionApproximant(disk, [0.999, 0], [0, 0], HALF)
    assert horoball_contains(h, [0, 0], 0.0)
    assert not horoball_contains(h, [-0.5, 0], 0.0)
    o = iterate(ProjectiveLinear([[2, 0], [0, 1]]), [0.5, 0.5], simplex2, 40)
    cert = karlsson_certificate(o, simplex2)
    assert horoball_contains(cert.h, o.points[5], -5 * LOG2 + 1e-6)


def test_approximant_lipschitz_and_bounds(square):
    rng = np.random.default_rng(0)
    h = HorofunctionApproximant(square, [0.99, 0.5], [0, 0])
    X, Y = sample_interior(square, 1000, rng), sample_interior(square, 1000, rng)
    hx, hy = h.evaluate_many(X), h.evaluate_many(Y)
    assert np.all(np.abs(hx - hy) <= hilbert_distances(square, X, Y) + 1e-9)
    d0 = hilbert_distances(square, X, np.broadcast_to(h.basepoint, X.shape))
    assert np.all(np.abs(hx) <= d0 + 1e-9)


def test_horoball_convexity(disk, square):
    rng = np.random.default_rng(2)
    for body, anchor, conv in ((disk, [0.9999, 0], HALF), (square, [0.9999, 0.3], None)):
        h = HorofunctionApproximant(body, anchor, body.witness) if conv is None else \
            HorofunctionApproximant(body, anchor, body.witness, conv)
        X = sample_interior(body, 12000, rng)
        hx = h.evaluate_many(X)
        level = float(np.quantile(hx, 0.2))
        inside = X[hx <= level]
        P, Q = inside[:1000], inside[1000:2000]
        assert len(Q) == 1000
        assert np.all(h.evaluate_many(0.5 * (P + Q)) <= level + 1e-9)


def test_poincare_busemann_forms():
    zeta = np.array([1.0, 0.0])
    assert poincare_busemann(zeta, [0, 0]) == 0.0
    assert poincare_busemann(zeta, [0.3, 0]) == pytest.approx(np.log(0.49 / 0.91))
    assert abs(poincare_phi(0.9999 * zeta, [0.3, 0.2]) - poincare_busemann(zeta, [0.3, 0.2])) < 1e-3


def test_busemann_poincare_mode():
    ray = poincare_ray([1, 0], np.arange(1, 17, dtype=float))
    est = busemann_along(ray, [0.3, 0], [0, 0], dist=poincare_distance)
    assert est.value == pytest.approx(np.log(0.49 / 0.91), abs=1e-6)
    assert est.monotone
    zero = busemann_along(ray, [0, 0], [0, 0], dist=poincare_distance)
    assert np.all(zero.values == 0)


def test_busemann_hilbert_disk(disk):
    ray = geodesic_ray(disk, [0, 0], [1, 0], np.arange(1, 10, dtype=float), HALF)
    # unit-speed parametrization in the Klein model
    np.testing.assert_allclose([hilbert_distance(disk, [0, 0], p, HALF) for p in ray],
                               np.arange(1, 10), rtol=1e-9)
    est = busemann_along(ray, [0.5, 0], [0, 0], disk, HALF)
    assert est.value == pytest.approx(-np.arctanh(0.5), abs=1e-9)
    assert est.monotone
    x = np.array([-0.3, 0.4])
    assert np.all(est.values >= -hilbert_distance(disk, x, ray[0], HALF) - 1e-9)


def test_busemann_errors(disk):
    with pytest.raises(RayTooShort):
        busemann_along([[0.1, 0], [0.2, 0]], [0, 0], [0, 0], disk)
    with pytest.raises(NotEscaping):
        busemann_along([[0.5, 0], [0.2, 0], [0.1, 0]], [0, 0], [0, 0], disk)


def test_select_records_examples():
    assert select_records(np.arange(21.0), 1.0, 0.1).records == tuple(range(1, 21))
    a = LOG2 * np.arange(30)
    assert select_records(a, LOG2, 0.05).records == tuple(range(1, 30))
    flat = np.array([0.0] + [1.0] * 20)
    # with tau = 1, b(n) = 1 - 0.5 n decreases after n = 1
    sel = select_records(flat, 1.0, 0.5, strict=False)
    assert sel.records == (1,) and sel.bounded_suspected
    with pytest.raises(BoundedOrbitSuspected):
        select_records(flat, 1.0, 0.5)
    # with tau = 0, b(n) = 1 + 0.5 n increases, so every n is a record
    assert select_records(flat, 0.0, 0.5).records == tuple(range(1, 21))


def test_select_records_matches_brute_force():
    rng = np.random.default_rng(5)
    a = np.cumsum(rng.uniform(0, 1, 40))
    sel = select_records(a, 0.5, 0.1, strict=False)
    b = [a[n] - 0.4 * n for n in range(40)]
    assert sel.records == tuple(n for n in range(1, 40) if all(b[n] > b[m] for m in range(n)))


def test_certificate_diag21(simplex2):
    o = iterate(ProjectiveLinear([[2, 0], [0, 1]]), [0.5, 0.5], simplex2, 40)
    cert = karlsson_certificate(o, simplex2)
    assert cert.slack <= 1e-6
    # h(f^k x0) = -k log 2 exactly
    for k in range(1, cert.check_range + 1):
        assert cert.h.evaluate(o.points[k]) == pytest.approx(-k * LOG2, abs=1e-9)
    # close to the limit form log(x2/x1)
    x = np.array([0.25, 0.75])
    assert cert.h.evaluate(x) == pytest.approx(np.log(x[1] / x[0]), abs=1e-3)


def test_certificate_boost(disk):
    o = iterate(KleinProjective(klein_boost(0.5, [1, 0]), disk), [0, 0], disk, 40, HALF)
    cert = karlsson_certificate(o, disk)
    assert cert.slack <= 1e-6 and cert.tau == pytest.approx(0.5, abs=1e-6)


def test_certificate_bounded_orbit(simplex2):
    o = iterate(ProjectiveLinear([[1, 1], [1, 2]]), [0.2, 0.8], simplex2, 60)
    with pytest.raises(BoundedOrbitSuspected):
        karlsson_certificate(o, simplex2)
