import numpy as np
import pytest

from hilbert_dyn.dynamics import (StopReason, classify_orbit, drift_estimates, gv_gap, is_monotone_escape,
                                  iterate, tau_bounds)
from hilbert_dyn.errors import MissingCertificate
from hilbert_dyn.horo import karlsson_certificate, fixed_point_certificate
from hilbert_dyn.maps import Identity, KleinProjective, ProjectiveLinear, klein_boost, rotation_2d
from hilbert_dyn.metric import HALF, hilbert_distances

LOG2 = np.log(2)
PERRON = np.array([(3 - np.sqrt(5)) / 2, (np.sqrt(5) - 1) / 2])


def test_identity_orbit(simplex3):
    o = iterate(Identity(), [0.2, 0.3, 0.5], simplex3, 10)
    assert o.stop_reason is StopReason.CONVERGED and o.steps == 1
    assert np.all(o.displacements == 0)
    est = drift_estimates(o, Identity(), simplex3)
    assert (est.tau_hat, est.tau_upper, est.delta_hat, est.D_upper) == (0, 0, 0, 0)


def test_perron_orbit(simplex2):
    o = iterate(ProjectiveLinear([[1, 1], [1, 2]]), [0.5, 0.5], simplex2, 60)
    assert o.stop_reason is StopReason.CONVERGED
    np.testing.assert_allclose(o.points[-1], PERRON, atol=1e-9)
    # eigen oracle
    w, V = np.linalg.eigh(np.array([[1.0, 1.0], [1.0, 2.0]]))
    v = np.abs(V[:, np.argmax(w)])
    np.testing.assert_allclose(o.points[-1], v / v.sum(), atol=1e-9)
    assert classify_orbit(o, simplex2).bounded
    assert not is_monotone_escape(o, simplex2)


def test_diag21_orbit(simplex2):
    m = ProjectiveLinear([[2, 0], [0, 1]])
    o = iterate(m, [0.5, 0.5], simplex2, 40)
    assert o.stop_reason is StopReason.BOUNDARY_PROXIMITY
    k = np.arange(len(o))
    np.testing.assert_allclose(o.points[:, 0], 2.0 ** k / (2.0 ** k + 1), rtol=1e-14)
    np.testing.assert_allclose(o.from_start, k * LOG2, rtol=1e-12, atol=1e-12)
    est = drift_estimates(o, m, simplex2)
    assert est.tau_hat == pytest.approx(LOG2, abs=1e-6)
    assert est.D_upper == pytest.approx(LOG2, abs=1e-6)
    assert est.delta_hat == pytest.approx(LOG2, abs=1e-12)
    assert classify_orbit(o, simplex2).escaping
    assert is_monotone_escape(o, simplex2)


def test_boost_estimates(disk):
    m = KleinProjective(klein_boost(0.5, [1, 0]), disk)
    o = iterate(m, [0, 0], disk, 40, HALF)
    est = drift_estimates(o, m, disk)
    for v in (est.tau_hat, est.delta_hat, est.D_upper):
        assert v == pytest.approx(0.5, abs=1e-6)
    cert = karlsson_certificate(o, disk)
    gv = gv_gap(est, cert, o)
    assert gv.d_tau_gap <= 1e-6
    assert gv.horo_payoff == pytest.approx(0.5, abs=1e-3)


def test_rotation_bounded(disk):
    m = KleinProjective(rotation_2d(np.sqrt(2)), disk)
    o = iterate(m, [0, 0], disk, 50, HALF)
    c = classify_orbit(o, disk)
    assert c.bounded and c.radius == 0


def test_gv_gap_examples(simplex2, simplex3):
    m = ProjectiveLinear([[2, 0], [0, 1]])
    o = iterate(m, [0.5, 0.5], simplex2, 40)
    est = drift_estimates(o, m, simplex2)
    gv = gv_gap(est, karlsson_certificate(o, simplex2), o)
    assert gv.horo_payoff == pytest.approx(LOG2, abs=1e-9)
    assert gv.d_tau_gap <= 1e-6 and gv.witnesses_max
    oi = iterate(Identity(), [0.2, 0.3, 0.5], simplex3, 10)
    gi = gv_gap(drift_estimates(oi, Identity(), simplex3), fixed_point_certificate(oi, simplex3), oi)
    assert gi.d_tau_gap == 0 and gi.horo_payoff == 0
    with pytest.raises(MissingCertificate):
        gv_gap(est, None, o)


def test_tau_bounds_converged_upper_is_zero(simplex2):
    o = iterate(ProjectiveLinear([[1, 1], [1, 2]]), [0.5, 0.5], simplex2, 60)
    tau_hat, tau_upper, _ = tau_bounds(o)
    assert tau_upper == 0 and tau_hat == 0


def test_paired_orbits_nonexpansive_simplex(simplex3):
    m = ProjectiveLinear(np.diag([3.0, 2.0, 1.0]))
    a = iterate(m, [0.2, 0.3, 0.5], simplex3, 30)
    b = iterate(m, [0.4, 0.4, 0.2], simplex3, 30)
    n = min(len(a), len(b))
    d = hilbert_distances(simplex3, a.points[:n], b.points[:n])
    assert np.all(np.diff(d) <= 1e-9)
