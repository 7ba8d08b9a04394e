import dataclasses

import numpy as np
import pytest

from hilbert_dyn.config import parse_config
from hilbert_dyn.conjecture import (ReportConfig, attractor_face, conjecture_report, limit_set, report_to_dict,
                                    star_witness)
from hilbert_dyn.dynamics import iterate
from hilbert_dyn.errors import NotEscaping
from hilbert_dyn.geometry import ExposedPoint, PolytopeFace, segment_in_boundary
from hilbert_dyn.maps import KleinProjective, ProjectiveLinear, klein_boost, rotation_2d
from hilbert_dyn.metric import HALF
from hilbert_dyn.suites import benchmark_suite, dim2_suite

PERRON = np.array([(3 - np.sqrt(5)) / 2, (np.sqrt(5) - 1) / 2])


def test_limit_set_examples(simplex2, simplex3, disk):
    o = iterate(ProjectiveLinear([[2, 0], [0, 1]]), [0.5, 0.5], simplex2, 200)
    (c,) = limit_set(o, simplex2)
    np.testing.assert_allclose(c, [1, 0], atol=1e-6)
    o = iterate(ProjectiveLinear(np.diag([2.0, 2.0, 1.0])), [1 / 3] * 3, simplex3, 200)
    (c,) = limit_set(o, simplex3)
    np.testing.assert_allclose(c, [0.5, 0.5, 0], atol=1e-6)
    o = iterate(KleinProjective(klein_boost(0.5, [1, 0]), disk), [0, 0], disk, 200, HALF)
    (c,) = limit_set(o, disk)
    np.testing.assert_allclose(c, [1, 0], atol=1e-6)


def test_limit_set_rejects_bounded(simplex2):
    o = iterate(ProjectiveLinear([[1, 1], [1, 2]]), [0.5, 0.5], simplex2, 60)
    with pytest.raises(NotEscaping):
        limit_set(o, simplex2)


def test_attractor_face_examples(simplex3, disk):
    face, single = attractor_face([np.array([0.5, 0.5, 0.0])], simplex3)
    assert single and isinstance(face, PolytopeFace)
    assert {tuple(v) for v in face.vertices} == {(1.0, 0.0, 0.0), (0.0, 1.0, 0.0)}
    face, single = attractor_face([np.array([1.0, 0.0])], disk)
    assert single and isinstance(face, ExposedPoint)
    # two vertices of one edge lie in that closed edge
    face, single = attractor_face([np.array([1.0, 0, 0]), np.array([0, 1.0, 0])], simplex3)
    assert single and set(face.active) == {2}
    # all three vertices: no proper closed face contains them
    face, single = attractor_face([np.eye(3)[0], np.eye(3)[1], np.eye(3)[2]], simplex3)
    assert not single


def test_star_witness_examples(disk, simplex3, square):
    np.testing.assert_allclose(star_witness([np.array([1.0, 0.0])], disk), [1, 0])
    z = star_witness([np.array([0.5, 0.5, 0.0])], simplex3)
    assert z is not None and segment_in_boundary(simplex3, z, [0.5, 0.5, 0.0])
    clusters = [np.array([1.0, 0.5]), np.array([0.5, 1.0])]
    z = star_witness(clusters, square)
    np.testing.assert_allclose(z, [1, 1])
    assert all(segment_in_boundary(square, z, c) for c in clusters)


def test_report_examples(simplex2, disk):
    rep = conjecture_report(ProjectiveLinear([[2, 0], [0, 1]]), simplex2, [0.5, 0.5])
    assert rep.verdict == "SingleFace"
    assert {tuple(v) for v in rep.limit.face.vertices} == {(1.0, 0.0)}
    assert rep.estimates.tau_hat == pytest.approx(np.log(2), abs=1e-6)
    rep = conjecture_report(ProjectiveLinear([[1, 1], [1, 2]]), simplex2, [0.5, 0.5])
    assert rep.verdict == "FixedPoint"
    np.testing.assert_allclose(rep.limit.clusters[0], PERRON, atol=1e-9)
    cfg = ReportConfig(conv=HALF)
    rep = conjecture_report(KleinProjective(rotation_2d(np.sqrt(2)), disk), disk, [0, 0], cfg)
    assert rep.verdict == "FixedPoint"


def test_report_dict_fields(simplex2):
    rep = conjecture_report(ProjectiveLinear([[2, 0], [0, 1]]), simplex2, [0.5, 0.5])
    d = report_to_dict(rep)
    for key in ("clusters", "face", "single_face", "star_witness", "beardon_point", "verdict", "gromov_sup",
                "estimates", "certificate_slack", "provenance"):
        assert key in d
    assert d["provenance"]["seed"] == 0 and "tolerances" in d["provenance"]


@pytest.mark.parametrize("raw", dim2_suite(0), ids=lambda r: r["map_id"])
def test_dim2_verdicts(raw):
    cfg = parse_config(raw)
    rep = conjecture_report(cfg.map, cfg.body, cfg.start, cfg.report)
    assert rep.verdict in ("FixedPoint", "SingleFace")
    if rep.verdict == "StarOnly":
        assert rep.limit.star_witness is not None
        assert all(segment_in_boundary(cfg.body, rep.limit.star_witness, c) for c in rep.limit.clusters)


@pytest.mark.parametrize("raw", [r for r in benchmark_suite(0) if r["map"]["type"] == "projective_linear"],
                         ids=lambda r: r["map_id"])
def test_projective_linear_clusters_stable(raw):
    cfg = parse_config(raw)
    r1 = conjecture_report(cfg.map, cfg.body, cfg.start, dataclasses.replace(cfg.report, max_iter=200))
    r2 = conjecture_report(cfg.map, cfg.body, cfg.start, dataclasses.replace(cfg.report, max_iter=400))
    assert len(r1.limit.clusters) == len(r2.limit.clusters) < 10
