"""Heavenly metric, null coframe, connection extraction, curvature type."""

import math

import numpy as np
import pytest

from startorus import (
    FRAME_METRIC,
    MetricField,
    SingularMetricError,
    ThetaDerivatives,
    admissible_points,
    cartan_first,
    example_connection,
    example_metric,
    example_solution,
    example_tetrad,
    example_theta,
    fd_theta_derivatives,
    hp_metric,
    metric_from_tetrad,
    pp_wave_check,
    weyl_c1,
    weyl_report,
    weyl_sample,
)

POINTS = admissible_points(20, seed=7)


def classical_scalar(pt):
    w, z, p, q = pt
    return example_solution(0.0).evaluate(w, z, p, q)


def test_fd_pack_matches_closed_pack():
    # cross differences carry eps/h^2 noise, so h = 1e-4 balances both terms
    closed = example_theta()
    fd = fd_theta_derivatives(classical_scalar, step=1e-4)
    for pt in POINTS[:5]:
        for name in ("d_w", "d_z", "d_pw", "d_qw", "d_pz", "d_qz"):
            a = getattr(closed, name)(pt)
            b = getattr(fd, name)(pt)
            assert abs(a - b) < 1e-6, (name, pt)


def test_metric_from_fd_derivatives_matches_example():
    fd = fd_theta_derivatives(classical_scalar, step=1e-4)
    for pt in POINTS[:5]:
        got = hp_metric(fd, pt).matrix
        want = example_metric(pt).matrix
        assert np.max(np.abs(got - want)) < 1e-6


def test_metric_shape_and_symmetry():
    g = example_metric((0.2, -0.4, 0.5, 0.1))
    assert g.matrix.shape == (4, 4)
    assert g.symmetry_defect() == 0.0
    assert g.point == (0.2, -0.4, 0.5, 0.1)
    with pytest.raises(ValueError):
        MetricField(np.eye(3), (0.0, 0.0, 0.0, 0.0))


def test_degenerate_bracket_raises_with_location():
    flat_pack = ThetaDerivatives(
        d_w=lambda pt: 1.0,
        d_z=lambda pt: 1.0,
        d_pw=lambda pt: 0.0,
        d_qw=lambda pt: 0.0,
        d_pz=lambda pt: 0.0,
        d_qz=lambda pt: 0.0,
    )
    with pytest.raises(SingularMetricError) as err:
        hp_metric(flat_pack, (0.1, 0.2, 0.3, 0.4))
    assert err.value.location == (0.1, 0.2, 0.3, 0.4)


def test_tetrad_reconstructs_metric():
    frame = example_tetrad()
    worst = 0.0
    for pt in POINTS:
        gap = np.max(np.abs(metric_from_tetrad(frame, pt).matrix - example_metric(pt).matrix))
        worst = max(worst, float(gap))
    assert worst <= 1e-10, worst


def test_frame_metric_contracts_the_coframe():
    # e^T eta e must equal the explicit 2 e1e2 + 2 e3e4 assembly
    frame = example_tetrad()
    for pt in POINTS[:5]:
        e = frame.at(pt)
        g = e.T @ FRAME_METRIC @ e
        assert np.max(np.abs(g - metric_from_tetrad(frame, pt).matrix)) < 1e-14
    assert np.array_equal(FRAME_METRIC, FRAME_METRIC.T)
    assert np.array_equal(FRAME_METRIC @ FRAME_METRIC, np.eye(4))


def test_tetrad_branch_locus_raises():
    frame = example_tetrad()
    with pytest.raises(SingularMetricError):
        frame.at((0.0, 0.0, 0.0, np.pi / 2))
    with pytest.raises(SingularMetricError):
        frame.at((0.0, 0.0, np.pi / 2, 0.0))  # second cosine vanishes
    # a negative cosine is fine for the frame, only near-zero is excluded
    frame.at((0.0, 0.0, np.pi, 0.0))


def test_cartan_solve_is_consistent():
    frame = example_tetrad()
    for pt in POINTS[:5]:
        res = cartan_first(frame, pt, step=1e-3)
        assert res.solve_residual < 1e-12
        # de is a 2-form in the lower indices
        assert np.max(np.abs(res.de + np.transpose(res.de, (0, 2, 1)))) == 0.0


def test_extracted_connection_matches_closed_form():
    frame = example_tetrad()
    for pt in POINTS[:5]:
        got = cartan_first(frame, pt, step=1e-3).conn
        want = example_connection(pt)
        worst = max(
            float(np.max(np.abs(got.get(a, b) - want.get(a, b))))
            for a in range(1, 5)
            for b in range(1, 5)
        )
        assert worst < 1e-4, (pt, worst)


def test_closed_connection_solves_structure_equation():
    # de^a = -Gamma^a_b ^ e^b with the frame index raised by FRAME_METRIC
    frame = example_tetrad()
    pt = POINTS[0]
    de = cartan_first(frame, pt, step=1e-3).de
    e = frame.at(pt)
    conn = example_connection(pt)
    for a in range(4):
        rhs = np.zeros((4, 4))
        for c in range(4):
            eta = FRAME_METRIC[a, c]
            if eta == 0.0:
                continue
            for b in range(4):
                gamma = eta * conn.get(c + 1, b + 1)
                rhs -= np.outer(gamma, e[b]) - np.outer(e[b], gamma)
        assert np.max(np.abs(de[a] - rhs)) < 1e-4


def test_closed_connection_dotted_part_vanishes_exactly():
    for pt in POINTS[:5]:
        assert example_connection(pt).dotted_defect() == 0.0


def test_weyl_c1_origin_value():
    assert weyl_c1((0.0, 0.0, 0.0, 0.0)) == 8.0


def test_weyl_report_single_component():
    rep = weyl_report(POINTS[:8], step=1e-3)
    assert rep.max_c1_rel_err <= 1e-4
    assert rep.max_other_rel_norm < 1e-3
    assert rep.max_dotted_norm < 1e-4
    assert rep.single_component_type
    d = rep.to_dict()
    assert d["single_component_type"] is True
    assert len(d["samples"]) == 8


def test_weyl_error_shrinks_with_step():
    pt = POINTS[1]
    coarse = weyl_sample(pt, step=1e-3).c1_rel_err
    fine = weyl_sample(pt, step=5e-4).c1_rel_err
    assert fine < 0.5 * coarse


def test_weyl_closed_connection_route():
    pt = POINTS[2]
    s = weyl_sample(pt, step=1e-3, extracted=False)
    assert s.dotted_norm == 0.0
    assert s.c1_rel_err < 1e-4
    assert abs(weyl_sample((0.0, 0.0, 0.0, 0.0), extracted=False).c1_estimate - 8.0) < 1e-3


def test_pp_wave_pullback():
    worst = max(pp_wave_check(pt) for pt in admissible_points(50, seed=3))
    assert worst <= 1e-10, worst


def test_pp_wave_needs_positive_branch():
    with pytest.raises(SingularMetricError):
        pp_wave_check((0.0, 0.0, np.pi, 0.0))


def test_admissible_points_deterministic_and_margined():
    a = admissible_points(12, seed=5)
    b = admissible_points(12, seed=5)
    assert a == b
    assert len(a) == 12
    for w, z, p, q in a:
        assert math.cos(q) >= 0.3
        assert math.cos(z * math.cos(q) + p) >= 0.3
        assert -1.0 <= w <= 1.0 and -1.0 <= z <= 1.0
    assert admissible_points(3, seed=5) != admissible_points(3, seed=6)
