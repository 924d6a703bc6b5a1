import math

import numpy as np
import pytest

from flagmetric import (
    BallDomain,
    MatrixBallDomain,
    NotAnAutomorphism,
    OptimizerConfig,
    OutsideDomain,
    PDConeDomain,
    PolytopeDomain,
    ValidationError,
    caratheodory_metric,
    completeness_probe,
    evaluate_dual_pair,
    hilbert_metric_line,
    invariance_check,
    kobayashi_c,
    kobayashi_k,
    lshape_domain,
)

RNG = np.random.default_rng(20240822)


def square():
    return PolytopeDomain([[1, 1], [1, -1], [-1, 1], [-1, -1]])


def unit_disk():
    return BallDomain(center=[0.0, 0.0], radius=1.0)


def random_polygon(rng, k=None):
    k = k or int(rng.integers(4, 9))
    ang = np.sort(rng.uniform(0, 2 * np.pi, size=k))
    rad = rng.uniform(0.5, 2.0, size=k)
    verts = np.column_stack([rad * np.cos(ang), rad * np.sin(ang)])
    return PolytopeDomain(verts + rng.uniform(-0.3, 0.3, size=2))


# ---------------------------------------------------------------------------
# frozen values

def test_interval_half_log_three():
    interval = PolytopeDomain([[-1.0], [1.0]])
    got = caratheodory_metric(interval, [0.0], [0.5])
    assert abs(got.value - 0.5 * math.log(3.0)) < 1e-12
    assert got.error_bound == 0.0
    assert got.route == "exact"


def test_square_hilbert_log_three():
    h = hilbert_metric_line(square(), [0.0, 0.0], [0.5, 0.0])
    assert abs(h - math.log(3.0)) < 1e-12


def test_pd_cone_half_log_two():
    dom = PDConeDomain(2)
    x = np.eye(2) / 2.0
    y = np.diag([2.0, 1.0]) / 3.0
    got = caratheodory_metric(dom, x, y)
    assert abs(got.value - 0.5 * math.log(2.0)) < 1e-8


def test_disk_radial_profile():
    dom = unit_disk()
    for t in (0.1, 0.3, 0.5, 0.7, 0.9):
        got = caratheodory_metric(dom, [0.0, 0.0], [t, 0.0])
        want = 0.5 * math.log((1 + t) / (1 - t))
        assert abs(got.value - want) < 1e-6, t
        assert got.route == "optimized"


def test_matrix_ball_from_origin_closed_form():
    # from the origin the cross-ratio supremum splits over singular values
    dom = MatrixBallDomain(2, 2)
    for _ in range(5):
        x = RNG.standard_normal((2, 2))
        x *= RNG.uniform(0.3, 0.9) / np.linalg.norm(x, 2)
        sig = np.linalg.svd(x, compute_uv=False)
        want = sum(math.log((1 + s) / (1 - s)) for s in sig)
        got = caratheodory_metric(dom, np.zeros((2, 2)), x, convention="full")
        assert abs(got.value - want) < 1e-6


# ---------------------------------------------------------------------------
# metric axioms

def test_coincident_points_give_zero():
    dom = square()
    got = caratheodory_metric(dom, [0.2, -0.3], [0.2, -0.3])
    assert got.value == 0.0 and got.error_bound == 0.0


def test_outside_point_raises():
    with pytest.raises(OutsideDomain):
        caratheodory_metric(square(), [0.0, 0.0], [1.5, 0.0])
    with pytest.raises(OutsideDomain):
        hilbert_metric_line(square(), [2.0, 0.0], [0.0, 0.0])


def test_exact_symmetry_all_routes():
    doms = [square(), unit_disk(), PDConeDomain(2), lshape_domain()]
    for dom in doms:
        pts = dom.sample_interior(np.random.default_rng(5), 6)
        for i in range(0, 6, 2):
            d1 = caratheodory_metric(dom, pts[i], pts[i + 1])
            d2 = caratheodory_metric(dom, pts[i + 1], pts[i])
            assert d1.value == d2.value, dom.variant


def test_triangle_inequality_exact_route():
    dom = random_polygon(np.random.default_rng(11))
    pts = dom.sample_interior(np.random.default_rng(12), 30)
    for i in range(0, 30, 3):
        x, y, z = pts[i], pts[i + 1], pts[i + 2]
        dxy = caratheodory_metric(dom, x, y).value
        dyz = caratheodory_metric(dom, y, z).value
        dxz = caratheodory_metric(dom, x, z).value
        assert dxz <= dxy + dyz + 1e-12
        if not np.allclose(x, y):
            assert dxy > 0


def test_triangle_inequality_optimized_route():
    dom = unit_disk()
    cfg = OptimizerConfig(starts=32, seed=3)
    pts = dom.sample_interior(np.random.default_rng(13), 12)
    for i in range(0, 12, 3):
        x, y, z = pts[i], pts[i + 1], pts[i + 2]
        vxy = caratheodory_metric(dom, x, y, config=cfg)
        vyz = caratheodory_metric(dom, y, z, config=cfg)
        vxz = caratheodory_metric(dom, x, z, config=cfg)
        slack = vxy.value + vyz.value - vxz.value
        budget = 2 * (vxy.error_bound + vyz.error_bound + vxz.error_bound)
        assert slack >= -budget - 1e-9


def test_maximizer_matches_kernel_cross_ratio():
    dom = square()
    pts = dom.sample_interior(np.random.default_rng(14), 8)
    for i in range(0, 8, 2):
        got = caratheodory_metric(dom, pts[i], pts[i + 1])
        xi, eta = got.maximizer
        via_kernel = evaluate_dual_pair(dom, pts[i], pts[i + 1], xi, eta)
        assert abs(via_kernel - got.value) < 1e-9
    disk = unit_disk()
    got = caratheodory_metric(disk, [0.1, 0.2], [-0.4, 0.3])
    xi, eta = got.maximizer
    via_kernel = evaluate_dual_pair(disk, [0.1, 0.2], [-0.4, 0.3], xi, eta)
    assert abs(via_kernel - got.value) < 1e-6


# ---------------------------------------------------------------------------
# agreement between constructions

def test_polygon_doubled_metric_equals_hilbert():
    for trial in range(6):
        rng = np.random.default_rng(40 + trial)
        dom = random_polygon(rng)
        pts = dom.sample_interior(rng, 10)
        for i in range(0, 10, 2):
            c = caratheodory_metric(dom, pts[i], pts[i + 1]).value
            h = hilbert_metric_line(dom, pts[i], pts[i + 1])
            assert abs(2 * c - h) < 1e-10


def test_disk_doubled_metric_equals_hilbert():
    dom = unit_disk()
    pts = dom.sample_interior(np.random.default_rng(15), 8)
    for i in range(0, 8, 2):
        c = caratheodory_metric(dom, pts[i], pts[i + 1]).value
        h = hilbert_metric_line(dom, pts[i], pts[i + 1])
        assert abs(2 * c - h) < 1e-5


def test_pd_cone_doubled_metric_equals_hilbert():
    dom = PDConeDomain(3)
    rng = np.random.default_rng(16)
    pts = dom.sample_interior(rng, 6)
    for i in range(0, 6, 2):
        c = caratheodory_metric(dom, pts[i], pts[i + 1]).value
        h = hilbert_metric_line(dom, pts[i], pts[i + 1])
        assert abs(2 * c - h) < 1e-6
        # the optimized value agrees with the spectral closed form
        from scipy.linalg import eigvalsh
        w = eigvalsh(pts[i + 1], pts[i])
        assert abs(2 * c - math.log(w[-1] / w[0])) < 1e-6


def test_interval_map_metric_doubles_the_half_value():
    for dom in (square(), unit_disk()):
        pts = dom.sample_interior(np.random.default_rng(17), 6)
        for i in range(0, 6, 2):
            c = caratheodory_metric(dom, pts[i], pts[i + 1]).value
            k = kobayashi_c(dom, pts[i], pts[i + 1])
            assert k.convention == "full"
            assert abs(k.value - 2 * c) < 1e-6


def test_chord_chain_matches_hilbert_on_convex():
    for dom in (square(), unit_disk()):
        pts = dom.sample_interior(np.random.default_rng(18), 6)
        for i in range(0, 6, 2):
            h = hilbert_metric_line(dom, pts[i], pts[i + 1])
            k = kobayashi_k(dom, pts[i], pts[i + 1], chain_depth=1)
            assert k.value <= h + 1e-12
            assert abs(k.value - h) < 1e-9


def test_chord_chain_routes_around_the_notch():
    dom = lshape_domain()
    x, y = [-0.6, 0.7], [0.7, -0.6]
    with pytest.raises(ValidationError):
        hilbert_metric_line(dom, x, y)
    k = kobayashi_k(dom, x, y, chain_depth=2, waypoints=32, seed=2)
    assert math.isfinite(k.value) and k.value > 0


# ---------------------------------------------------------------------------
# completeness probing

def test_square_probes_diverge():
    verdict = completeness_probe(square(), probes=4, steps=32)
    assert verdict.kind == "DivergesEverywhere"
    assert np.all(verdict.profiles[:, -1] >= 5.0)


def test_lshape_probe_escapes_at_reflex_corner():
    verdict = completeness_probe(lshape_domain(), probes=8, steps=40)
    assert verdict.kind == "CauchyEscape"
    i = verdict.witness_index
    # the escaping ray is the diagonal into the reflex corner
    assert np.allclose(verdict.boundary_points[i], [0.0, 0.0], atol=1e-7)
    assert verdict.sup_profile[i] < 3.0
    assert verdict.tail_oscillation[i] < 1e-3


# ---------------------------------------------------------------------------
# invariance

def rotation3(theta):
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[1.0, 0, 0], [0, c, -s], [0, s, c]])


def boost3(t):
    c, s = np.cosh(t), np.sinh(t)
    return np.array([[c, s, 0], [s, c, 0], [0, 0, 1.0]])


def test_disk_rotation_invariance():
    dom = unit_disk()
    pairs = [(p, q) for p, q in
             zip(dom.sample_interior(np.random.default_rng(20), 5),
                 dom.sample_interior(np.random.default_rng(21), 5))]
    rep = invariance_check(dom, rotation3(0.7), pairs)
    assert rep.max_deviation < 1e-6


def test_disk_boost_invariance():
    dom = unit_disk()
    pairs = [(p, q) for p, q in
             zip(dom.sample_interior(np.random.default_rng(22), 5),
                 dom.sample_interior(np.random.default_rng(23), 5))]
    rep = invariance_check(dom, boost3(0.8), pairs)
    assert rep.max_deviation < 1e-5


def test_triangle_diagonal_invariance_is_exact():
    # positive diagonal scalings of barycentric coordinates preserve the
    # triangle; conjugate into the chart to get the ambient matrix
    tri = PolytopeDomain([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
    to_bary = np.array([[1.0, -1.0, -1.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
    from_bary = np.array([[1.0, 1.0, 1.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
    mat = from_bary @ np.diag([1.0, 2.5, 0.7]) @ to_bary
    inner = PolytopeDomain([[0.2, 0.2], [0.5, 0.2], [0.2, 0.5]])
    pts = inner.sample_interior(np.random.default_rng(24), 8)
    pairs = [(pts[i], pts[i + 1]) for i in range(0, 8, 2)]
    assert all(tri.contains(p) and tri.contains(q) for p, q in pairs)
    rep = invariance_check(tri, mat, pairs)
    assert rep.max_deviation < 1e-10


def test_translation_is_not_an_automorphism():
    dom = unit_disk()
    shift = np.array([[1.0, 0, 0], [0.9, 1.0, 0], [0, 0, 1.0]])
    pairs = [(np.array([0.7, 0.0]), np.array([0.0, 0.0]))]
    with pytest.raises(NotAnAutomorphism):
        invariance_check(dom, shift, pairs)
