import numpy as np
import pytest

from flagmetric import (
    BallDomain,
    MatrixBallDomain,
    NotDualConvexAt,
    NotProper,
    OracleDomain,
    ParametricMatrixBall,
    ParametricPolarBall,
    PDConeDomain,
    PDConePairing,
    PolytopeDomain,
    SampleCloud,
    ValidationError,
    boundary_sample,
    dual_convexity_certificate,
    dual_membership_certificate,
    dual_of,
    lshape_domain,
    plucker_lift,
    properness_certificate,
    smat,
    spanning_basis,
    standard_chart,
    svec,
)
from flagmetric.domains import ExplicitVertices, _dual_point_from_covector

RNG = np.random.default_rng(20240821)


def square():
    return PolytopeDomain([[1, 1], [1, -1], [-1, 1], [-1, -1]])


def unit_disk():
    return BallDomain(center=[0.0, 0.0], radius=1.0)


# ---------------------------------------------------------------------------
# vectorization helpers

def test_svec_smat_roundtrip_and_inner_product():
    for _ in range(20):
        d = int(RNG.integers(2, 6))
        a = RNG.standard_normal((d, d))
        a = 0.5 * (a + a.T)
        b = RNG.standard_normal((d, d))
        b = 0.5 * (b + b.T)
        assert np.allclose(smat(svec(a), d), a, atol=1e-12)
        assert abs(svec(a) @ svec(b) - np.trace(a @ b)) < 1e-10


# ---------------------------------------------------------------------------
# charts

def test_chart_roundtrip_and_infinity():
    chart = standard_chart(4, 1)
    x = np.array([0.3, -0.7, 2.0])
    pt = chart.point(x)
    assert np.allclose(chart.coords(pt), x, atol=1e-12)
    eta = chart.dual_point_at_infinity()
    # the chart's finite points all pair nontrivially with eta
    assert abs(np.linalg.det(np.column_stack([pt.rep, eta.rep]))) > 0.1


def test_matrix_chart_roundtrip():
    dom = MatrixBallDomain(2, 3)
    x = RNG.uniform(-0.4, 0.4, size=(3, 2))
    assert np.allclose(dom.coords(dom.point(x)), x, atol=1e-10)


# ---------------------------------------------------------------------------
# domain membership

def test_square_membership_and_margin():
    dom = square()
    assert dom.contains([0.0, 0.0])
    assert dom.contains([0.99, -0.99])
    assert not dom.contains([1.01, 0.0])
    assert not dom.contains([1.0, 0.0])  # boundary is excluded
    assert abs(dom.membership_margin([0.6, 0.0]) - 0.4) < 1e-12
    pts = RNG.uniform(-1.5, 1.5, size=(200, 2))
    batch = dom.contains_batch(pts)
    assert all(batch[i] == dom.contains(pts[i]) for i in range(len(pts)))


def test_degenerate_polytope_rejected():
    with pytest.raises(ValidationError):
        PolytopeDomain([[0, 0], [1, 1], [2, 2]])  # collinear


def test_ball_membership_and_margin():
    dom = BallDomain(center=[0.5, -0.5], radius=2.0,
                     shape=[[2.0, 0.3], [0.3, 1.0]])
    assert dom.contains(dom.basepoint)
    lo, hi = dom.bbox
    pts = RNG.uniform(lo, hi, size=(300, 2))
    for p in pts[:50]:
        z = p - dom.center
        inside = z @ dom.shape_matrix @ z < 4.0
        assert dom.contains(p) == inside
    assert abs(dom.membership_margin(dom.center) - 2.0) < 1e-12


def test_matrix_ball_membership():
    dom = MatrixBallDomain(2, 2)
    assert dom.contains(np.zeros((2, 2)))
    assert dom.contains(0.7 * np.eye(2))
    assert not dom.contains(np.eye(2))
    x = RNG.standard_normal((2, 2))
    x *= 0.95 / np.linalg.norm(x, 2)
    assert dom.contains(x)
    assert abs(dom.membership_margin(x) - 0.05) < 1e-12


def test_pd_cone_membership_scale_invariant():
    dom = PDConeDomain(3)
    a = RNG.standard_normal((3, 3))
    spd = a @ a.T + 0.1 * np.eye(3)
    assert dom.contains(spd)
    assert dom.contains(17.0 * spd)  # cone directions, not matrices
    ind = np.diag([1.0, 1.0, -0.5])
    assert not dom.contains(ind)
    assert dom.membership_margin(spd) > 0


def test_lshape_membership():
    dom = lshape_domain()
    assert dom.contains([-0.5, -0.5])
    assert dom.contains([-0.5, 0.5])
    assert dom.contains([0.5, -0.5])
    assert not dom.contains([0.5, 0.5])  # removed quadrant
    assert not dom.contains([0.0, 0.5])  # inner wall
    assert dom.contains([-1e-6, 0.5])


def test_interior_sampling_respects_membership():
    for dom in (square(), unit_disk(), lshape_domain(), MatrixBallDomain(2, 2),
                PDConeDomain(3)):
        pts = dom.sample_interior(np.random.default_rng(3), 64)
        assert len(pts) == 64
        assert dom.contains_batch(pts).all()


# ---------------------------------------------------------------------------
# dual representations

def test_square_dual_vertices():
    dual = dual_of(square())
    assert isinstance(dual, ExplicitVertices)
    assert dual.size == 4
    # facet functionals of the square, unit-normalized, positive inside
    s = 1.0 / np.sqrt(2.0)
    expect = [(s, -s, 0.0), (s, s, 0.0), (s, 0.0, -s), (s, 0.0, s)]
    for want in expect:
        assert any(np.allclose(c, want, atol=1e-9) for c in dual.covectors)
    vals = dual.evaluate([0.3, -0.2])
    assert np.all(vals > 0)


def test_disk_dual_is_polar_ball():
    dom = unit_disk()
    dual = dual_of(dom)
    assert isinstance(dual, ParametricPolarBall)
    # u = e1 gives the tangent line x1 = -1
    cov = dual.covector(np.array([1.0, 0.0]))
    assert np.allclose(cov, [1.0, 1.0, 0.0], atol=1e-12)
    # every parameter in the closed unit ball is a certified dual point
    for _ in range(10):
        u = RNG.uniform(-1, 1, size=2)
        u *= RNG.uniform(0, 1) / max(np.linalg.norm(u), 1e-9)
        cert = dual_membership_certificate(dual.dual_point(u), dom)
        assert cert.valid and cert.margin > 0


def test_polar_ball_values_match_covectors():
    dom = BallDomain(center=[0.2, -0.1], radius=1.5,
                     shape=[[1.5, 0.2], [0.2, 0.8]])
    dual = dual_of(dom)
    for _ in range(10):
        u = RNG.uniform(-1, 1, size=2)
        u /= max(np.linalg.norm(u), 1.0)
        x = dom.sample_interior(RNG, 1)[0]
        direct = dual.covector(u) @ np.append(1.0, x)
        assert abs(dual.values(u[None], x)[0] - direct) < 1e-12


def test_matrix_ball_dual_values_are_determinants():
    dom = MatrixBallDomain(2, 2)
    dual = dual_of(dom)
    assert isinstance(dual, ParametricMatrixBall)
    for _ in range(10):
        x = RNG.standard_normal((2, 2))
        x *= 0.8 / np.linalg.norm(x, 2)
        y = RNG.standard_normal((2, 2))
        y *= 0.9 / np.linalg.norm(y, 2)
        got = dual.values(y.ravel()[None], x)[0]
        assert abs(got - np.linalg.det(np.eye(2) - x @ y.T)) < 1e-12


def test_pd_cone_dual_functionals():
    dom = PDConeDomain(3)
    dual = dual_of(dom)
    assert isinstance(dual, PDConePairing)
    x = np.diag([0.5, 0.3, 0.2])
    v = np.array([1.0, 2.0, -1.0])
    v /= np.linalg.norm(v)
    assert abs(dual.values(v[None], x)[0] - v @ x @ v) < 1e-12
    cert = dual_membership_certificate(dual.dual_point(v), dom)
    assert cert.valid and cert.margin > 0


def test_lshape_dual_cloud():
    dom = lshape_domain()
    dual = dual_of(dom)
    assert isinstance(dual, SampleCloud)
    assert dual.size >= 256
    assert np.all(dual.margins > 0)
    assert np.all(dual.evaluate(dom.basepoint) > 0)
    # the notch line x1 + x2 = 1.5 misses the domain
    xi = _dual_point_from_covector(dom.chart, np.array([1.5, -1.0, -1.0]))
    cert = dual_membership_certificate(xi, dom)
    assert cert.valid and cert.margin > 0


def test_parametric_gradients_match_finite_differences():
    h = 1e-6
    disk = BallDomain(center=[0.1, 0.2], radius=1.2)
    mb = MatrixBallDomain(2, 2)
    pdc = PDConeDomain(3)
    cases = []
    cases.append((ParametricPolarBall(disk), RNG.uniform(-0.5, 0.5, size=2),
                  np.array([0.3, 0.2]), np.array([-0.4, 0.5])))
    xm = RNG.standard_normal((2, 2))
    xm *= 0.6 / np.linalg.norm(xm, 2)
    ym = RNG.standard_normal((2, 2))
    ym *= 0.5 / np.linalg.norm(ym, 2)
    cases.append((ParametricMatrixBall(mb), 0.5 * RNG.standard_normal(4),
                  xm, ym))
    a = RNG.standard_normal((3, 3))
    xp = a @ a.T + 0.5 * np.eye(3)
    b = RNG.standard_normal((3, 3))
    yp = b @ b.T + 0.5 * np.eye(3)
    cases.append((PDConePairing(pdc), RNG.standard_normal(3), xp, yp))
    for rep, u, xc, yc in cases:
        u = np.asarray(u, dtype=float)
        g0, grad = rep.logratio_value_grad(u[None], xc, yc)
        num = np.zeros_like(u)
        for i in range(u.size):
            up, um = u.copy(), u.copy()
            up[i] += h
            um[i] -= h
            gp, _ = rep.logratio_value_grad(up[None], xc, yc)
            gm, _ = rep.logratio_value_grad(um[None], xc, yc)
            num[i] = (gp[0] - gm[0]) / (2 * h)
        assert np.allclose(grad[0], num, rtol=1e-5, atol=1e-7), rep.kind


# ---------------------------------------------------------------------------
# membership certificates

def test_coordinate_axis_crosses_square():
    dom = square()
    xi = _dual_point_from_covector(dom.chart, np.array([0.0, 1.0, 0.0]))
    cert = dual_membership_certificate(xi, dom)
    assert not cert.valid
    assert "zero_at" in cert.witness or "negative_at" in cert.witness
    if "zero_at" in cert.witness:
        assert abs(cert.witness["zero_at"][0]) < 1e-9


def test_distant_line_misses_square_with_expected_margin():
    dom = square()
    cov = np.array([2.0, 1.0, 0.0])  # zero set is x1 = -2
    xi = _dual_point_from_covector(dom.chart, cov)
    cert = dual_membership_certificate(xi, dom)
    assert cert.valid
    # oracle: min over shrunk vertices of |cov.(1,x)| / (|cov| |(1,x)|)
    vs = 0.999 * dom.vertices
    lifts = np.column_stack([np.ones(4), vs])
    expect = np.min(np.abs(lifts @ cov) / (np.linalg.norm(cov) *
                                           np.linalg.norm(lifts, axis=1)))
    assert abs(cert.margin - expect) < 1e-12


def test_pd_cone_membership_certificates():
    dom = PDConeDomain(2)
    from flagmetric.domains import _dual_point_from_ambient_covector
    ok = _dual_point_from_ambient_covector(svec(np.eye(2)))
    cert = dual_membership_certificate(ok, dom)
    assert cert.valid and cert.margin > 0
    bad = _dual_point_from_ambient_covector(svec(np.diag([1.0, -1.0])))
    cert = dual_membership_certificate(bad, dom)
    assert not cert.valid
    z = cert.witness["zero_at"]
    assert np.linalg.eigvalsh(z)[0] >= -1e-12
    assert abs(np.trace(z @ np.diag([1.0, -1.0]))) < 1e-9


def test_line_through_lshape_detected():
    dom = lshape_domain()
    xi = _dual_point_from_covector(dom.chart, np.array([1.0, 0.9, 0.9]))
    cert = dual_membership_certificate(xi, dom)
    assert not cert.valid


# ---------------------------------------------------------------------------
# properness

def test_bounded_domains_certify_proper():
    for dom in (square(), unit_disk(), MatrixBallDomain(2, 2), PDConeDomain(3),
                lshape_domain()):
        cert = properness_certificate(dom)
        assert cert.valid, dom.variant
        assert cert.margin > 0


def test_strip_fails_properness():
    half = 1e4

    def inside(x):
        return abs(x[0]) < half and abs(x[1]) < 1.0

    strip = OracleDomain(inside, (np.array([-half, -1.0]), np.array([half, 1.0])),
                         basepoint=np.zeros(2), name="strip")
    assert not properness_certificate(strip).valid
    with pytest.raises(NotProper):
        dual_of(strip)


# ---------------------------------------------------------------------------
# boundary sampling

def test_square_boundary_sample_hits_walls_and_corners():
    dom = square()
    pts = boundary_sample(dom, 8, seed=0)
    expect = [(1, 0), (1, 1), (0, 1), (-1, 1), (-1, 0), (-1, -1), (0, -1), (1, -1)]
    for got, want in zip(pts, expect):
        assert np.allclose(got, want, atol=1e-8)


def test_boundary_points_straddle_membership():
    for dom in (unit_disk(), MatrixBallDomain(2, 2), PDConeDomain(3)):
        base = dom.basepoint
        for p in boundary_sample(dom, 6, seed=1):
            assert dom.contains(base + 0.999 * (p - base))
            assert not dom.contains(base + 1.001 * (p - base))


def test_boundary_samples_stay_inside():
    # the samples must land on the inside of the wall: divergence profiles
    # march segments all the way to them and every waypoint has to be a
    # legal metric argument
    for dom in (square(), unit_disk(), lshape_domain()):
        rng = np.random.default_rng(9)
        for seed in rng.integers(0, 10**6, size=5):
            for count in (4, 5, 6, 7, 8):
                for p in boundary_sample(dom, count, seed=int(seed)):
                    assert dom.contains(p)


# ---------------------------------------------------------------------------
# supporting dual points at the boundary

def test_square_boundary_support_certificates():
    dom = square()
    for p in boundary_sample(dom, 12, seed=2):
        cert = dual_convexity_certificate(dom, p)
        assert cert.valid
        assert cert.witness["pairing_at_point"] < 1e-10
        assert cert.margin > 0


def test_disk_boundary_support_certificates():
    dom = BallDomain(center=[0.3, 0.0], radius=0.8)
    for p in boundary_sample(dom, 8, seed=3):
        cert = dual_convexity_certificate(dom, p)
        assert cert.valid
        assert cert.witness["pairing_at_point"] < 1e-10


def test_matrix_ball_boundary_support():
    dom = MatrixBallDomain(2, 2)
    for p in boundary_sample(dom, 4, seed=4):
        cert = dual_convexity_certificate(dom, p)
        assert cert.valid
        assert cert.witness["pairing_at_point"] < 1e-10


def test_pd_cone_boundary_support():
    dom = PDConeDomain(3)
    for p in boundary_sample(dom, 4, seed=5):
        cert = dual_convexity_certificate(dom, p)
        assert cert.valid
        assert cert.witness["pairing_at_point"] < 1e-10


def test_lshape_flat_wall_supported():
    dom = lshape_domain()
    cert = dual_convexity_certificate(dom, [-1.0, 0.3])
    assert cert.valid
    cert = dual_convexity_certificate(dom, [0.5, -1.0])
    assert cert.valid


def test_lshape_reflex_corner_not_supported():
    dom = lshape_domain()
    with pytest.raises(NotDualConvexAt):
        dual_convexity_certificate(dom, [0.0, 0.0])
    with pytest.raises(NotDualConvexAt):
        dual_convexity_certificate(dom, [0.0, 0.5])


# ---------------------------------------------------------------------------
# spanning bases

def test_spanning_basis_counts():
    assert len(spanning_basis(dual_of(square()))) == 3
    interval = PolytopeDomain([[-1.0], [1.0]])
    assert len(spanning_basis(dual_of(interval))) == 2
    assert len(spanning_basis(dual_of(unit_disk()))) == 3
    assert len(spanning_basis(dual_of(PDConeDomain(2)))) == 3
    assert len(spanning_basis(dual_of(MatrixBallDomain(2, 2)))) == 6


def test_spanning_basis_gram_is_solid():
    pts = spanning_basis(dual_of(square()))
    lifts = np.array([plucker_lift(p) for p in pts])
    lifts /= np.linalg.norm(lifts, axis=1, keepdims=True)
    assert abs(np.linalg.det(lifts @ lifts.T)) > 1e-3


# ---------------------------------------------------------------------------
# polarity is an involution for centered polygons

def test_double_polar_returns_square_vertices():
    dom = square()
    dual = dual_of(dom)
    polar_verts = np.array([-c[1:] / c[0] for c in dual.covectors])
    diamond = PolytopeDomain(polar_verts)
    dual2 = dual_of(diamond)
    back = np.array([-c[1:] / c[0] for c in dual2.covectors])
    got = {tuple(np.round(v, 9)) for v in back}
    want = {tuple(map(float, v)) for v in dom.vertices}
    assert got == want


def test_double_polar_random_centered_polygons():
    for trial in range(5):
        rng = np.random.default_rng(100 + trial)
        k = int(rng.integers(5, 9))
        ang = np.sort(rng.uniform(0, 2 * np.pi, size=k))
        rad = rng.uniform(0.5, 2.0, size=k)
        verts = np.column_stack([rad * np.cos(ang), rad * np.sin(ang)])
        dom = PolytopeDomain(verts)
        dual = dual_of(dom)
        polar_verts = np.array([-c[1:] / c[0] for c in dual.covectors])
        dual2 = dual_of(PolytopeDomain(polar_verts))
        back = np.array([-c[1:] / c[0] for c in dual2.covectors])
        got = sorted(map(tuple, np.round(back, 8)))
        want = sorted(map(tuple, np.round(dom.vertices, 8)))
        assert got == want
