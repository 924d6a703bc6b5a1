"""Proper domains in affine charts, their dual domains, and certificates.

A domain is an open, bounded, connected subset of an affine chart of a
projective space or Grassmannian.  Each variant knows its membership test
in chart coordinates and how to produce a representation of its dual
domain (the hyperplane-type points whose zero set misses the domain).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.optimize import minimize as _nm_minimize
from scipy.spatial import ConvexHull, QhullError

from .errors import (
    DimensionMismatch,
    NotDualConvexAt,
    NotProper,
    OutsideDomain,
    RankDeficient,
    SpanningFailure,
    ValidationError,
)
from .geometry import (
    DEFAULT_TOL,
    DualGrassmannPoint,
    GrassmannPoint,
    Tolerances,
    canonicalize,
    plucker_lift,
)

# ---------------------------------------------------------------------------
# symmetric-matrix vectorization (inner-product preserving)

def sym_dim(d: int) -> int:
    return d * (d + 1) // 2


def svec(x: np.ndarray) -> np.ndarray:
    """Half-vectorization with sqrt(2) off-diagonal weights: <svec X, svec Y> = tr(XY)."""
    d = x.shape[-1]
    iu = np.triu_indices(d)
    w = np.where(iu[0] == iu[1], 1.0, math.sqrt(2.0))
    return x[..., iu[0], iu[1]] * w


def smat(v: np.ndarray, d: int) -> np.ndarray:
    iu = np.triu_indices(d)
    w = np.where(iu[0] == iu[1], 1.0, 1.0 / math.sqrt(2.0))
    out = np.zeros(v.shape[:-1] + (d, d))
    out[..., iu[0], iu[1]] = v * w
    lower = np.swapaxes(out, -1, -2).copy()
    idx = np.arange(d)
    lower[..., idx, idx] = 0.0
    return out + lower


# ---------------------------------------------------------------------------
# charts

class ChartSpec:
    """An affine chart of Gr_p(R^n), determined by the dual point at infinity.

    The frame is an orthogonal n x n matrix whose last n - p columns span
    the plane at infinity; a chart point with graph coordinate X is the
    column span of frame @ [I_p; X].
    """

    def __init__(self, frame: np.ndarray, plane_dim: int = 1):
        frame = np.asarray(frame, dtype=float)
        if frame.ndim != 2 or frame.shape[0] != frame.shape[1]:
            raise ValidationError("chart frame must be square")
        n = frame.shape[0]
        if not 1 <= plane_dim < n:
            raise ValidationError(f"need 1 <= plane_dim < {n}")
        if not np.allclose(frame.T @ frame, np.eye(n), atol=1e-10):
            raise ValidationError("chart frame must be orthogonal")
        self.frame = frame
        self.plane_dim = plane_dim

    @property
    def ambient_dim(self) -> int:
        return self.frame.shape[0]

    @property
    def coord_shape(self) -> tuple:
        n, p = self.ambient_dim, self.plane_dim
        return (n - 1,) if p == 1 else (n - p, p)

    def dual_point_at_infinity(self) -> DualGrassmannPoint:
        return DualGrassmannPoint(np.ascontiguousarray(self.frame[:, self.plane_dim:]))

    def lift(self, coords: np.ndarray) -> np.ndarray:
        """Unnormalized n x p representative of the chart point."""
        n, p = self.ambient_dim, self.plane_dim
        x = np.asarray(coords, dtype=float).reshape(n - p, p)
        return self.frame @ np.vstack([np.eye(p), x])

    def point(self, coords: np.ndarray) -> GrassmannPoint:
        return canonicalize(self.lift(coords))

    def coords(self, point: GrassmannPoint) -> np.ndarray:
        """Graph coordinates of a point transverse to the plane at infinity."""
        n, p = self.ambient_dim, self.plane_dim
        if point.ambient_dim != n or point.plane_dim != p:
            raise DimensionMismatch("point does not live in this chart's space")
        m = self.frame.T @ point.rep
        a, b = m[:p], m[p:]
        if abs(np.linalg.det(a)) < 1e-12:
            raise RankDeficient("point lies at the chart's infinity")
        x = b @ np.linalg.inv(a)
        return x[:, 0] if p == 1 else x


def standard_chart(n: int, plane_dim: int = 1) -> ChartSpec:
    return ChartSpec(np.eye(n), plane_dim)


# ---------------------------------------------------------------------------
# domains

class Domain:
    """Base class: an open bounded subset of an affine chart."""

    variant = "abstract"

    def __init__(self, chart: ChartSpec):
        self.chart = chart
        self._dual = None
        self._properness = None
        self._cert_sample = None

    @property
    def ambient_dim(self) -> int:
        return self.chart.ambient_dim

    @property
    def plane_dim(self) -> int:
        return self.chart.plane_dim

    @property
    def coord_shape(self) -> tuple:
        return self.chart.coord_shape

    # -- membership ---------------------------------------------------------
    def contains(self, coords) -> bool:
        raise NotImplementedError

    def contains_batch(self, pts: np.ndarray) -> np.ndarray:
        return np.array([self.contains(p) for p in pts], dtype=bool)

    def membership_margin(self, coords) -> float:
        """Positive inside, negative outside; scale is variant-specific."""
        return 1.0 if self.contains(coords) else -1.0

    def normalize_coords(self, coords) -> np.ndarray:
        return np.asarray(coords, dtype=float).reshape(self.coord_shape)

    # -- geometry helpers ----------------------------------------------------
    @property
    def basepoint(self) -> np.ndarray:
        raise NotImplementedError

    @property
    def bbox(self) -> tuple:
        """(lo, hi) arrays, same shape as coordinates, bounding the domain."""
        raise NotImplementedError

    def sample_interior(self, rng: np.random.Generator, count: int) -> np.ndarray:
        """Rejection sample of interior points, shape (count, *coord_shape)."""
        lo, hi = self.bbox
        out = np.empty((count,) + self.coord_shape)
        have = 0
        for _ in range(10_000):
            block = rng.uniform(lo, hi, size=(4 * count,) + self.coord_shape)
            good = block[self.contains_batch(block)]
            take = min(count - have, len(good))
            out[have:have + take] = good[:take]
            have += take
            if have == count:
                return out
        raise ValidationError("interior sampling failed; domain may be thin or empty")

    def chart_lift(self, coords) -> np.ndarray:
        """Continuously-varying (sign-consistent) n x p representative."""
        return self.chart.lift(self.normalize_coords(coords))

    def point(self, coords) -> GrassmannPoint:
        return self.chart.point(self.normalize_coords(coords))

    def coords(self, point: GrassmannPoint) -> np.ndarray:
        return self.chart.coords(point)

    def _interior_sample_cached(self, count=4096, seed=1234) -> np.ndarray:
        if self._cert_sample is None or len(self._cert_sample) < count:
            n = max(count, 4096)
            self._cert_sample = self.sample_interior(np.random.default_rng(seed), n)
        return self._cert_sample[:count]


class PolytopeDomain(Domain):
    """Interior of the convex hull of finitely many chart points."""

    variant = "polytope"

    def __init__(self, vertices, chart: Optional[ChartSpec] = None):
        vertices = np.atleast_2d(np.asarray(vertices, dtype=float))
        m, d = vertices.shape
        if chart is None:
            chart = standard_chart(d + 1)
        if chart.coord_shape != (d,):
            raise ValidationError("vertex dimension does not match the chart")
        super().__init__(chart)
        if m < d + 1:
            raise ValidationError("a full-dimensional polytope needs >= d+1 vertices")
        centered = vertices - vertices.mean(axis=0)
        if np.linalg.matrix_rank(centered, tol=1e-10) < d:
            raise ValidationError("degenerate polytope: vertices are not full-dimensional")
        if d == 1:
            lo, hi = float(vertices.min()), float(vertices.max())
            self.facet_normals = np.array([[1.0], [-1.0]])
            self.facet_offsets = np.array([hi, -lo])
            self.vertices = np.array([[lo], [hi]])
        else:
            try:
                hull = ConvexHull(vertices)
            except QhullError as exc:  # pragma: no cover - rank check precedes
                raise ValidationError(f"hull construction failed: {exc}") from exc
            eqs = np.unique(np.round(hull.equations, 12), axis=0)
            self.facet_normals = eqs[:, :-1]
            self.facet_offsets = -eqs[:, -1]
            self.vertices = vertices[hull.vertices]

    @property
    def basepoint(self) -> np.ndarray:
        return self.vertices.mean(axis=0)

    @property
    def bbox(self) -> tuple:
        return self.vertices.min(axis=0), self.vertices.max(axis=0)

    def contains(self, coords) -> bool:
        x = self.normalize_coords(coords)
        return bool(np.all(self.facet_normals @ x < self.facet_offsets))

    def contains_batch(self, pts: np.ndarray) -> np.ndarray:
        vals = pts @ self.facet_normals.T - self.facet_offsets
        return np.all(vals < 0.0, axis=1)

    def membership_margin(self, coords) -> float:
        x = self.normalize_coords(coords)
        return float(np.min(self.facet_offsets - self.facet_normals @ x))

    def facet_covectors(self) -> np.ndarray:
        """Chart-level functionals (one per facet), positive on the interior."""
        cov = np.column_stack([self.facet_offsets, -self.facet_normals])
        return cov / np.linalg.norm(cov, axis=1, keepdims=True)


class BallDomain(Domain):
    """Open ellipsoid (x-c)^T S (x-c) < r^2 in a projective chart."""

    variant = "ball"

    def __init__(self, center, radius: float, shape=None,
                 chart: Optional[ChartSpec] = None):
        center = np.asarray(center, dtype=float).ravel()
        d = center.size
        if chart is None:
            chart = standard_chart(d + 1)
        if chart.coord_shape != (d,):
            raise ValidationError("center dimension does not match the chart")
        super().__init__(chart)
        if radius <= 0:
            raise ValidationError("radius must be positive")
        s = np.eye(d) if shape is None else np.asarray(shape, dtype=float)
        if s.shape != (d, d) or not np.allclose(s, s.T, atol=1e-10):
            raise ValidationError("shape matrix must be symmetric d x d")
        w, v = np.linalg.eigh(s)
        if w.min() <= 0:
            raise ValidationError("shape matrix must be positive definite")
        self.center = center
        self.radius = float(radius)
        self.shape_matrix = s
        self._sqrt_s = (v * np.sqrt(w)) @ v.T
        self._inv_s = (v / w) @ v.T

    @property
    def basepoint(self) -> np.ndarray:
        return self.center.copy()

    @property
    def bbox(self) -> tuple:
        half = self.radius * np.sqrt(np.diag(self._inv_s))
        return self.center - half, self.center + half

    def contains(self, coords) -> bool:
        x = self.normalize_coords(coords) - self.center
        return float(x @ self.shape_matrix @ x) < self.radius**2

    def contains_batch(self, pts: np.ndarray) -> np.ndarray:
        z = pts - self.center
        return np.einsum("ij,jk,ik->i", z, self.shape_matrix, z) < self.radius**2

    def membership_margin(self, coords) -> float:
        x = self.normalize_coords(coords) - self.center
        return self.radius - math.sqrt(max(float(x @ self.shape_matrix @ x), 0.0))


class MatrixBallDomain(Domain):
    """Graph coordinates X (q x p) with largest singular value below one."""

    variant = "matrix_ball"

    def __init__(self, p: int, q: int):
        if p < 1 or q < 1:
            raise ValidationError("need p, q >= 1")
        super().__init__(standard_chart(p + q, p))
        self.p, self.q = p, q

    @property
    def coord_shape(self) -> tuple:
        return (self.q, self.p)

    @property
    def basepoint(self) -> np.ndarray:
        return np.zeros((self.q, self.p))

    @property
    def bbox(self) -> tuple:
        return -np.ones((self.q, self.p)), np.ones((self.q, self.p))

    def contains(self, coords) -> bool:
        x = self.normalize_coords(coords)
        return bool(np.linalg.norm(x, 2) < 1.0)

    def contains_batch(self, pts: np.ndarray) -> np.ndarray:
        s = np.linalg.svd(pts, compute_uv=False)
        return s[..., 0] < 1.0

    def membership_margin(self, coords) -> float:
        return 1.0 - float(np.linalg.norm(self.normalize_coords(coords), 2))

    def normalize_coords(self, coords) -> np.ndarray:
        return np.asarray(coords, dtype=float).reshape(self.q, self.p)


class PDConeDomain(Domain):
    """Projectivized positive-definite cone, coordinatized on the trace-one slice."""

    variant = "pd_cone"

    def __init__(self, d: int):
        if d < 2:
            raise ValidationError("need d >= 2")
        self.d = d
        n = sym_dim(d)
        # chart frame: first column is the unit-trace direction svec(I)/sqrt(d)
        e0 = svec(np.eye(d)) / math.sqrt(d)
        frame = _frame_with_first_column(e0)
        super().__init__(ChartSpec(frame, 1))

    @property
    def coord_shape(self) -> tuple:
        return (self.d, self.d)

    def normalize_coords(self, coords) -> np.ndarray:
        x = np.asarray(coords, dtype=float).reshape(self.d, self.d)
        x = 0.5 * (x + x.T)
        t = float(np.trace(x))
        if abs(t) < 1e-14:
            raise OutsideDomain("matrix has zero trace; not a cone direction")
        return x / t

    @property
    def basepoint(self) -> np.ndarray:
        return np.eye(self.d) / self.d

    @property
    def bbox(self) -> tuple:
        return -np.ones((self.d, self.d)), np.ones((self.d, self.d))

    def contains(self, coords) -> bool:
        try:
            x = self.normalize_coords(coords)
        except OutsideDomain:
            return False
        return float(np.linalg.eigvalsh(x)[0]) > 0.0

    def contains_batch(self, pts: np.ndarray) -> np.ndarray:
        sym = 0.5 * (pts + np.swapaxes(pts, -1, -2))
        tr = np.trace(sym, axis1=-2, axis2=-1)
        ok = np.abs(tr) > 1e-14
        out = np.zeros(len(pts), dtype=bool)
        if ok.any():
            normed = sym[ok] / tr[ok][:, None, None]
            out[ok] = np.linalg.eigvalsh(normed)[:, 0] > 0.0
        return out

    def membership_margin(self, coords) -> float:
        x = self.normalize_coords(coords)
        return float(np.linalg.eigvalsh(x)[0])

    def sample_interior(self, rng: np.random.Generator, count: int) -> np.ndarray:
        a = rng.standard_normal((count, self.d, self.d))
        w = a @ np.swapaxes(a, -1, -2) + 1e-6 * np.eye(self.d)
        w /= np.trace(w, axis1=-2, axis2=-1)[:, None, None]
        # mix toward the barycenter for better coverage of the deep interior
        lam = rng.uniform(0.0, 1.0, size=(count, 1, 1))
        return lam * w + (1 - lam) * np.eye(self.d) / self.d

    def chart_lift(self, coords) -> np.ndarray:
        return svec(self.normalize_coords(coords)).reshape(-1, 1)

    def point(self, coords) -> GrassmannPoint:
        return canonicalize(self.chart_lift(coords))

    def coords(self, point: GrassmannPoint) -> np.ndarray:
        x = smat(point.rep[:, 0], self.d)
        t = float(np.trace(x))
        if abs(t) < 1e-12:
            raise RankDeficient("point lies on the trace-zero hyperplane")
        return x / t


class OracleDomain(Domain):
    """Membership given by a predicate; certification falls back to sampling."""

    variant = "oracle"

    def __init__(self, membership: Callable[[np.ndarray], bool], bbox,
                 basepoint, name: str = "oracle",
                 batch_membership: Optional[Callable] = None,
                 chart: Optional[ChartSpec] = None):
        basepoint = np.asarray(basepoint, dtype=float).ravel()
        d = basepoint.size
        if chart is None:
            chart = standard_chart(d + 1)
        super().__init__(chart)
        lo, hi = (np.asarray(b, dtype=float).ravel() for b in bbox)
        if lo.shape != (d,) or hi.shape != (d,) or np.any(lo >= hi):
            raise ValidationError("bbox must be (lo, hi) with lo < hi componentwise")
        self._membership = membership
        self._batch = batch_membership
        self._bbox = (lo, hi)
        self._basepoint = basepoint
        self.name = name
        if not membership(basepoint):
            raise ValidationError("basepoint must lie inside the domain")

    @property
    def basepoint(self) -> np.ndarray:
        return self._basepoint.copy()

    @property
    def bbox(self) -> tuple:
        return self._bbox

    def contains(self, coords) -> bool:
        return bool(self._membership(self.normalize_coords(coords)))

    def contains_batch(self, pts: np.ndarray) -> np.ndarray:
        if self._batch is not None:
            return np.asarray(self._batch(pts), dtype=bool)
        return super().contains_batch(pts)


def lshape_domain() -> OracleDomain:
    """The square (-1,1)^2 with the closed quadrant x1, x2 >= 0 removed."""

    def inside(x):
        return (abs(x[0]) < 1 and abs(x[1]) < 1) and (x[0] < 0 or x[1] < 0)

    def inside_batch(pts):
        box = np.all(np.abs(pts) < 1.0, axis=1)
        return box & ((pts[:, 0] < 0) | (pts[:, 1] < 0))

    return OracleDomain(inside, (np.array([-1.0, -1.0]), np.array([1.0, 1.0])),
                        basepoint=np.array([-0.5, -0.5]), name="lshape",
                        batch_membership=inside_batch)


def _frame_with_first_column(e0: np.ndarray) -> np.ndarray:
    """Orthogonal matrix whose first column is the given unit vector."""
    n = e0.size
    m = np.eye(n)
    m[:, 0] = e0
    q, r = np.linalg.qr(m)
    q[:, 0] *= np.sign(r[0, 0]) or 1.0
    # ensure exact first column
    q[:, 0] = e0
    return q


# ---------------------------------------------------------------------------
# dual representations

class ExplicitVertices:
    """Finitely many dual points given by chart-level covectors.

    Covectors are unit rows, sign-fixed to be positive at the basepoint, and
    evaluate on homogeneous chart lifts (1, x).
    """

    kind = "explicit_vertices"

    def __init__(self, domain: Domain, covectors: np.ndarray):
        cov = np.atleast_2d(np.asarray(covectors, dtype=float))
        cov = cov / np.linalg.norm(cov, axis=1, keepdims=True)
        base = np.append(1.0, domain.basepoint)
        sgn = np.sign(cov @ base)
        sgn[sgn == 0] = 1.0
        self.covectors = cov * sgn[:, None]
        self.domain = domain

    @property
    def size(self) -> int:
        return len(self.covectors)

    def evaluate(self, coords: np.ndarray) -> np.ndarray:
        """Values of every covector at one chart point."""
        lift = np.append(1.0, np.asarray(coords, dtype=float).ravel())
        return self.covectors @ lift

    def dual_point(self, i: int) -> DualGrassmannPoint:
        return _dual_point_from_covector(self.domain.chart, self.covectors[i])

    def dual_points(self):
        return [self.dual_point(i) for i in range(self.size)]


class SampleCloud(ExplicitVertices):
    """Certified sample of the dual domain, with membership margins."""

    kind = "sample_cloud"

    def __init__(self, domain: Domain, covectors: np.ndarray, margins: np.ndarray):
        super().__init__(domain, covectors)
        self.margins = np.asarray(margins, dtype=float)


class ParametricPolarBall:
    """Dual of an ellipsoid: covectors c(u) = (1 - a.c, a), a = S^(1/2) u / r, |u| <= 1."""

    kind = "parametric_polar_ball"

    def __init__(self, domain: BallDomain):
        self.domain = domain
        self.param_dim = domain.center.size

    def covector(self, u: np.ndarray) -> np.ndarray:
        u = np.asarray(u, dtype=float).ravel()
        a = self.domain._sqrt_s @ u / self.domain.radius
        return np.append(1.0 - a @ self.domain.center, a)

    def feature(self, coords: np.ndarray) -> np.ndarray:
        """v with f_u(x) = 1 + <u, v>; the whole metric objective uses only v."""
        x = np.asarray(coords, dtype=float).ravel()
        return self.domain._sqrt_s @ (x - self.domain.center) / self.domain.radius

    def values(self, u: np.ndarray, coords) -> np.ndarray:
        return 1.0 + np.atleast_2d(u) @ self.feature(coords)

    def logratio_value_grad(self, u: np.ndarray, xc, yc):
        """g(u) = log f_u(x) - log f_u(y) and its gradient, batched over rows."""
        vx, vy = self.feature(xc), self.feature(yc)
        fx = 1.0 + u @ vx
        fy = 1.0 + u @ vy
        fx = np.maximum(fx, 1e-300)
        fy = np.maximum(fy, 1e-300)
        g = np.log(fx) - np.log(fy)
        grad = vx[None, :] / fx[:, None] - vy[None, :] / fy[:, None]
        return g, grad

    def project(self, u: np.ndarray) -> np.ndarray:
        nrm = np.linalg.norm(u, axis=-1, keepdims=True)
        return np.where(nrm > 1.0, u / np.maximum(nrm, 1e-30), u)

    def sample_params(self, rng: np.random.Generator, count: int) -> np.ndarray:
        from .optimize import ball_starts
        return ball_starts(rng, count, self.param_dim)

    def informed_params(self, xc, yc) -> np.ndarray:
        vx, vy = self.feature(xc), self.feature(yc)
        cands = [vx, -vx, vy, -vy, vx - vy, vy - vx]
        out = []
        for c in cands:
            n = np.linalg.norm(c)
            if n > 1e-12:
                out.append(c / n)
        return np.array(out) if out else np.zeros((1, self.param_dim))

    def dual_point(self, u: np.ndarray) -> DualGrassmannPoint:
        return _dual_point_from_covector(self.domain.chart, self.covector(u))


class ParametricMatrixBall:
    """Dual of a matrix ball: planes spanned by [Y^T; I_q] with sigma_max(Y) <= 1."""

    kind = "parametric_matrix_ball"

    def __init__(self, domain: MatrixBallDomain):
        self.domain = domain
        self.p, self.q = domain.p, domain.q
        self.param_dim = self.p * self.q

    def _mats(self, u: np.ndarray) -> np.ndarray:
        return np.asarray(u, dtype=float).reshape(-1, self.q, self.p)

    def values(self, u: np.ndarray, coords) -> np.ndarray:
        x = np.asarray(coords, dtype=float).reshape(self.q, self.p)
        ys = self._mats(u)
        m = np.eye(self.q) - np.einsum("ij,kmj->kim", x, ys)
        return np.linalg.det(m)

    def logratio_value_grad(self, u: np.ndarray, xc, yc):
        x = np.asarray(xc, dtype=float).reshape(self.q, self.p)
        y = np.asarray(yc, dtype=float).reshape(self.q, self.p)
        ys = self._mats(u)
        eye = np.eye(self.q)
        mx = eye - np.einsum("ij,kmj->kim", x, ys)
        my = eye - np.einsum("ij,kmj->kim", y, ys)
        sx, ldx = np.linalg.slogdet(mx)
        sy, ldy = np.linalg.slogdet(my)
        g = ldx - ldy
        # grad of log det(I - X Y^T) wrt Y is -(I - X Y^T)^{-1} X
        gx = -np.linalg.solve(mx, np.broadcast_to(x, mx.shape[:1] + x.shape))
        gy = -np.linalg.solve(my, np.broadcast_to(y, my.shape[:1] + y.shape))
        grad = (gx - gy).reshape(len(u), -1)
        bad = (sx <= 0) | (sy <= 0)
        if bad.any():  # outside the closed parameter ball; steer back
            g = np.where(bad, -np.inf, g)
        return g, grad

    def project(self, u: np.ndarray) -> np.ndarray:
        ys = self._mats(u)
        w, s, vt = np.linalg.svd(ys, full_matrices=False)
        s = np.minimum(s, 1.0)
        clipped = np.einsum("kij,kj,kjm->kim", w, s, vt)
        return clipped.reshape(u.shape)

    def sample_params(self, rng: np.random.Generator, count: int) -> np.ndarray:
        g = rng.standard_normal((count, self.q, self.p))
        smax = np.linalg.svd(g, compute_uv=False)[:, 0]
        scale = rng.uniform(0.0, 1.0, count) ** (1.0 / self.param_dim)
        g *= (scale / np.maximum(smax, 1e-30))[:, None, None]
        g[0] = 0.0
        return g.reshape(count, self.param_dim)

    def informed_params(self, xc, yc) -> np.ndarray:
        outs = []
        for m in (xc, yc, np.asarray(xc) - np.asarray(yc)):
            m = np.asarray(m, dtype=float).reshape(self.q, self.p)
            if np.linalg.norm(m) < 1e-12:
                continue
            w, _, vt = np.linalg.svd(m, full_matrices=False)
            y = w @ vt
            outs.extend([y.ravel(), -y.ravel()])
        return np.array(outs) if outs else np.zeros((1, self.param_dim))

    def dual_point(self, u: np.ndarray) -> DualGrassmannPoint:
        y = np.asarray(u, dtype=float).reshape(self.q, self.p)
        raw = np.vstack([y.T, np.eye(self.q)])
        return canonicalize(raw, cls=DualGrassmannPoint)


class PDConePairing:
    """Dual of the PD cone: rank-one trace functionals X -> v^T X v, |v| = 1."""

    kind = "pd_cone_pairing"

    def __init__(self, domain: PDConeDomain):
        self.domain = domain
        self.d = domain.d
        self.param_dim = self.d

    def values(self, u: np.ndarray, coords) -> np.ndarray:
        x = self.domain.normalize_coords(coords)
        v = np.atleast_2d(u)
        return np.einsum("ki,ij,kj->k", v, x, v)

    def logratio_value_grad(self, u: np.ndarray, xc, yc):
        x = self.domain.normalize_coords(xc)
        y = self.domain.normalize_coords(yc)
        qx = np.einsum("ki,ij,kj->k", u, x, u)
        qy = np.einsum("ki,ij,kj->k", u, y, u)
        qx = np.maximum(qx, 1e-300)
        qy = np.maximum(qy, 1e-300)
        g = np.log(qx) - np.log(qy)
        grad = 2.0 * (u @ x / qx[:, None] - u @ y / qy[:, None])
        return g, grad

    def project(self, u: np.ndarray) -> np.ndarray:
        return u / np.maximum(np.linalg.norm(u, axis=-1, keepdims=True), 1e-30)

    def sample_params(self, rng: np.random.Generator, count: int) -> np.ndarray:
        from .optimize import sphere_starts
        return sphere_starts(rng, count, self.d)

    def informed_params(self, xc, yc) -> np.ndarray:
        from scipy.linalg import eigh
        x = self.domain.normalize_coords(xc)
        y = self.domain.normalize_coords(yc)
        _, vecs = eigh(x, y)
        vecs = vecs / np.linalg.norm(vecs, axis=0, keepdims=True)
        return vecs.T.copy()

    def dual_point(self, u: np.ndarray) -> DualGrassmannPoint:
        v = np.asarray(u, dtype=float).ravel()
        v = v / np.linalg.norm(v)
        w = svec(np.outer(v, v))
        return _dual_point_from_ambient_covector(w)


def _dual_point_from_ambient_covector(w: np.ndarray) -> DualGrassmannPoint:
    w = np.asarray(w, dtype=float).ravel()
    w = w / np.linalg.norm(w)
    n = w.size
    m = np.eye(n)
    m[:, 0] = w
    q, _ = np.linalg.qr(m)
    return DualGrassmannPoint(np.ascontiguousarray(q[:, 1:]))


def _dual_point_from_covector(chart: ChartSpec, cov: np.ndarray) -> DualGrassmannPoint:
    """Hyperplane-type dual point whose zero set is {cov . (chart lift) = 0}."""
    return _dual_point_from_ambient_covector(chart.frame @ np.asarray(cov, dtype=float))


def covector_of_dual_point(chart: ChartSpec, xi: GrassmannPoint) -> np.ndarray:
    """Chart-level covector w with det([lift | xi]) = <w, lift> (plane_dim 1 only)."""
    if xi.plane_dim != chart.ambient_dim - 1:
        raise DimensionMismatch("dual point is not a hyperplane")
    w = _null_covector(xi.rep)
    return chart.frame.T @ w


def _null_covector(frame: np.ndarray) -> np.ndarray:
    """Unit w orthogonal to the hyperplane frame, scaled so det([w|F]) = +1 times w."""
    u, _, _ = np.linalg.svd(frame, full_matrices=True)
    w = u[:, -1]
    alpha = np.linalg.det(np.hstack([w[:, None], frame]))
    return w * np.sign(alpha)


# ---------------------------------------------------------------------------
# certificates

@dataclass
class Certificate:
    kind: str
    valid: bool
    margin: float
    witness: dict = field(default_factory=dict)


def signed_pairing_batch(domain: Domain, xi: GrassmannPoint,
                         pts: np.ndarray) -> np.ndarray:
    """Signed det([chart_lift(x) | xi]) for a batch of chart points."""
    n, p = domain.ambient_dim, domain.plane_dim
    if xi.ambient_dim != n or xi.plane_dim != n - p:
        raise DimensionMismatch("dual point has wrong dimensions")
    if p == 1:
        w = _null_covector(xi.rep)
        if domain.variant == "pd_cone":
            lifts = svec(0.5 * (pts + np.swapaxes(pts, -1, -2)))
            tr = np.trace(pts, axis1=-2, axis2=-1)
            lifts = lifts / tr[:, None]
        else:
            lifts = np.column_stack([np.ones(len(pts)), pts.reshape(len(pts), -1)])
            lifts = lifts @ domain.chart.frame.T
        return lifts @ w
    k = len(pts)
    raw = np.concatenate([np.broadcast_to(np.eye(p), (k, p, p)),
                          pts.reshape(k, n - p, p)], axis=1)
    lifts = np.einsum("ij,kjm->kim", domain.chart.frame, raw)
    mats = np.concatenate([lifts, np.broadcast_to(xi.rep, (k, n, n - p))], axis=2)
    return np.linalg.det(mats)


def normalized_pairing_batch(domain: Domain, xi: GrassmannPoint,
                             pts: np.ndarray) -> np.ndarray:
    """|pairing| with canonicalized representatives (values in [0, 1])."""
    raw = np.abs(signed_pairing_batch(domain, xi, pts))
    if domain.plane_dim == 1:
        if domain.variant == "pd_cone":
            sym = 0.5 * (pts + np.swapaxes(pts, -1, -2))
            tr = np.trace(sym, axis1=-2, axis2=-1)
            scale = np.linalg.norm(sym / tr[:, None, None], axis=(1, 2))
            return raw / scale
        lifts = np.column_stack([np.ones(len(pts)), pts.reshape(len(pts), -1)])
        return raw / np.linalg.norm(lifts, axis=1)
    k, p = len(pts), domain.plane_dim
    n = domain.ambient_dim
    low = np.concatenate([np.broadcast_to(np.eye(p), (k, p, p)),
                          pts.reshape(k, n - p, p)], axis=1)
    gram = np.einsum("kji,kjm->kim", low, low)
    scales = np.sqrt(np.linalg.det(gram))
    return raw / scales


def _shrunk(domain: Domain, pts: np.ndarray, delta: float) -> np.ndarray:
    base = domain.basepoint
    return base + (1.0 - delta) * (pts - base)


def dual_membership_certificate(xi: DualGrassmannPoint, domain: Domain,
                                tol: Tolerances = DEFAULT_TOL, seed: int = 0,
                                samples: int = 2048, delta: float = 1e-3) -> Certificate:
    """Certify that the zero set of xi misses the open domain.

    Valid when the signed pairing keeps one sign over the open domain
    (checked on a dense sample plus local minimization); the reported margin
    is the least normalized pairing over a delta-shrunk copy of the domain.
    """
    if domain.variant == "polytope":
        verts = domain.vertices
        vals = signed_pairing_batch(domain, xi, verts)
        lo, hi = float(vals.min()), float(vals.max())
        valid = not (lo < -tol.rank_tol and hi > tol.rank_tol)
        witness = {}
        if not valid:
            witness = _sign_change_witness(domain, xi, verts[int(np.argmin(vals))],
                                           verts[int(np.argmax(vals))])
        margin = float(np.min(normalized_pairing_batch(
            domain, xi, _shrunk(domain, verts, delta))))
        return Certificate("dual_membership", valid, margin if valid else 0.0, witness)

    if domain.variant == "ball":
        w = covector_of_dual_point(domain.chart, xi)
        w0, wv = w[0], w[1:]
        m0 = w0 + wv @ domain.center
        spread = domain.radius * float(np.linalg.norm(np.linalg.solve(domain._sqrt_s, wv)))
        lo, hi = m0 - spread, m0 + spread
        valid = not (lo < -tol.rank_tol and hi > tol.rank_tol)
        witness = {}
        if not valid:
            sinv_w = domain._inv_s @ wv
            x0 = domain.center - m0 * sinv_w / float(wv @ sinv_w)
            witness = {"zero_at": x0}
        shrunk_spread = (1.0 - delta) * spread
        margin = min(abs(m0 - shrunk_spread), abs(m0 + shrunk_spread))
        blo, bhi = domain.bbox
        far = float(np.linalg.norm(np.maximum(np.abs(blo), np.abs(bhi))))
        margin /= math.sqrt(1.0 + far**2)
        return Certificate("dual_membership", valid, margin if valid else 0.0, witness)

    if domain.variant == "pd_cone":
        w = _null_covector(xi.rep)
        wm = smat(w, domain.d)
        lam, vecs = np.linalg.eigh(wm)
        valid = not (lam[0] < -tol.rank_tol and lam[-1] > tol.rank_tol)
        witness = {}
        if not valid:
            a = -lam[0] / (lam[-1] - lam[0])
            pplus = np.outer(vecs[:, -1], vecs[:, -1])
            pminus = np.outer(vecs[:, 0], vecs[:, 0])
            witness = {"zero_at": a * pplus + (1 - a) * pminus}
        # margin over the shrunk slice: min |tr(Z W)| at Z = (1-d)X + d I/d
        pts = _shrunk(domain, domain._interior_sample_cached(1024), delta)
        margin = float(np.min(np.abs(signed_pairing_batch(domain, xi, pts))))
        return Certificate("dual_membership", valid, margin if valid else 0.0, witness)

    # sampled route (matrix balls, oracles)
    pts = domain._interior_sample_cached(samples)
    vals = signed_pairing_batch(domain, xi, pts)
    lo_i, hi_i = int(np.argmin(vals)), int(np.argmax(vals))
    lo, hi = float(vals[lo_i]), float(vals[hi_i])
    valid = not (lo < -tol.rank_tol and hi > tol.rank_tol)
    witness = {}
    if not valid:
        witness = _sign_change_witness(domain, xi, pts[lo_i], pts[hi_i])
    else:
        # polish: look for a zero in the shrunk interior near the smallest
        # |pairing|; a dual point may support the boundary, so only zeros a
        # definite distance inside disqualify it
        refined = _refine_zero(domain, xi, pts[int(np.argmin(np.abs(vals)))], delta)
        if refined is not None:
            valid = False
            witness = {"zero_at": refined}
    margin = 0.0
    if valid:
        margin = float(np.min(normalized_pairing_batch(
            domain, xi, _shrunk(domain, pts[:512], delta))))
    return Certificate("dual_membership", valid, margin, witness)


def _sign_change_witness(domain, xi, pneg, ppos) -> dict:
    """Interior zero of the signed pairing between two opposite-sign points."""
    a, b = np.asarray(pneg, dtype=float), np.asarray(ppos, dtype=float)
    fa = float(signed_pairing_batch(domain, xi, a[None])[0])
    for _ in range(200):
        mid = 0.5 * (a + b)
        if not domain.contains(mid):
            # nonconvex fallback: report the signed pair instead of a zero
            return {"negative_at": pneg, "positive_at": ppos}
        fm = float(signed_pairing_batch(domain, xi, mid[None])[0])
        if abs(fm) < 1e-14:
            return {"zero_at": mid}
        if (fm < 0) == (fa < 0):
            a, fa = mid, fm
        else:
            b = mid
    return {"zero_at": 0.5 * (a + b)}


def _refine_zero(domain, xi, start, delta: float) -> Optional[np.ndarray]:
    """Local search for a zero of the pairing in the delta-shrunk interior."""
    shape = np.asarray(start).shape
    base = domain.basepoint

    def in_shrunk(x):
        return domain.contains(base + (x - base) / (1.0 - delta))

    def objective(flat):
        x = flat.reshape(shape)
        if not in_shrunk(x):
            return 1.0
        return abs(float(signed_pairing_batch(domain, xi, x[None])[0]))

    start = base + (1.0 - delta) * (np.asarray(start, dtype=float) - base)
    res = _nm_minimize(objective, start.ravel(), method="Nelder-Mead",
                       options={"maxiter": 400, "xatol": 1e-12, "fatol": 1e-14})
    x = res.x.reshape(shape)
    if res.fun < 1e-12 and in_shrunk(x):
        return x
    return None


def properness_certificate(domain: Domain, tol: Tolerances = DEFAULT_TOL,
                           seed: int = 0, net: int = 16,
                           radii=(0.2, 0.1, 0.05, 0.02, 0.01)) -> Certificate:
    """Certify boundedness in the chart: an interior dual point with a radius.

    Finds a dual point eta (the chart's point at infinity) and a radius r
    such that a net of dual points within grassmann distance r of eta all
    pass the membership certificate.
    """
    if domain._properness is not None:
        return domain._properness
    eta = domain.chart.dual_point_at_infinity()
    base_cert = dual_membership_certificate(eta, domain, tol, seed, samples=1024)
    result = None
    if base_cert.valid:
        rng = np.random.default_rng(seed)
        dirs = _grassmann_tangents(rng, eta, net)
        for r in radii:
            ok = True
            bad = None
            for t in dirs:
                pert = _grassmann_geodesic(eta, t, r)
                cert = dual_membership_certificate(pert, domain, tol, seed, samples=1024)
                if not cert.valid:
                    ok, bad = False, pert
                    break
            if ok:
                result = Certificate("properness", True, r,
                                     {"eta": eta, "radius": r})
                break
        if result is None:
            result = Certificate("properness", False, 0.0,
                                 {"failing_dual": bad})
    else:
        result = Certificate("properness", False, 0.0, {"eta_invalid": base_cert.witness})
    domain._properness = result
    return result


def _grassmann_tangents(rng, point: GrassmannPoint, count: int):
    n, m = point.rep.shape
    u, _, _ = np.linalg.svd(point.rep, full_matrices=True)
    perp = u[:, m:]
    outs = []
    for _ in range(count):
        g = rng.standard_normal((n - m, m))
        t = perp @ g
        outs.append(t / np.linalg.norm(t, 2))
    return outs


def _grassmann_geodesic(point: GrassmannPoint, tangent: np.ndarray,
                        t: float) -> DualGrassmannPoint:
    u, s, vt = np.linalg.svd(tangent, full_matrices=False)
    q = point.rep @ vt.T
    moved = q @ np.diag(np.cos(t * s)) @ vt + u @ np.diag(np.sin(t * s)) @ vt
    return canonicalize(moved, cls=DualGrassmannPoint)


def boundary_sample(domain: Domain, count: int, seed: int = 0,
                    tol: Tolerances = DEFAULT_TOL) -> list:
    """Near-boundary points found by bisecting rays from the basepoint.

    Each returned point is the last point of its ray that `contains`
    confirmed, so it sits within `tol.angle_tol` of the boundary on the
    inside; callers that march segments toward these points never step
    outside the domain.
    """
    rng = np.random.default_rng(seed)
    dirs = _ray_directions(domain, count, rng)
    base = domain.basepoint
    lo_b, hi_b = domain.bbox
    scale = float(np.max(np.abs(hi_b - lo_b)))
    out = []
    for d in dirs:
        t_lo, t_hi = 0.0, 0.25 * scale
        for _ in range(80):
            if not domain.contains(base + t_hi * d):
                break
            t_lo = t_hi
            t_hi *= 2.0
        else:
            raise ValidationError("ray never left the domain; domain unbounded?")
        for _ in range(100):
            mid = 0.5 * (t_lo + t_hi)
            if domain.contains(base + mid * d):
                t_lo = mid
            else:
                t_hi = mid
            if (t_hi - t_lo) * float(np.linalg.norm(d)) < tol.angle_tol:
                break
        out.append(base + t_lo * d)
    return out


def _ray_directions(domain: Domain, count: int, rng) -> list:
    shape = domain.coord_shape
    if domain.variant == "pd_cone":
        dirs = []
        for _ in range(count):
            g = rng.standard_normal((domain.d, domain.d))
            g = 0.5 * (g + g.T)
            g -= np.trace(g) / domain.d * np.eye(domain.d)
            dirs.append(g / np.linalg.norm(g))
        return dirs
    if len(shape) == 2:
        dirs = []
        for _ in range(count):
            g = rng.standard_normal(shape)
            dirs.append(g / np.linalg.norm(g))
        return dirs
    d = shape[0]
    if d == 1:
        return [np.array([1.0 if i % 2 == 0 else -1.0]) for i in range(count)]
    if d == 2:
        ang = 2 * np.pi * np.arange(count) / count
        return [np.array([np.cos(a), np.sin(a)]) for a in ang]
    g = rng.standard_normal((count, d))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    return list(g)


def dual_convexity_certificate(domain: Domain, x, tol: Tolerances = DEFAULT_TOL,
                               seed: int = 0) -> Certificate:
    """Find a dual point through the boundary point x supporting the domain.

    The point is first snapped onto the exact boundary of its variant so the
    constructed dual point contains it to machine precision.  Raises
    NotDualConvexAt when every hyperplane through x crosses the interior
    (detected on dense interior samples).
    """
    x = domain.normalize_coords(x)

    if domain.variant == "polytope":
        vals = domain.facet_offsets - domain.facet_normals @ x
        i = int(np.argmin(np.abs(vals)))
        if abs(vals[i]) > 1e-6:
            raise ValidationError("point is not near the boundary")
        a = domain.facet_normals[i]
        xb = x + (vals[i] / float(a @ a)) * a  # project onto the facet plane
        cov = np.append(a @ xb, -a)
        xi = _dual_point_from_covector(domain.chart, cov)
        cert = dual_membership_certificate(xi, domain, tol, seed)
        pair = abs(float(cov @ np.append(1.0, xb))) / np.linalg.norm(cov)
        return Certificate("dual_convexity", cert.valid, cert.margin,
                           {"dual_point": xi, "covector": cov, "point": xb,
                            "pairing_at_point": pair})

    if domain.variant == "ball":
        z = x - domain.center
        nz = math.sqrt(float(z @ domain.shape_matrix @ z))
        if abs(nz - domain.radius) > 1e-6:
            raise ValidationError("point is not near the boundary")
        z *= domain.radius / nz
        xb = domain.center + z
        a = domain.shape_matrix @ z
        cov = np.append(a @ xb, -a)
        cov /= np.linalg.norm(cov)
        xi = _dual_point_from_covector(domain.chart, cov)
        cert = dual_membership_certificate(xi, domain, tol, seed)
        pair = abs(float(cov @ np.append(1.0, xb)))
        return Certificate("dual_convexity", cert.valid, cert.margin,
                           {"dual_point": xi, "covector": cov, "point": xb,
                            "pairing_at_point": pair})

    if domain.variant == "matrix_ball":
        w, s, vt = np.linalg.svd(x, full_matrices=False)
        if abs(s[0] - 1.0) > 1e-6:
            raise ValidationError("point is not near the boundary")
        s_snap = s.copy()
        s_snap[0] = 1.0
        xb = (w * s_snap) @ vt
        y = np.outer(w[:, 0], vt[0])
        rep = ParametricMatrixBall(domain)
        xi = rep.dual_point(y.ravel())
        cert = dual_membership_certificate(xi, domain, tol, seed)
        pair = abs(float(np.linalg.det(np.eye(domain.q) - xb @ y.T)))
        return Certificate("dual_convexity", cert.valid, cert.margin,
                           {"dual_point": xi, "parameter": y, "point": xb,
                            "pairing_at_point": pair})

    if domain.variant == "pd_cone":
        lam, vecs = np.linalg.eigh(x)
        if lam[0] > 1e-6:
            raise ValidationError("point is not near the boundary")
        v0 = vecs[:, 0]
        xb = x - lam[0] * np.outer(v0, v0)  # zero out the smallest eigenvalue
        xb = xb / np.trace(xb)
        w = np.outer(v0, v0)
        xi = _dual_point_from_ambient_covector(svec(w))
        cert = dual_membership_certificate(xi, domain, tol, seed)
        pair = abs(float(v0 @ xb @ v0))
        return Certificate("dual_convexity", cert.valid, cert.margin,
                           {"dual_point": xi, "functional": w, "point": xb,
                            "pairing_at_point": pair})

    # oracle: sweep the pencil of hyperplanes through x
    return _oracle_support_search(domain, x, tol, seed)


def _support_covector_at(x: np.ndarray, pts: np.ndarray) -> Optional[np.ndarray]:
    """Supporting-line covector through x for a planar point cloud.

    A line through x leaves all of pts on one side iff the directions from x
    to the points fit inside a half-plane; that reduces to a largest
    circular-gap computation on their angles.  Returns None when no such
    line exists.
    """
    dirs = pts - x
    ang = np.sort(np.arctan2(dirs[:, 1], dirs[:, 0]))
    gaps = np.diff(ang, append=ang[0] + 2 * np.pi)
    j = int(np.argmax(gaps))
    if gaps[j] <= np.pi:
        return None
    # occupied arc runs from ang[j+1 mod n] around to ang[j]; point the
    # normal along its bisector so every sample sits on the positive side
    lo = ang[(j + 1) % len(ang)]
    width = (ang[j] - lo) % (2 * np.pi)
    beta = lo + 0.5 * width
    wv = np.array([np.cos(beta), np.sin(beta)])
    return np.append(-wv @ x, wv)


def _oracle_support_search(domain: OracleDomain, x, tol: Tolerances,
                           seed: int) -> Certificate:
    if domain.ambient_dim != 3:
        raise ValidationError("oracle support search implemented for plane charts")
    pts = domain._interior_sample_cached(4096)
    # Cutting-plane refinement: the arc bisector supports the sample cloud
    # but can tilt off the true normal by half the sampling clearance, enough
    # to clip the domain far from x.  Every rejected candidate contributes
    # its crossing point as a new constraint, so the feasible arc contracts
    # onto the true normal cone (or empties, proving non-support).
    for _ in range(48):
        cov = _support_covector_at(x, pts)
        if cov is None:
            raise NotDualConvexAt(x)
        xi = _dual_point_from_covector(domain.chart, cov)
        cert = dual_membership_certificate(xi, domain, tol, seed)
        if cert.valid:
            pair = abs(float(cov @ np.append(1.0, x))) / np.linalg.norm(cov)
            return Certificate("dual_convexity", True, cert.margin,
                               {"dual_point": xi, "covector": cov, "point": x,
                                "pairing_at_point": pair})
        witness = cert.witness or {}
        z = witness.get("zero_at")
        if z is None:
            z = witness.get("negative_at")
        if z is None:
            raise NotDualConvexAt(x)
        z = np.asarray(z, dtype=float).reshape(1, -1)
        if np.linalg.norm(z - x) < 1e-9:
            raise NotDualConvexAt(x)
        pts = np.vstack([pts, z])
    raise NotDualConvexAt(x)


def dual_of(domain: Domain, tol: Tolerances = DEFAULT_TOL, seed: int = 0,
            cloud_size: int = 512):
    """A representation of the dual domain; raises NotProper when unbounded."""
    if domain._dual is not None:
        return domain._dual
    prop = properness_certificate(domain, tol, seed)
    if not prop.valid:
        raise NotProper(f"domain '{domain.variant}' could not be certified proper")
    if domain.variant == "polytope":
        rep = ExplicitVertices(domain, domain.facet_covectors())
    elif domain.variant == "ball":
        rep = ParametricPolarBall(domain)
    elif domain.variant == "matrix_ball":
        rep = ParametricMatrixBall(domain)
    elif domain.variant == "pd_cone":
        rep = PDConePairing(domain)
    else:
        rep = _sample_dual_cloud(domain, tol, seed, cloud_size)
    domain._dual = rep
    return rep


def _sample_dual_cloud(domain: Domain, tol: Tolerances, seed: int,
                       cloud_size: int) -> SampleCloud:
    """Rejection-sample hyperplanes missing the domain, with certified margins."""
    rng = np.random.default_rng(seed)
    pts = domain._interior_sample_cached(4096)
    lifts = np.column_stack([np.ones(len(pts)), pts]) @ domain.chart.frame.T
    shrunk = _shrunk(domain, pts[:1024], 1e-3)
    shr_lifts = np.column_stack([np.ones(len(shrunk)), shrunk]) @ domain.chart.frame.T
    shr_norms = np.linalg.norm(shr_lifts, axis=1)
    kept, margins = [], []
    n = domain.ambient_dim
    batch = 4 * cloud_size
    for _ in range(50):
        ws = rng.standard_normal((batch, n))
        ws /= np.linalg.norm(ws, axis=1, keepdims=True)
        vals = ws @ lifts.T
        good = (vals.min(axis=1) > tol.rank_tol) | (vals.max(axis=1) < -tol.rank_tol)
        for w in ws[good]:
            shr_vals = np.abs(shr_lifts @ w) / shr_norms
            kept.append(w)
            margins.append(float(shr_vals.min()))
            if len(kept) >= cloud_size:
                break
        if len(kept) >= cloud_size:
            break
    if len(kept) < max(8, n + 1):
        raise NotProper("dual sampling found too few hyperplanes missing the domain")
    cov = [w @ domain.chart.frame for w in kept]
    # supporting lines at boundary points close the cloud toward the dual
    # boundary; without them every ray to a smooth boundary point would see
    # a spuriously bounded metric
    if domain.ambient_dim == 3 and domain.plane_dim == 1:
        for bp in boundary_sample(domain, 64, seed=seed + 1, tol=tol):
            c = _support_covector_at(np.asarray(bp), pts)
            if c is None:
                continue
            w_amb = domain.chart.frame @ c
            w_amb /= np.linalg.norm(w_amb)
            vals = lifts @ w_amb
            if not (vals.min() > tol.rank_tol or vals.max() < -tol.rank_tol):
                continue
            cov.append(w_amb @ domain.chart.frame)
            margins.append(float(np.min(np.abs(shr_lifts @ w_amb) / shr_norms)))
    # covectors are stored chart-level for evaluation on (1, x) lifts
    return SampleCloud(domain, np.array(cov), np.array(margins))


def spanning_basis(dual_rep, tol: Tolerances = DEFAULT_TOL, seed: int = 0,
                   budget: int = 400) -> list:
    """Dual points whose induced functionals span the exterior-power space.

    Returns exactly dim(Lambda^p R^n) dual points with Gram determinant of
    their normalized lifts above rank_tol; raises SpanningFailure otherwise.
    """
    domain = dual_rep.domain
    n, p = domain.ambient_dim, domain.plane_dim
    dim = math.comb(n, p)
    cands = []
    if isinstance(dual_rep, ExplicitVertices):
        cands = dual_rep.dual_points()
    else:
        rng = np.random.default_rng(seed)
        params = dual_rep.sample_params(rng, min(budget, 8 * dim))
        cands = [dual_rep.dual_point(u) for u in params]
    if len(cands) < dim:
        raise SpanningFailure(f"only {len(cands)} dual points available, need {dim}")
    lifts = np.array([plucker_lift(c) for c in cands])
    lifts /= np.linalg.norm(lifts, axis=1, keepdims=True)
    # pivoted QR picks a well-conditioned subset
    from scipy.linalg import qr as _qr
    _, _, piv = _qr(lifts.T, pivoting=True)
    chosen = piv[:dim]
    sub = lifts[chosen]
    gram = float(np.linalg.det(sub @ sub.T))
    if abs(gram) <= tol.rank_tol:
        raise SpanningFailure(f"Gram determinant {gram:.3e} below rank_tol")
    return [cands[i] for i in chosen]
