"""Linear-algebra kernel: points of Grassmannians, flags, pairings, cross-ratios.

A point of Gr_p(R^n) is stored as an n x p matrix with orthonormal columns.
All comparisons go through principal angles, never through raw matrix entries,
so representatives are interchangeable.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import (
    DegeneratePairing,
    DimensionMismatch,
    InvalidDimension,
    RankDeficient,
)


@dataclass(frozen=True)
class Tolerances:
    """Numerical thresholds used throughout.

    rank_tol   relative cutoff for rank / transversality decisions
    angle_tol  principal-angle cutoff (radians) for subspace equality
    opt_tol    convergence tolerance of the multi-start optimizer
    """

    rank_tol: float = 1e-10
    angle_tol: float = 1e-9
    opt_tol: float = 1e-8

    def __post_init__(self):
        if not (0 < self.rank_tol < 1 and self.angle_tol > 0 and self.opt_tol > 0):
            raise ValueError("tolerances must be positive (rank_tol < 1)")


DEFAULT_TOL = Tolerances()


class GrassmannPoint:
    """A p-plane in R^n, held as an n x p orthonormal frame."""

    __slots__ = ("rep",)

    def __init__(self, rep: np.ndarray):
        rep = np.atleast_2d(np.asarray(rep, dtype=float))
        if rep.ndim != 2:
            raise DimensionMismatch("representative must be a 2-d array")
        n, p = rep.shape
        if not 1 <= p < n:
            raise DimensionMismatch(f"need 1 <= p < n, got shape {rep.shape}")
        # orthonormality is the class invariant; construct via canonicalize()
        # when starting from an arbitrary full-rank matrix
        if not np.allclose(rep.T @ rep, np.eye(p), atol=1e-12):
            raise RankDeficient("columns are not orthonormal; use canonicalize()")
        self.rep = rep
        self.rep.flags.writeable = False

    @property
    def ambient_dim(self) -> int:
        return self.rep.shape[0]

    @property
    def plane_dim(self) -> int:
        return self.rep.shape[1]

    def __repr__(self):
        return f"{type(self).__name__}(n={self.ambient_dim}, p={self.plane_dim})"


class DualGrassmannPoint(GrassmannPoint):
    """An (n-p)-plane regarded as a point of the dual Grassmannian."""


class ProjectivePoint(GrassmannPoint):
    """A line in R^n (plane_dim 1)."""

    @classmethod
    def from_vector(cls, v: np.ndarray) -> "ProjectivePoint":
        v = np.asarray(v, dtype=float).reshape(-1, 1)
        nrm = np.linalg.norm(v)
        if nrm == 0.0:
            raise RankDeficient("zero vector spans no line")
        return cls(v / nrm)


def canonicalize(raw: np.ndarray, tol: Tolerances = DEFAULT_TOL,
                 cls=GrassmannPoint) -> GrassmannPoint:
    """Orthonormalize the columns of ``raw`` into a GrassmannPoint.

    Raises RankDeficient when the smallest singular value is below
    rank_tol times the largest.
    """
    raw = np.atleast_2d(np.asarray(raw, dtype=float))
    if raw.ndim != 2 or raw.shape[0] <= raw.shape[1]:
        raise DimensionMismatch(f"need an n x p matrix with p < n, got {raw.shape}")
    u, s, _ = np.linalg.svd(raw, full_matrices=False)
    if s[0] == 0.0 or s[-1] < tol.rank_tol * s[0]:
        raise RankDeficient(f"column rank < {raw.shape[1]} at rank_tol={tol.rank_tol}")
    return cls(u)


def orthocomplement(x: GrassmannPoint) -> GrassmannPoint:
    """The orthogonal complement as a point of the complementary Grassmannian."""
    u, _, _ = np.linalg.svd(x.rep, full_matrices=True)
    return GrassmannPoint(np.ascontiguousarray(u[:, x.plane_dim:]))


def principal_angles(x: GrassmannPoint, y: GrassmannPoint) -> np.ndarray:
    """Principal angles between two planes of equal dimension, ascending."""
    if x.ambient_dim != y.ambient_dim or x.plane_dim != y.plane_dim:
        raise DimensionMismatch("principal angles need equal (n, p)")
    c = np.linalg.svd(x.rep.T @ y.rep, compute_uv=False)
    c = np.clip(c, -1.0, 1.0)
    angles = np.arccos(c)  # c descending => angles ascending
    # arccos is ill-conditioned near 0; recompute small angles from sines
    small = c**2 > 0.5
    if np.any(small):
        resid = y.rep - x.rep @ (x.rep.T @ y.rep)
        s = np.sort(np.linalg.svd(resid, compute_uv=False))  # sines, ascending
        angles[small] = np.arcsin(np.clip(s[small], 0.0, 1.0))
    return angles


def grassmann_distance(x: GrassmannPoint, y: GrassmannPoint) -> float:
    """Largest principal angle between two planes (a metric on Gr_p)."""
    return float(principal_angles(x, y)[-1])


def same_span(x: GrassmannPoint, y: GrassmannPoint,
              tol: Tolerances = DEFAULT_TOL) -> bool:
    """Equality of points: every principal angle below angle_tol."""
    return grassmann_distance(x, y) < tol.angle_tol


def pairing(x: GrassmannPoint, xi: GrassmannPoint) -> float:
    """|det [rep_x | rep_xi]| for complementary planes; 0 iff non-transverse.

    Both frames are orthonormal so the value lies in [0, 1] and does not
    depend on the choice of representatives.
    """
    if x.ambient_dim != xi.ambient_dim:
        raise DimensionMismatch("ambient dimensions differ")
    if x.plane_dim + xi.plane_dim != x.ambient_dim:
        raise DimensionMismatch(
            f"plane dims {x.plane_dim} + {xi.plane_dim} != n = {x.ambient_dim}")
    return abs(float(np.linalg.det(np.hstack([x.rep, xi.rep]))))


def is_transverse(x: GrassmannPoint, xi: GrassmannPoint,
                  tol: Tolerances = DEFAULT_TOL) -> bool:
    """Whether a plane and a complementary plane span the ambient space."""
    return pairing(x, xi) > tol.rank_tol


def cross_ratio(x: GrassmannPoint, y: GrassmannPoint,
                xi: GrassmannPoint, eta: GrassmannPoint,
                tol: Tolerances = DEFAULT_TOL) -> float:
    """Signed cross-ratio of two points against two dual points.

        CR = det[x|xi] det[y|eta] / (det[y|xi] det[x|eta])

    The absolute value is independent of all representative choices and is
    invariant under a common invertible linear map of the four arguments.
    Raises DegeneratePairing when a denominator pairing is below rank_tol.
    """
    d_x_xi = float(np.linalg.det(np.hstack([x.rep, xi.rep])))
    d_y_eta = float(np.linalg.det(np.hstack([y.rep, eta.rep])))
    d_y_xi = float(np.linalg.det(np.hstack([y.rep, xi.rep])))
    d_x_eta = float(np.linalg.det(np.hstack([x.rep, eta.rep])))
    if abs(d_y_xi) <= tol.rank_tol or abs(d_x_eta) <= tol.rank_tol:
        raise DegeneratePairing("denominator pairing below rank_tol")
    return (d_x_xi * d_y_eta) / (d_y_xi * d_x_eta)


class FullFlag:
    """A nested chain of subspaces V_{d_1} < ... < V_{d_k} of R^n."""

    __slots__ = ("subspaces",)

    def __init__(self, subspaces, tol: Tolerances = DEFAULT_TOL):
        subspaces = tuple(subspaces)
        if not subspaces:
            raise DimensionMismatch("a flag needs at least one subspace")
        n = subspaces[0].ambient_dim
        dims = [s.plane_dim for s in subspaces]
        if any(s.ambient_dim != n for s in subspaces):
            raise DimensionMismatch("flag subspaces live in different spaces")
        if any(d2 <= d1 for d1, d2 in zip(dims, dims[1:])):
            raise DimensionMismatch("flag dims must be strictly increasing")
        for small, big in zip(subspaces, subspaces[1:]):
            # nesting check: projection of the smaller onto the larger
            resid = small.rep - big.rep @ (big.rep.T @ small.rep)
            if np.linalg.norm(resid, 2) > tol.angle_tol:
                raise DimensionMismatch("subspaces are not nested")
        self.subspaces = subspaces

    @property
    def ambient_dim(self) -> int:
        return self.subspaces[0].ambient_dim

    @property
    def dims(self) -> tuple:
        return tuple(s.plane_dim for s in self.subspaces)

    def __repr__(self):
        return f"FullFlag(n={self.ambient_dim}, dims={self.dims})"


def flag_from_raw(columns: np.ndarray, dims, tol: Tolerances = DEFAULT_TOL) -> FullFlag:
    """Build a flag whose level-d subspace is spanned by the first d columns."""
    columns = np.asarray(columns, dtype=float)
    return FullFlag([canonicalize(columns[:, :d], tol) for d in sorted(dims)], tol)


def flag_project(flag: FullFlag, d: int) -> GrassmannPoint:
    """The subspace of the flag with plane_dim d."""
    for s in flag.subspaces:
        if s.plane_dim == d:
            return s
    raise InvalidDimension(f"flag has dims {flag.dims}, not {d}")


def complementary_dims(n: int, dims) -> tuple:
    return tuple(sorted(n - d for d in dims))


def flag_transverse(f1: FullFlag, f2: FullFlag,
                    tol: Tolerances = DEFAULT_TOL) -> bool:
    """Whether two flags of complementary type are pairwise transverse.

    Requires dims(f2) == {n - d : d in dims(f1)}; checks every level of f1
    against the complementary level of f2.
    """
    n = f1.ambient_dim
    if f2.ambient_dim != n:
        raise DimensionMismatch("flags live in different ambient spaces")
    if tuple(sorted(f2.dims)) != complementary_dims(n, f1.dims):
        raise DimensionMismatch(
            f"dims {f2.dims} are not complementary to {f1.dims} in R^{n}")
    for s in f1.subspaces:
        w = flag_project(f2, n - s.plane_dim)
        if not is_transverse(s, w, tol):
            return False
    return True


def subspace_intersection(x: GrassmannPoint, y: GrassmannPoint,
                          tol: Tolerances = DEFAULT_TOL):
    """Orthonormal basis of span(x) ∩ span(y); None when the meet is trivial."""
    if x.ambient_dim != y.ambient_dim:
        raise DimensionMismatch("ambient dimensions differ")
    m = np.hstack([x.rep, y.rep])
    u, s, vt = np.linalg.svd(m)
    null_dim = int(np.sum(s < 1e-9 * s[0])) + max(0, m.shape[1] - m.shape[0])
    if null_dim == 0:
        return None
    coeffs = vt[-null_dim:, : x.plane_dim].T  # (p, null_dim)
    basis = x.rep @ coeffs
    q, _ = np.linalg.qr(basis)
    return q


def random_grassmann_point(rng: np.random.Generator, n: int, p: int,
                           cls=GrassmannPoint) -> GrassmannPoint:
    """Haar-uniform random p-plane in R^n."""
    return canonicalize(rng.standard_normal((n, p)), cls=cls)


def plucker_lift(xi: GrassmannPoint) -> np.ndarray:
    """Coordinates of the functional det([. | xi]) over the standard p-subsets.

    For a dual point of Gr_p(R^n) this is the induced covector on the
    exterior power, indexed by itertools.combinations(range(n), p).
    """
    n = xi.ambient_dim
    p = n - xi.plane_dim
    eye = np.eye(n)
    out = [float(np.linalg.det(np.hstack([eye[:, list(idx)], xi.rep])))
           for idx in itertools.combinations(range(n), p)]
    return np.asarray(out)
