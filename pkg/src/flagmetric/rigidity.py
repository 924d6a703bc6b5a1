"""Fiber experiments on flag manifolds.

A domain of flags cut out by transversality to a reference flag never
fibers over a single Grassmannian factor: inside each fiber of the
forgetful projection one can complete the retained subspace to a flag that
kills a complementary pairing.  `fiber_escape_witness` builds that flag
exactly, `fiber_boundary_demo` realizes it as the endpoint of a rotation
path that stays in the fiber, and `opposite_density_check` measures how
generic transversality is for random pairs of complementary planes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import qr as pivoted_qr

from .errors import (
    DimensionMismatch,
    FiberExitsImmediately,
    NoWitness,
    ValidationError,
)
from .geometry import (
    DEFAULT_TOL,
    FullFlag,
    GrassmannPoint,
    Tolerances,
    complementary_dims,
    flag_from_raw,
    flag_project,
    grassmann_distance,
    pairing,
    subspace_intersection,
)


def random_flag(rng: np.random.Generator, n: int, dims) -> FullFlag:
    """Uniform random flag: levels spanned by leading columns of a random frame."""
    q, _ = np.linalg.qr(rng.standard_normal((n, n)))
    return flag_from_raw(q, dims)


@dataclass(frozen=True)
class FlagDomainSpec:
    """Flags of type `dims` in R^n transverse to a fixed reference flag."""

    n: int
    dims: tuple
    reference: FullFlag

    def __post_init__(self):
        if tuple(sorted(self.reference.dims)) != complementary_dims(self.n, self.dims):
            raise DimensionMismatch(
                "reference flag must have the complementary type")

    def margins(self, flag: FullFlag) -> np.ndarray:
        """Pairing of each level against the complementary reference level."""
        if flag.dims != tuple(self.dims):
            raise DimensionMismatch(f"expected dims {self.dims}, got {flag.dims}")
        out = np.empty(len(self.dims))
        for k, d in enumerate(self.dims):
            out[k] = pairing(flag_project(flag, d),
                             flag_project(self.reference, self.n - d))
        return out

    def contains(self, flag: FullFlag, floor: float = 0.0) -> bool:
        return bool(self.margins(flag).min() > floor)


def standard_flag_domain(n: int, dims, seed: int = 0) -> FlagDomainSpec:
    dims = tuple(sorted(int(d) for d in dims))
    if not dims or dims[0] < 1 or dims[-1] > n - 1:
        raise ValidationError("levels must satisfy 1 <= d <= n - 1")
    rng = np.random.default_rng(seed)
    ref = random_flag(rng, n, complementary_dims(n, dims))
    return FlagDomainSpec(n, dims, ref)


def _extend_columns(cols: np.ndarray, source: np.ndarray, count: int) -> np.ndarray:
    """Append `count` directions of span(source) independent from cols."""
    if count == 0:
        return cols
    resid = source - cols @ (cols.T @ source)
    _, _, piv = pivoted_qr(resid, pivoting=True, mode="economic")
    picked = []
    base = cols
    for j in piv:
        v = resid[:, j] - base @ (base.T @ resid[:, j]) if picked else resid[:, j]
        nrm = np.linalg.norm(v)
        if nrm < 1e-10:
            continue
        v = v / nrm
        picked.append(v)
        base = np.hstack([base, v[:, None]])
        if len(picked) == count:
            return base
    raise ValidationError("source does not contain enough independent directions")


@dataclass
class FiberWitness:
    flag: FullFlag
    level_index: int
    level_prime_index: int
    escape_vector: np.ndarray
    violated_pairing: float
    base_drift: float


def fiber_escape_witness(spec: FlagDomainSpec, flag: FullFlag, level_index: int,
                         tol: Tolerances = DEFAULT_TOL) -> FiberWitness:
    """A flag with the same level-d subspace but a vanishing pairing elsewhere.

    The retained level d = dims[level_index] is kept exactly; the adjacent
    level d' absorbs a vector of the complementary reference subspace, which
    forces pairing(V'_{d'}, W_{n - d'}) = 0.  Fails (NoWitness) only when the
    flag has a single level, i.e. the projection forgets nothing.
    """
    dims = spec.dims
    m = len(dims)
    if not 0 <= level_index < m:
        raise ValidationError("level index out of range")
    if m < 2:
        raise NoWitness("single-level flags have point fibers")
    d = dims[level_index]
    base = flag_project(flag, d)
    if level_index + 1 < m:
        ip = level_index + 1
        dp = dims[ip]
        w_level = flag_project(spec.reference, spec.n - dp)
        # any reference vector escaping the base works; the first column does
        # unless it happens to lie inside V_d
        w = None
        for j in range(w_level.plane_dim):
            cand = w_level.rep[:, j]
            resid = cand - base.rep @ (base.rep.T @ cand)
            if np.linalg.norm(resid) > 1e-8:
                w = cand
                break
        if w is None:
            raise NoWitness("reference level is contained in the base subspace")
        # order the base columns so every lower level appears as a prefix
        cols = flag_project(flag, dims[0]).rep
        for j in range(1, level_index + 1):
            cols = _extend_columns(cols, flag_project(flag, dims[j]).rep,
                                   dims[j] - cols.shape[1])
        wt = w - cols @ (cols.T @ w)
        wt = wt / np.linalg.norm(wt)
        cols = np.hstack([cols, wt[:, None]])
        cols = _extend_columns(cols, flag_project(flag, dp).rep,
                               dp - cols.shape[1])
        for j in range(ip + 1, m):
            cols = _extend_columns(cols, flag_project(flag, dims[j]).rep,
                                   dims[j] - cols.shape[1])
    else:
        ip = level_index - 1
        dp = dims[ip]
        w_level = flag_project(spec.reference, spec.n - dp)
        meet = subspace_intersection(base, w_level, tol)
        if meet is None:
            raise NoWitness("no intersection vector found at the lower level")
        w = meet[:, 0]
        cols = w[:, None]
        for j in range(level_index):
            cols = _extend_columns(cols, flag_project(flag, dims[j]).rep,
                                   dims[j] - cols.shape[1])
        cols = _extend_columns(cols, base.rep, d - cols.shape[1])
    witness = flag_from_raw(cols, dims, tol)
    violated = pairing(flag_project(witness, dp),
                       flag_project(spec.reference, spec.n - dp))
    drift = grassmann_distance(flag_project(witness, d), base)
    return FiberWitness(witness, level_index, ip, w, violated, drift)


def _rotation(u: np.ndarray, v: np.ndarray, t: float) -> np.ndarray:
    n = u.size
    outer = np.outer(u, u) + np.outer(v, v)
    skew = np.outer(v, u) - np.outer(u, v)
    return np.eye(n) + (np.cos(t) - 1.0) * outer + np.sin(t) * skew


def _rotate_flag(flag: FullFlag, rot: np.ndarray) -> FullFlag:
    # rot is orthogonal and the reps are orthonormal, so the products are
    # valid frames as-is; avoiding re-canonicalization keeps the frame (and
    # hence every signed determinant) continuous along the path
    return FullFlag([GrassmannPoint(rot @ s.rep) for s in flag.subspaces])


def _signed_level_dets(spec: FlagDomainSpec, flag: FullFlag) -> np.ndarray:
    out = np.empty(len(spec.dims))
    for k, d in enumerate(spec.dims):
        x = flag_project(flag, d)
        w = flag_project(spec.reference, spec.n - d)
        out[k] = np.linalg.det(np.hstack([x.rep, w.rep]))
    return out


@dataclass
class FiberDemo:
    level_index: int
    level_prime_index: int
    t_star: float
    t_exit: float
    crossing_level: int
    parameters: np.ndarray
    margins: np.ndarray
    final_margin: float
    boundary_flag: FullFlag
    escape_vector: np.ndarray


def fiber_boundary_demo(spec: FlagDomainSpec, flag: FullFlag, level_index: int,
                        steps: int = 24, grid: int = 256,
                        tol: Tolerances = DEFAULT_TOL) -> FiberDemo:
    """March a rotation path inside the fiber until transversality dies.

    The rotation plane is orthogonal to (or contained in) the retained
    subspace, so the projection to level d never moves; some complementary
    pairing vanishes at a finite angle t*.  The path is sampled at
    t_exit * (1 - 2^-k) and the final flag sits within machine distance of
    the fiber boundary while still inside the domain.
    """
    margins0 = spec.margins(flag)
    if margins0.min() <= 1e-9:
        raise FiberExitsImmediately(
            "starting flag already touches the transversality boundary")
    wit = fiber_escape_witness(spec, flag, level_index, tol)
    d = spec.dims[level_index]
    dp = spec.dims[wit.level_prime_index]
    base = flag_project(flag, d)
    level_p = flag_project(flag, dp)
    w = wit.escape_vector / np.linalg.norm(wit.escape_vector)
    if dp > d:
        # part of w orthogonal to the base, split along the d' level
        wt = w - base.rep @ (base.rep.T @ w)
        wt = wt / np.linalg.norm(wt)
        a = level_p.rep @ (level_p.rep.T @ wt)
        b = wt - a
    else:
        # w already lies in the base; split it along the lower level
        a = level_p.rep @ (level_p.rep.T @ w)
        b = w - a
    beta = np.linalg.norm(b)
    alpha = np.linalg.norm(a)
    if beta < 1e-12:
        raise FiberExitsImmediately("escape vector already lies in the flag")
    v = b / beta
    if alpha < 1e-12:
        u = level_p.rep[:, 0]
        if dp > d:
            resid = level_p.rep - base.rep @ (base.rep.T @ level_p.rep)
            j = int(np.argmax(np.linalg.norm(resid, axis=0)))
            u = resid[:, j] / np.linalg.norm(resid[:, j])
    else:
        u = a / alpha
    t_star = float(np.arctan2(beta, alpha))

    ts = np.linspace(0.0, t_star, grid + 1)
    dets = np.array([_signed_level_dets(spec, _rotate_flag(flag, _rotation(u, v, t)))
                     for t in ts])
    signs0 = np.sign(dets[0])
    flipped = (np.sign(dets) * signs0) <= 0
    flipped[0] = False
    t_exit = t_star
    crossing = wit.level_prime_index
    hits = np.argwhere(flipped)
    if len(hits):
        first_row = int(hits[:, 0].min())
        crossing = int(np.argmin(np.abs(dets[first_row])))
        lo, hi = ts[first_row - 1], ts[first_row]
        slo = dets[first_row - 1, crossing]
        for _ in range(100):
            mid = 0.5 * (lo + hi)
            val = _signed_level_dets(
                spec, _rotate_flag(flag, _rotation(u, v, mid)))[crossing]
            if val * slo > 0:
                lo = mid
            else:
                hi = mid
        t_exit = 0.5 * (lo + hi)

    ks = np.arange(steps)
    params = t_exit * (1.0 - 0.5 ** ks)
    margins = np.empty(steps)
    for k, t in enumerate(params):
        margins[k] = spec.margins(_rotate_flag(flag, _rotation(u, v, t))).min()
    boundary = _rotate_flag(flag, _rotation(u, v, t_exit))
    return FiberDemo(level_index, wit.level_prime_index, t_star, float(t_exit),
                     crossing, params, margins, float(margins[-1]), boundary, w)


@dataclass
class OppositeDensityReport:
    n: int
    p: int
    trials: int
    threshold: float
    fraction: float
    min_pairing: float


def opposite_density_check(n: int, p: int, trials: int = 100000,
                           seed: int = 0, threshold: float = 1e-12,
                           batch: int = 20000) -> OppositeDensityReport:
    """Fraction of random complementary plane pairs that are transverse.

    Pairs are independent Haar frames; the pairing is |det| of the stacked
    frame, computed in batches.
    """
    if not 1 <= p <= n - 1:
        raise ValidationError("need 1 <= p <= n - 1")
    rng = np.random.default_rng(seed)
    left = trials
    good = 0
    min_det = np.inf
    while left > 0:
        b = min(batch, left)
        q1 = np.linalg.qr(rng.standard_normal((b, n, p)))[0]
        q2 = np.linalg.qr(rng.standard_normal((b, n, n - p)))[0]
        dets = np.abs(np.linalg.det(np.concatenate([q1, q2], axis=2)))
        good += int((dets > threshold).sum())
        min_det = min(min_det, float(dets.min()))
        left -= b
    return OppositeDensityReport(n, p, trials, threshold, good / trials, min_det)
