"""Invariant (pseudo-)metrics on proper domains built from dual pairings.

The central quantity is the supremum over pairs of dual points of the
absolute log cross-ratio.  With the dual pair split into two independent
single-dual maximizations the supremum becomes

    sup |log CR(x, y; xi, eta)| = max_xi g(xi) + max_eta (-g(eta)),
    g(xi) = log f_xi(x) - log f_xi(y),

which finite dual representations evaluate exactly and parametric ones
solve with multi-start projected gradient ascent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .domains import (
    Domain,
    ExplicitVertices,
    SampleCloud,
    dual_of,
)
from .errors import NotAnAutomorphism, OutsideDomain, ValidationError
from .geometry import DEFAULT_TOL, Tolerances
from .optimize import DEFAULT_OPT, OptimizerConfig, maximize

_CONVENTIONS = ("half", "full")


@dataclass
class MetricValue:
    """A metric evaluation with provenance and an optimizer error bound."""

    value: float
    error_bound: float
    convention: str
    route: str
    maximizer: Optional[tuple] = None
    details: dict = field(default_factory=dict)

    def in_convention(self, convention: str) -> float:
        if convention == self.convention:
            return self.value
        if convention == "half":
            return 0.5 * self.value
        return 2.0 * self.value


def _check_convention(convention: str):
    if convention not in _CONVENTIONS:
        raise ValidationError(f"convention must be one of {_CONVENTIONS}")


def _require_inside(domain: Domain, coords, label: str):
    if not domain.contains(coords):
        raise OutsideDomain(f"{label} is not an interior point of the domain")


def _canonical_order(xc: np.ndarray, yc: np.ndarray):
    """Deterministic unordered-pair ordering so d(x, y) == d(y, x) exactly."""
    swap = xc.tobytes() > yc.tobytes()
    return (yc, xc, True) if swap else (xc, yc, False)


def _exact_spread(dual: ExplicitVertices, a, b):
    va = np.maximum(dual.evaluate(a), 1e-300)
    vb = np.maximum(dual.evaluate(b), 1e-300)
    c = np.log(va) - np.log(vb)
    i, j = int(np.argmax(c)), int(np.argmin(c))
    return float(c[i] - c[j]), (i, j)


def _optimized_spread(dual, a, b, config: OptimizerConfig):
    rng = np.random.default_rng(config.seed)
    starts = dual.sample_params(rng, config.starts)
    informed = dual.project(np.atleast_2d(dual.informed_params(a, b)))
    starts = np.vstack([starts, informed])

    def ascent(sign):
        def vg(u):
            v, g = dual.logratio_value_grad(u, a, b)
            return sign * v, sign * g

        return maximize(vg, dual.project, starts, config)

    ra = ascent(+1.0)
    rb = ascent(-1.0)
    full = max(ra.value + rb.value, 0.0)
    err = ra.dispersion + rb.dispersion
    return full, err, (ra.argmax, rb.argmax)


def caratheodory_metric(domain: Domain, x, y, convention: str = "half",
                        config: OptimizerConfig = DEFAULT_OPT,
                        tol: Tolerances = DEFAULT_TOL) -> MetricValue:
    """Supremal log cross-ratio distance between two interior points.

    Finite dual representations (polytopes, certified sample clouds) are
    evaluated exactly over their dual points; parametric duals run a seeded
    multi-start ascent and report an optimizer dispersion as error_bound.
    The pair is evaluated in a canonical order, so exchanging x and y
    returns bit-identical values.
    """
    _check_convention(convention)
    xc = domain.normalize_coords(x)
    yc = domain.normalize_coords(y)
    _require_inside(domain, xc, "x")
    _require_inside(domain, yc, "y")
    dual = dual_of(domain, tol)
    a, b, swapped = _canonical_order(xc, yc)
    if np.array_equal(xc, yc):
        return MetricValue(0.0, 0.0, convention, "exact", None,
                           {"coincident": True})
    if isinstance(dual, ExplicitVertices):
        full, (i, j) = _exact_spread(dual, a, b)
        err = 0.0
        route = "sampled" if isinstance(dual, SampleCloud) else "exact"
        maximizer = (dual.dual_point(i), dual.dual_point(j))
        detail = {"argmax": i, "argmin": j}
    else:
        full, err, (ua, ub) = _optimized_spread(dual, a, b, config)
        route = "optimized"
        maximizer = (dual.dual_point(ua), dual.dual_point(ub))
        detail = {"param_max": ua, "param_min": ub}
    if swapped and maximizer is not None:
        maximizer = (maximizer[1], maximizer[0])
    scale = 0.5 if convention == "half" else 1.0
    return MetricValue(scale * full, scale * err, convention, route,
                       maximizer, detail)


def evaluate_dual_pair(domain: Domain, x, y, xi, eta,
                       convention: str = "half") -> float:
    """|log CR(x, y; xi, eta)| through the geometry kernel, for cross-checks."""
    from .geometry import cross_ratio

    _check_convention(convention)
    px = domain.point(x)
    py = domain.point(y)
    value = abs(math.log(abs(cross_ratio(px, py, xi, eta))))
    return 0.5 * value if convention == "half" else value


# ---------------------------------------------------------------------------
# chords and the classical line metric

def _chord_parameters(domain: Domain, p: np.ndarray, q: np.ndarray,
                      tol: Tolerances, grid: int = 65):
    """Chord extent (t_a < 0, t_b > 1) of the segment component through p, q.

    Returns None when the open segment [p, q] leaves the domain (so no
    single chord component contains both points).
    """
    d = q - p
    if domain.variant == "polytope":
        den = domain.facet_normals @ d.ravel() if d.ndim == 1 else None
        if den is not None:
            num = domain.facet_offsets - domain.facet_normals @ p.ravel()
            t_hi = np.min(num[den > 0] / den[den > 0])
            t_lo = np.max(num[den < 0] / den[den < 0])
            return float(t_lo), float(t_hi)
    if domain.variant == "ball":
        z = p.ravel() - domain.center
        dd = d.ravel()
        s = domain.shape_matrix
        qa = dd @ s @ dd
        qb = 2.0 * (z @ s @ dd)
        qc = z @ s @ z - domain.radius**2
        disc = qb * qb - 4 * qa * qc
        root = math.sqrt(max(disc, 0.0))
        return (-qb - root) / (2 * qa), (-qb + root) / (2 * qa)
    ts = np.linspace(0.0, 1.0, grid)
    seg = p[None] + ts.reshape((-1,) + (1,) * p.ndim) * d[None]
    if not domain.contains_batch(seg).all():
        return None
    return (_march_to_boundary(domain, p, d, -1.0),
            _march_to_boundary(domain, p, d, +1.0))


def _march_to_boundary(domain: Domain, p, d, direction: float) -> float:
    """First domain exit along p + t d beyond t=0 (direction -1) or t=1 (+1)."""
    t_in = 0.0 if direction < 0 else 1.0
    step = 0.05
    t = t_in
    for _ in range(500):
        t_next = t + direction * step
        if not domain.contains(p + t_next * d):
            t_out = t_next
            break
        t = t_next
        step *= 1.6
    else:
        raise ValidationError("chord never left the domain; domain unbounded?")
    for _ in range(100):
        mid = 0.5 * (t + t_out)
        if domain.contains(p + mid * d):
            t = mid
        else:
            t_out = mid
        if abs(t_out - t) < 1e-14 * max(1.0, abs(t)):
            break
    return 0.5 * (t + t_out)


def hilbert_metric_line(domain: Domain, x, y,
                        tol: Tolerances = DEFAULT_TOL) -> float:
    """Classical chord log cross-ratio (full convention) between x and y."""
    xc = domain.normalize_coords(x)
    yc = domain.normalize_coords(y)
    _require_inside(domain, xc, "x")
    _require_inside(domain, yc, "y")
    if np.allclose(xc, yc, atol=0.0):
        return 0.0
    chord = _chord_parameters(domain, xc, yc, tol)
    if chord is None:
        raise ValidationError("segment between the points leaves the domain")
    t_a, t_b = chord
    return math.log(((1.0 - t_a) * t_b) / ((-t_a) * (t_b - 1.0)))


# ---------------------------------------------------------------------------
# interval-map metrics

def _interval_distance(u: float, w: float) -> float:
    return abs(math.log(((1.0 + w) * (1.0 - u)) / ((1.0 + u) * (1.0 - w))))


def kobayashi_c(domain: Domain, x, y, config: OptimizerConfig = DEFAULT_OPT,
                tol: Tolerances = DEFAULT_TOL) -> MetricValue:
    """Largest interval distance across projections to a dual-pair pencil.

    Each dual pair (xi, eta) defines a projective map z -> [f_xi(z) : f_eta(z)]
    onto a line; the interval coordinate u = (f_xi - f_eta)/(f_xi + f_eta)
    sends the domain into (-1, 1).  The value (full convention) is the
    interval metric between the images of x and y under the maximizing pair.
    """
    base = caratheodory_metric(domain, x, y, "full", config, tol)
    xc = domain.normalize_coords(x)
    yc = domain.normalize_coords(y)
    if base.maximizer is None:
        return MetricValue(0.0, 0.0, "full", "interval_map", None,
                           {"coincident": True})
    dual = dual_of(domain, tol)
    if isinstance(dual, ExplicitVertices):
        i, j = base.details["argmax"], base.details["argmin"]
        fx, gx = dual.evaluate(xc)[[i, j]]
        fy, gy = dual.evaluate(yc)[[i, j]]
    else:
        ua, ub = base.details["param_max"], base.details["param_min"]
        fx = float(dual.values(ua[None], xc)[0])
        fy = float(dual.values(ua[None], yc)[0])
        gx = float(dual.values(ub[None], xc)[0])
        gy = float(dual.values(ub[None], yc)[0])
    u = (fx - gx) / (fx + gx)
    w = (fy - gy) / (fy + gy)
    value = _interval_distance(u, w)
    return MetricValue(value, base.error_bound, "full", "interval_map",
                       base.maximizer, {"u_x": u, "u_y": w})


def kobayashi_k(domain: Domain, x, y, chain_depth: int = 1,
                waypoints: int = 24, seed: int = 0,
                tol: Tolerances = DEFAULT_TOL) -> MetricValue:
    """Shortest chain of chord segments from x to y (full convention).

    Chains use at most chain_depth + 1 segments through seeded interior
    waypoints; each segment is measured by the chord log cross-ratio of the
    component containing it.  This upper-bounds the chain construction's
    limit and decreases as chain_depth or waypoints grow.
    """
    xc = domain.normalize_coords(x)
    yc = domain.normalize_coords(y)
    _require_inside(domain, xc, "x")
    _require_inside(domain, yc, "y")
    rng = np.random.default_rng(seed)
    nodes = [xc, yc, domain.normalize_coords(domain.basepoint)]
    nodes += list(domain.sample_interior(rng, waypoints))
    m = len(nodes)
    length = np.full((m, m), np.inf)
    for i in range(m):
        length[i, i] = 0.0
        for j in range(i + 1, m):
            if np.allclose(nodes[i], nodes[j]):
                length[i, j] = length[j, i] = 0.0
                continue
            chord = _chord_parameters(domain, nodes[i], nodes[j], tol)
            if chord is None:
                continue
            t_a, t_b = chord
            h = math.log(((1.0 - t_a) * t_b) / ((-t_a) * (t_b - 1.0)))
            length[i, j] = length[j, i] = h
    # Bellman-Ford limited to chain_depth + 1 edges, source node 0 (= x)
    dist = length[0].copy()
    for _ in range(chain_depth):
        dist = np.minimum(dist, np.min(dist[:, None] + length, axis=0))
    value = float(dist[1])
    if not math.isfinite(value):
        raise ValidationError("no chord chain of the requested depth joins the points")
    return MetricValue(value, 0.0, "full", "chord_chain", None,
                       {"chain_depth": chain_depth, "waypoints": waypoints})


# ---------------------------------------------------------------------------
# completeness probing

@dataclass
class CompletenessVerdict:
    kind: str  # "CauchyEscape" or "DivergesEverywhere"
    profiles: np.ndarray  # (probes, steps) metric values along each ray
    boundary_points: list
    ray_parameters: np.ndarray
    sup_profile: np.ndarray
    tail_oscillation: np.ndarray
    witness_index: Optional[int]
    threshold: float


def completeness_probe(domain: Domain, probes: int = 8, steps: int = 40,
                       threshold: float = 5.0, tail: int = 8,
                       osc_tol: float = 1e-3, seed: int = 0,
                       convention: str = "half",
                       config: OptimizerConfig = DEFAULT_OPT,
                       tol: Tolerances = DEFAULT_TOL) -> CompletenessVerdict:
    """March rays from the basepoint to the boundary and watch the metric.

    Along each ray the points x_k = base + (1 - 2^-k)(b - base) approach a
    boundary point b.  A profile that stays below `threshold` and whose last
    `tail` values oscillate less than `osc_tol` is a Cauchy escape: the
    boundary is reached in finite distance and the metric is incomplete.
    If no ray does that, every probed profile diverges.
    """
    from .domains import boundary_sample

    base = domain.normalize_coords(domain.basepoint)
    bpts = boundary_sample(domain, probes, seed=seed, tol=tol)
    ts = 1.0 - 0.5 ** np.arange(steps, dtype=float)
    profiles = np.zeros((probes, steps))
    for i, b in enumerate(bpts):
        bc = np.asarray(b, dtype=float)
        for k, t in enumerate(ts):
            xk = base + t * (bc - base)
            profiles[i, k] = caratheodory_metric(domain, base, xk, convention,
                                                 config, tol).value
    sup = profiles.max(axis=1)
    osc = profiles[:, -tail:].max(axis=1) - profiles[:, -tail:].min(axis=1)
    escape = (sup < threshold) & (osc < osc_tol)
    witness = int(np.argmax(escape)) if escape.any() else None
    kind = "CauchyEscape" if witness is not None else "DivergesEverywhere"
    return CompletenessVerdict(kind, profiles, bpts, ts, sup, osc, witness,
                               threshold)


# ---------------------------------------------------------------------------
# invariance checking

@dataclass
class InvarianceReport:
    max_deviation: float
    deviations: np.ndarray
    pairs: list
    mapped_pairs: list


def _map_coords(domain: Domain, matrix: np.ndarray, coords) -> np.ndarray:
    from .geometry import canonicalize

    lift = domain.chart_lift(coords)
    moved = canonicalize(matrix @ lift)
    return domain.coords(moved)


def invariance_check(domain: Domain, matrix: np.ndarray, pairs,
                     convention: str = "half",
                     config: OptimizerConfig = DEFAULT_OPT,
                     tol: Tolerances = DEFAULT_TOL) -> InvarianceReport:
    """Compare the metric before and after an ambient linear map.

    `matrix` acts on chart lifts.  Raises NotAnAutomorphism when any mapped
    point leaves the domain, with the offending point as witness.
    """
    matrix = np.asarray(matrix, dtype=float)
    n = domain.chart_lift(domain.basepoint).shape[0]
    if matrix.shape != (n, n):
        raise ValidationError(f"transform must be {n} x {n} on chart lifts")
    devs = []
    mapped_pairs = []
    for x, y in pairs:
        xm = _map_coords(domain, matrix, x)
        ym = _map_coords(domain, matrix, y)
        if not domain.contains(xm):
            raise NotAnAutomorphism(matrix, xm)
        if not domain.contains(ym):
            raise NotAnAutomorphism(matrix, ym)
        d0 = caratheodory_metric(domain, x, y, convention, config, tol).value
        d1 = caratheodory_metric(domain, xm, ym, convention, config, tol).value
        devs.append(abs(d0 - d1))
        mapped_pairs.append((xm, ym))
    devs = np.array(devs)
    return InvarianceReport(float(devs.max()) if len(devs) else 0.0,
                            devs, list(pairs), mapped_pairs)
