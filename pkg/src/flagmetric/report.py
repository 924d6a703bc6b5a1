"""Artifact rendering: delimited output, SVG polylines, and figures.

All delimited output goes through `render_csv` so identical inputs give
byte-identical files: header row, then values at 17 significant digits.
Figures are rendered with the Agg backend, imported lazily so plain CSV
runs never touch matplotlib.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import OutsideDomain, ValidationError
from .domains import Domain
from .geometry import DEFAULT_TOL, Tolerances
from .metrics import _chord_parameters, caratheodory_metric
from .optimize import DEFAULT_OPT, OptimizerConfig


def format_value(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.17g}"
    return str(v)


def render_csv(header, rows) -> str:
    lines = [",".join(str(h) for h in header)]
    for row in rows:
        lines.append(",".join(format_value(v) for v in row))
    return "\n".join(lines) + "\n"


def polyline_svg(points: np.ndarray, bbox) -> str:
    """Minimal SVG: one polyline, viewBox equal to the chart bounding box."""
    lo, hi = (np.asarray(b, dtype=float).ravel() for b in bbox)
    if lo.size != 2:
        raise ValidationError("SVG output needs a two-dimensional chart")
    w, h = hi - lo
    pts = " ".join(f"{p[0]:.17g},{p[1]:.17g}" for p in np.asarray(points))
    stroke = 0.01 * max(w, h)
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" '
        f'viewBox="{lo[0]:.17g} {lo[1]:.17g} {w:.17g} {h:.17g}">\n'
        f'  <polyline points="{pts}" fill="none" stroke="black" '
        f'stroke-width="{stroke:.17g}"/>\n'
        f"</svg>\n"
    )


def _ray_exit(domain: Domain, center: np.ndarray, direction: np.ndarray,
              tol: Tolerances) -> float:
    """Parameter s where center + s * direction leaves the domain."""
    lo, hi = (np.asarray(b, dtype=float).ravel() for b in domain.bbox)
    eps = 1e-3 * float(np.max(hi - lo))
    for _ in range(60):
        if domain.contains(center + eps * direction):
            break
        eps *= 0.5
    else:
        raise OutsideDomain("center is not interior along the requested ray")
    chord = _chord_parameters(domain, center, center + eps * direction, tol)
    if chord is None:
        raise ValidationError("ray immediately leaves the domain component")
    return eps * chord[1]


def render_metric_ball(domain: Domain, center, radius: float,
                       resolution: int = 32, convention: str = "half",
                       config: OptimizerConfig = DEFAULT_OPT,
                       tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Trace the metric sphere of given radius as a closed polyline.

    For each of `resolution` rays from the center, bisect the parameter at
    which the two-point invariant equals `radius`.  Rows are chart points;
    the first row is repeated at the end to close the curve.
    """
    center = np.asarray(domain.normalize_coords(center), dtype=float).ravel()
    if center.size != 2:
        raise ValidationError("metric balls are rendered on planar charts only")
    if radius < 0:
        raise ValidationError("radius must be nonnegative")
    if not domain.contains(center):
        raise OutsideDomain("ball center must be interior")
    pts = np.empty((resolution + 1, 2))
    if radius == 0.0:
        pts[:] = center
        return pts
    angles = 2.0 * math.pi * np.arange(resolution) / resolution
    for k, th in enumerate(angles):
        u = np.array([math.cos(th), math.sin(th)])
        s_hi = _ray_exit(domain, center, u, tol) * (1.0 - 1e-9)
        s_lo = 0.0
        val_hi = caratheodory_metric(domain, center, center + s_hi * u,
                                     convention, config, tol).value
        if val_hi <= radius:
            # radius unattainable along this ray (should not happen for
            # proper domains); clamp at the boundary approach
            pts[k] = center + s_hi * u
            continue
        for _ in range(46):
            s_mid = 0.5 * (s_lo + s_hi)
            val = caratheodory_metric(domain, center, center + s_mid * u,
                                      convention, config, tol).value
            if val < radius:
                s_lo = s_mid
            else:
                s_hi = s_mid
        pts[k] = center + 0.5 * (s_lo + s_hi) * u
    pts[resolution] = pts[0]
    return pts


# ---------------------------------------------------------------------------
# figures (lazy matplotlib, Agg only)

def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def save_ball_figure(points: np.ndarray, bbox, path: str) -> None:
    plt = _pyplot()
    lo, hi = (np.asarray(b, dtype=float).ravel() for b in bbox)
    fig, ax = plt.subplots(figsize=(5, 5))
    ax.plot(points[:, 0], points[:, 1], "-", lw=1.5)
    ax.set_xlim(lo[0], hi[0])
    ax.set_ylim(lo[1], hi[1])
    ax.set_aspect("equal")
    ax.set_title("metric ball")
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_profile_figure(verdict, path: str) -> None:
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(6, 4))
    for i, prof in enumerate(verdict.profiles):
        ax.plot(prof, lw=1.0, label=f"ray {i}")
    ax.axhline(verdict.threshold, color="k", ls="--", lw=0.8)
    ax.set_xlabel("step")
    ax.set_ylabel("distance from basepoint")
    ax.set_title(verdict.kind)
    if len(verdict.profiles) <= 10:
        ax.legend(fontsize=7)
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_margin_figure(demo, path: str) -> None:
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.semilogy(np.arange(len(demo.margins)), np.maximum(demo.margins, 1e-300),
                "o-", ms=3)
    ax.set_xlabel("step")
    ax.set_ylabel("transversality margin")
    ax.set_title(f"fiber escape toward t* = {demo.t_exit:.6f}")
    fig.savefig(path, dpi=150)
    plt.close(fig)
