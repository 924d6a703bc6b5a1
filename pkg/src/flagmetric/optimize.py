"""Multi-start projected gradient ascent over compact parameter sets.

All starts are advanced together as one batched array; the reduction over
starts is a max, so results do not depend on evaluation order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class OptimizerConfig:
    """Settings for the multi-start ascent.

    starts     number of random starts (informed starts are added on top)
    max_iters  iteration cap per start
    seed       RNG seed for the start sample
    opt_tol    step-size convergence threshold
    """

    starts: int = 64
    max_iters: int = 500
    seed: int = 0
    opt_tol: float = 1e-8


DEFAULT_OPT = OptimizerConfig()

_ARMIJO = 1e-4
_EXPAND = 2.0
_MAX_STEP = 64.0


@dataclass
class AscentResult:
    value: float
    argmax: np.ndarray
    values: np.ndarray      # final value per start
    dispersion: float       # best minus median of the top quartile


def _dispersion(values: np.ndarray) -> float:
    order = np.sort(values)[::-1]
    top = order[: max(1, order.size // 4)]
    return float(top[0] - np.median(top))


def maximize(value_and_grad, project, starts: np.ndarray,
             config: OptimizerConfig = DEFAULT_OPT) -> AscentResult:
    """Maximize a smooth objective over a compact set by projected ascent.

    value_and_grad maps a (K, m) batch of parameters to values (K,) and
    gradients (K, m); project maps arbitrary (K, m) parameters back into
    the feasible set.  Each start runs gradient ascent with Armijo
    backtracking and step expansion until its step stalls below opt_tol.
    """
    x = project(np.array(starts, dtype=float))
    if x.ndim != 2:
        raise ValueError("starts must be a (K, m) array")
    k = x.shape[0]
    val, grad = value_and_grad(x)
    step = np.full(k, 1.0)
    active = np.ones(k, dtype=bool)

    for _ in range(config.max_iters):
        if not active.any():
            break
        cand = project(x + step[:, None] * grad)
        cval, cgrad = value_and_grad(cand)
        moved = cand - x
        gain = cval - val
        # Armijo condition along the projected direction
        ok = active & (gain >= _ARMIJO * np.einsum("ij,ij->i", grad, moved))
        ok &= gain > 0
        x[ok] = cand[ok]
        val[ok] = cval[ok]
        grad[ok] = cgrad[ok]
        step[ok] = np.minimum(step[ok] * _EXPAND, _MAX_STEP)
        rej = active & ~ok
        step[rej] *= 0.5
        # a start is done when its trial step collapses
        stalled = np.linalg.norm(moved, axis=1) < config.opt_tol
        active &= ~(stalled & (step < config.opt_tol) | (ok & stalled))

    best = int(np.argmax(val))
    return AscentResult(value=float(val[best]), argmax=x[best].copy(),
                        values=val.copy(), dispersion=_dispersion(val))


def ball_starts(rng: np.random.Generator, count: int, dim: int) -> np.ndarray:
    """Quasi-uniform sample of a unit Euclidean ball, plus the center."""
    g = rng.standard_normal((count, dim))
    g /= np.maximum(np.linalg.norm(g, axis=1, keepdims=True), 1e-30)
    r = rng.uniform(0.0, 1.0, size=(count, 1)) ** (1.0 / dim)
    pts = g * r
    pts[0] = 0.0
    return pts


def sphere_starts(rng: np.random.Generator, count: int, dim: int) -> np.ndarray:
    g = rng.standard_normal((count, dim))
    return g / np.maximum(np.linalg.norm(g, axis=1, keepdims=True), 1e-30)
