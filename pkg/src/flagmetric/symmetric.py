"""Symmetric-space models: group actions realizing domain homogeneity.

The matrix ball of shape (p, q) carries a transitive action of the
indefinite orthogonal group O(p, q) through graph coordinates, and the
projectivized positive-definite cone carries the congruence action of
SL(d).  Both provide exact invariance witnesses for the metrics.
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import expm

from .errors import NotAnAutomorphism, NotPD, RankDeficient, ValidationError
from .domains import smat, svec, sym_dim

_J_TOL = 1e-10


def indefinite_form(p: int, q: int) -> np.ndarray:
    return np.diag(np.concatenate([np.ones(p), -np.ones(q)]))


def check_indefinite_orthogonal(g: np.ndarray, p: int, q: int,
                                tol: float = _J_TOL) -> None:
    """Raise NotAnAutomorphism unless g preserves the signature (p, q) form."""
    g = np.asarray(g, dtype=float)
    if g.shape != (p + q, p + q):
        raise ValidationError(f"element must be {(p + q, p + q)}")
    j = indefinite_form(p, q)
    resid = g.T @ j @ g - j
    err = float(np.abs(resid).max())
    if err > tol:
        raise NotAnAutomorphism(g, err)


def sample_automorphism(p: int, q: int, rng: np.random.Generator,
                        scale: float = 1.0) -> np.ndarray:
    """Random element of the identity component of O(p, q).

    Exponentiates a random Lie algebra element [[A, B], [B^T, D]] with A, D
    skew, spectral norm clipped to `scale`.
    """
    a = rng.standard_normal((p, p))
    d = rng.standard_normal((q, q))
    b = rng.standard_normal((p, q))
    zeta = np.block([[a - a.T, b], [b.T, d - d.T]])
    nrm = np.linalg.norm(zeta, 2)
    if nrm > scale:
        zeta *= scale / nrm
    g = expm(zeta)
    check_indefinite_orthogonal(g, p, q)
    return g


def boost(p: int, q: int, t: float, i: int = 0, j: int = 0) -> np.ndarray:
    """Hyperbolic rotation by t in the (e_i, e_{p+j}) plane of O(p, q)."""
    if not (0 <= i < p and 0 <= j < q):
        raise ValidationError("boost indices out of range")
    g = np.eye(p + q)
    c, s = np.cosh(t), np.sinh(t)
    g[i, i] = c
    g[p + j, p + j] = c
    g[i, p + j] = s
    g[p + j, i] = s
    return g


def act(g: np.ndarray, x: np.ndarray, p: int, q: int) -> np.ndarray:
    """Image of matrix-ball coordinates x (q x p) under g in O(p, q)."""
    check_indefinite_orthogonal(g, p, q)
    x = np.asarray(x, dtype=float).reshape(q, p)
    lift = np.vstack([np.eye(p), x])
    moved = g @ lift
    top, bottom = moved[:p], moved[p:]
    if abs(np.linalg.det(top)) < 1e-12:
        raise RankDeficient("image leaves the graph chart")
    return bottom @ np.linalg.inv(top)


def transitivity_witness(p: int, q: int, x: np.ndarray) -> np.ndarray:
    """g in O(p, q) with g . 0 = x, built from the singular decomposition.

    With x = U diag(sigma) V^T, commuting boosts by artanh(sigma_i) move the
    origin along each singular direction; conjugating by blockdiag(V, U)
    aligns them with x.
    """
    x = np.asarray(x, dtype=float).reshape(q, p)
    if np.linalg.norm(x, 2) >= 1.0:
        raise ValidationError("target must lie in the open matrix ball")
    u, s, vt = np.linalg.svd(x)
    m = np.eye(p + q)
    for i, sig in enumerate(s):
        if sig > 0:
            m = m @ boost(p, q, np.arctanh(sig), i, i)
    frame = np.zeros((p + q, p + q))
    frame[:p, :p] = vt.T
    frame[p:, p:] = u
    g = frame @ m @ frame.T
    check_indefinite_orthogonal(g, p, q)
    return g


# ---------------------------------------------------------------------------
# the positive-definite cone under congruence

def sample_pd_cone_element(d: int, rng: np.random.Generator,
                           scale: float = 1.0) -> np.ndarray:
    """Random element of SL(d) via the exponential of a traceless matrix."""
    z = rng.standard_normal((d, d))
    z -= np.trace(z) / d * np.eye(d)
    nrm = np.linalg.norm(z, 2)
    if nrm > scale:
        z *= scale / nrm
    return expm(z)


def pd_cone_act(g: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Congruence action [X] -> [g X g^T] on trace-normalized cone points."""
    g = np.asarray(g, dtype=float)
    x = np.asarray(x, dtype=float)
    x = 0.5 * (x + x.T)
    tr = float(np.trace(x))
    if abs(tr) < 1e-14:
        raise NotPD("cone points need nonzero trace")
    x = x / tr
    if np.linalg.eigvalsh(x)[0] <= 0:
        raise NotPD("congruence action applied outside the open cone")
    y = g @ x @ g.T
    return y / np.trace(y)


def pd_cone_ambient_matrix(g: np.ndarray) -> np.ndarray:
    """Matrix of X -> g X g^T on the vectorized symmetric space.

    Acts on the same coordinates as PDConeDomain chart lifts, so it plugs
    straight into the generic metric invariance check.
    """
    g = np.asarray(g, dtype=float)
    d = g.shape[0]
    n = sym_dim(d)
    k = np.empty((n, n))
    basis = np.eye(n)
    for col in range(n):
        e = smat(basis[col], d)
        k[:, col] = svec(g @ e @ g.T)
    return k


def pd_cone_transitivity_witness(x: np.ndarray) -> np.ndarray:
    """g with g . I = x (up to trace scale): the symmetric square root."""
    x = np.asarray(x, dtype=float)
    x = 0.5 * (x + x.T)
    w, v = np.linalg.eigh(x)
    if w[0] <= 0:
        raise NotPD("target must be positive definite")
    return (v * np.sqrt(w)) @ v.T
