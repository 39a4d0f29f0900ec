"""Brute-force reference computations.

These deliberately avoid the closed-form routes used in
`qubit_decorrelator` and `gaussian` so they can be used to cross-check
them.
"""
from __future__ import annotations

from functools import lru_cache

import numpy as np


@lru_cache(maxsize=8)
def _grid(a0: float, b0: float, width: float, step: float):
    """Node coordinates (f, g, a, b) and valid edges of a barycentric grid patch."""
    n = int(round(width / step))
    a, b = np.meshgrid(a0 + step * np.arange(n + 1), b0 + step * np.arange(n + 1), indexing="ij")
    c = 1.0 - a - b
    inside = ((a >= -1e-12) & (b >= -1e-12) & (c >= -1e-12)).ravel()
    idx = np.arange(a.size).reshape(a.shape)
    # horizontal, vertical and anti-diagonal edges of the triangulated grid
    starts = np.concatenate([idx[:-1, :].ravel(), idx[:, :-1].ravel(), idx[:-1, 1:].ravel()])
    ends = np.concatenate([idx[1:, :].ravel(), idx[:, 1:].ravel(), idx[1:, :-1].ravel()])
    keep = inside[starts] & inside[ends]
    f = (a + b / 3 - c / 3).ravel()
    g = (a - b / 3 + c / 9).ravel()
    return f, g, a.ravel(), b.ravel(), starts[keep], ends[keep]


def _grid_max(kappa, lam, a0, b0, width, step):
    """Best interpolated eta' over sign changes of the constraint on grid edges.

    Returns (eta, (a, b)) with (a, b) the grid node at the start of the
    winning edge, or (None, None) when no edge crosses the constraint.
    """
    f, g, a, b, i0, i1 = _grid(a0, b0, width, step)
    h = lam * g - (kappa * f) ** 2
    eta = np.abs(kappa * f)
    h0, h1 = h[i0], h[i1]
    cross = np.nonzero(h0 * h1 <= 0)[0]
    if cross.size == 0:
        return None, None
    h0, h1 = h0[cross], h1[cross]
    e0, e1 = eta[i0[cross]], eta[i1[cross]]
    denom = h0 - h1
    t = np.where(denom != 0, h0 / np.where(denom != 0, denom, 1.0), 0.0)
    val = e0 + t * (e1 - e0)
    k = int(np.argmax(val))
    node = i0[cross[k]]
    return float(val[k]), (float(a[node]), float(b[node]))


def simplex_grid_eta(kappa: float, lam: float, step: float = 1e-3, refine: bool = True) -> float:
    """Largest |kappa f| over product-output mixes, by exhaustive search.

    Scans the barycentric grid of the simplex with spacing `step`, finds
    every grid edge on which lam*g - (kappa f)^2 changes sign, and keeps
    the largest interpolated eta'. With `refine`, repeats the scan on a
    grid 100 times finer around the best cell.
    """
    best, where = _grid_max(kappa, lam, 0.0, 0.0, 1.0, step)
    if best is None:
        return float("nan")
    if refine:
        fine = step / 100
        a0 = round(max(where[0] - 2 * step, 0.0), 12)
        b0 = round(max(where[1] - 2 * step, 0.0), 12)
        loc, _ = _grid_max(kappa, lam, a0, b0, 4 * step, fine)
        if loc is not None:
            best = max(best, loc)
    return best


def sampled_completion_traces(
    c: np.ndarray, rng: np.random.Generator, samples: int = 2000
) -> np.ndarray:
    """Traces of random PSD matrices [[X, -C], [-C^T, Y]].

    X is drawn at random (positive definite) and Y = C^T X^{-1} C + P with
    P >= 0 random, which parameterises every PSD completion with
    invertible X. A third of the X draws perturb sqrt(C C^T) so that
    near-optimal completions are sampled too.
    """
    c = np.asarray(c, dtype=float)
    scale = max(np.linalg.norm(c, 2), 1e-3)
    w, v = np.linalg.eigh(c @ c.T)
    near = (v * np.sqrt(np.clip(w, 0, None))) @ v.T + 1e-9 * np.eye(2)
    out = np.empty(samples)
    for k in range(samples):
        g = rng.normal(size=(2, 2))
        if k % 3 == 1:
            x = scale * (np.eye(2) + 0.3 * (g @ g.T)) * rng.uniform(0.2, 2.0)
        elif k % 3 == 2:
            # small symmetric perturbations of the stationary point sqrt(C C^T)
            x = near + 10 ** rng.uniform(-4, -1) * scale * (g + g.T)
            if np.linalg.eigvalsh(x).min() <= 0:
                x = near
        else:
            x = scale * (g @ g.T + 1e-3 * np.eye(2))
        p = rng.normal(size=(2, 2))
        p = 10 ** rng.uniform(-8, -1) * (p @ p.T)
        y = c.T @ np.linalg.solve(x, c) + p
        out[k] = np.trace(x) + np.trace(y)
    return out


def sdp_min_completion_trace(c: np.ndarray) -> float:
    """min tr N over PSD N with off-diagonal block -C, via an SDP solver."""
    import cvxpy as cp

    c = np.asarray(c, dtype=float)
    n = cp.Variable((4, 4), symmetric=True)
    cons = [n >> 0, n[:2, 2:] == -c]
    prob = cp.Problem(cp.Minimize(cp.trace(n)), cons)
    prob.solve(solver=cp.CLARABEL, tol_gap_abs=1e-12, tol_gap_rel=1e-12, tol_feas=1e-12)
    return float(prob.value)
