"""Chebyshev points, differentiation, barycentric interpolation and a
damped-Newton collocation solver for first-order systems."""

from __future__ import annotations

import numpy as np
from scipy.linalg import lu_factor, lu_solve

from .errors import SolverError


class ConvergenceError(SolverError):
    """Newton/collocation iteration failed; ``diagnostics`` says how."""


def cheb_points(n, a=-1.0, b=1.0):
    """n+1 Chebyshev extreme points on [a, b], in increasing order."""
    x = -np.cos(np.pi * np.arange(n + 1) / n)
    return a + (b - a) * (x + 1) / 2


def cheb_diff(n, a=-1.0, b=1.0):
    """Differentiation matrix on :func:`cheb_points` (Trefethen's cheb,
    with the negative-sum trick for the diagonal)."""
    x = -np.cos(np.pi * np.arange(n + 1) / n)
    c = np.ones(n + 1)
    c[0] = c[-1] = 2.0
    c *= (-1.0) ** np.arange(n + 1)
    dx = x[:, None] - x[None, :]
    D = np.outer(c, 1.0 / c) / (dx + np.eye(n + 1))
    D -= np.diag(D.sum(axis=1))
    return D * (2.0 / (b - a))


def bary_weights(n):
    w = (-1.0) ** np.arange(n + 1)
    w[0] *= 0.5
    w[-1] *= 0.5
    return w


def bary_eval(nodes, values, x, weights=None):
    """Barycentric interpolation at ``x``; ``values`` may be (n+1, ...)."""
    nodes = np.asarray(nodes)
    values = np.asarray(values)
    w = bary_weights(len(nodes) - 1) if weights is None else weights
    x = np.atleast_1d(np.asarray(x, dtype=float))
    diff = x[:, None] - nodes[None, :]
    exact = diff == 0
    diff[exact] = 1.0
    k = w[None, :] / diff
    out = (k @ values.reshape(len(nodes), -1)) / k.sum(axis=1)[:, None]
    rows, cols = np.nonzero(exact)
    out[rows] = values.reshape(len(nodes), -1)[cols]
    return out.reshape((len(x),) + values.shape[1:])


def cheb_cumint_weights(n, a, b):
    """Matrix Q with (Q f)_i = integral from x_i to b of the interpolant."""
    x = cheb_points(n, a, b)
    V = np.polynomial.chebyshev.chebvander((2 * x - a - b) / (b - a), n)
    Vinv = np.linalg.inv(V)
    Q = np.empty((n + 1, n + 1))
    for j in range(n + 1):
        e = np.zeros(n + 1)
        e[j] = 1.0
        c = Vinv @ e
        ci = np.polynomial.chebyshev.chebint(c, lbnd=1.0) * (b - a) / 2
        Q[:, j] = -np.polynomial.chebyshev.chebval((2 * x - a - b) / (b - a), ci)
    return Q


def solve_collocation(rhs, jac, bcs, a, b, y0, n, tol=1e-12, max_iter=60):
    """Solve y' = rhs(s, y) on [a, b] for a d-component system.

    ``jac(s, y)`` returns the (npts, d, d) Jacobian, ``y0`` is the initial
    iterate of shape (n+1, d) on :func:`cheb_points`. ``bcs`` is a list of
    ``(end, component, value)`` Dirichlet conditions with ``end`` in
    {"left", "right"}; each replaces the collocation row of the same
    component at that end. Returns (s, y, newton_steps).
    """
    s = cheb_points(n, a, b)
    D = cheb_diff(n, a, b)
    d = y0.shape[1]
    y = np.array(y0, dtype=float)
    npts = n + 1
    replace = []
    for end, comp, value in bcs:
        idx = 0 if end == "left" else n
        replace.append((comp * npts + idx, comp, idx, value))

    def residual(y):
        F = rhs(s, y)
        R = np.concatenate([D @ y[:, i] - F[:, i] for i in range(d)])
        for row, comp, idx, value in replace:
            R[row] = y[idx, comp] - value
        return R

    R = residual(y)
    norm = np.linalg.norm(R, np.inf)
    for it in range(max_iter):
        J = jac(s, y)
        A = np.zeros((d * npts, d * npts))
        for i in range(d):
            A[i * npts:(i + 1) * npts, i * npts:(i + 1) * npts] += D
            for j in range(d):
                A[i * npts:(i + 1) * npts, j * npts:(j + 1) * npts] -= np.diag(J[:, i, j])
        for row, comp, idx, value in replace:
            A[row, :] = 0.0
            A[row, comp * npts + idx] = 1.0
        step = lu_solve(lu_factor(A), -R).reshape(d, npts).T
        lam = 1.0
        while True:
            trial = y + lam * step
            Rt = residual(trial)
            nt = np.linalg.norm(Rt, np.inf)
            if np.isfinite(nt) and (nt < (1 - 0.25 * lam) * norm or nt < tol):
                break
            lam *= 0.5
            if lam < 1e-6:
                raise ConvergenceError("damped Newton stalled", iteration=it, residual=norm)
        y, R, norm = trial, Rt, nt
        if np.abs(lam * step).max() < tol * max(1.0, np.abs(y).max()):
            return s, y, it + 1
    raise ConvergenceError("Newton did not converge", iteration=max_iter, residual=norm)
