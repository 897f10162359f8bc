"""Least absolute deviations regression with two regressors, batched over rows.

Each row ``k`` is an independent problem

    minimize_beta  sum_q | y_kq - C_kq * beta_0 - S_kq * beta_1 |

which is how the harmonic fits at many Fourier frequencies are solved at
once.  Three routes are available:

``simplex``
    Exact vertex descent on the LP.  A vertex is a pair of observations with
    zero residual.  At each vertex the dual multipliers of the two basic
    observations are solved from the 2x2 subgradient system; if both lie in
    [-1, 1] the vertex is optimal, otherwise the basic observation with the
    largest multiplier is released and the objective is minimized exactly
    along the remaining edge by a weighted median.  Every step strictly
    lowers the objective on non-degenerate data, so the loop is finite.
``irls``
    Iteratively reweighted least squares with weights 1/max(|r|, eps).
``highs``
    The residual-splitting LP handed to scipy's HiGHS solver, one row at a
    time.  Slow; kept as an independent cross-check.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy import sparse
from scipy.optimize import linprog

from .errors import LADConvergenceWarning, ValidationError

METHODS = ("simplex", "irls", "highs")

IRLS_EPS = 1e-8
IRLS_MAX_ITER = 200


@dataclass
class LADBatch:
    """Per-row solutions: ``beta`` is (m, 2), the rest are (m,)."""

    beta: np.ndarray
    objective: np.ndarray
    iterations: np.ndarray
    converged: np.ndarray


def _as_rows(C, S, Y):
    C = np.atleast_2d(np.asarray(C, dtype=float))
    S = np.atleast_2d(np.asarray(S, dtype=float))
    Y = np.broadcast_to(np.asarray(Y, dtype=float), C.shape)
    if C.shape != S.shape:
        raise ValidationError("regressor arrays must have the same shape")
    return C, S, Y


def l1_objective(C, S, Y, beta) -> np.ndarray:
    """Row-wise sum of absolute residuals at ``beta`` (m, 2)."""
    C, S, Y = _as_rows(C, S, Y)
    beta = np.atleast_2d(beta)
    r = Y - C * beta[:, :1] - S * beta[:, 1:]
    return np.abs(r).sum(axis=1)


def _weighted_ls(C, S, Y, W=None):
    """Closed-form 2x2 (weighted) least squares per row."""
    if W is None:
        a11, a12, a22 = (C * C).sum(1), (C * S).sum(1), (S * S).sum(1)
        b1, b2 = (C * Y).sum(1), (S * Y).sum(1)
    else:
        WC, WS = W * C, W * S
        a11, a12, a22 = (WC * C).sum(1), (WC * S).sum(1), (WS * S).sum(1)
        b1, b2 = (WC * Y).sum(1), (WS * Y).sum(1)
    det = a11 * a22 - a12 * a12
    if np.any(det <= 0):
        raise ValidationError("regressors are rank deficient for at least one row")
    return np.column_stack(((a22 * b1 - a12 * b2) / det, (a11 * b2 - a12 * b1) / det))


def _line_minimize(C, S, Y, beta, d, keep):
    """Exact minimization of the L1 objective along beta + t*d per row.

    ``keep`` is the basic observation whose residual is held at zero (its
    slope along ``d`` is zero by construction).  Returns the new beta and the
    index of the observation entering the basis.
    """
    rows = np.arange(C.shape[0])
    r = Y - C * beta[:, :1] - S * beta[:, 1:]
    g = C * d[:, :1] + S * d[:, 1:]
    g[rows, keep] = 0.0
    w = np.abs(g)
    nz = w > 0
    t = np.where(nz, r / np.where(nz, g, 1.0), 0.0)
    order = np.argsort(t, axis=1, kind="stable")
    cum = np.cumsum(np.take_along_axis(w, order, axis=1), axis=1)
    pos = np.argmax(cum >= 0.5 * cum[:, -1:], axis=1)
    enter = order[rows, pos]
    step = t[rows, enter]
    return beta + step[:, None] * d, enter


def _simplex(C, S, Y, tol, max_iter):
    m, n = C.shape
    rows_all = np.arange(m)
    scale = np.maximum(np.abs(Y).max(axis=1), 1.0)
    zero_tol = 1e-11 * scale

    beta = _weighted_ls(C, S, Y)
    r = Y - C * beta[:, :1] - S * beta[:, 1:]
    # first vertex: pin the observation closest to the LS fit, then line search
    i0 = np.argmin(np.abs(r), axis=1)
    ci, si = C[rows_all, i0], S[rows_all, i0]
    hn = ci * ci + si * si
    ri = r[rows_all, i0]
    beta = beta + np.column_stack((ri * ci / hn, ri * si / hn))
    d = np.column_stack((-si, ci))
    beta, j0 = _line_minimize(C, S, Y, beta, d, i0)
    basis = np.column_stack((i0, j0))

    iterations = np.ones(m, dtype=int)
    done = np.zeros(m, dtype=bool)
    converged = np.zeros(m, dtype=bool)
    stalled = np.zeros(m, dtype=bool)
    obj = np.abs(Y - C * beta[:, :1] - S * beta[:, 1:]).sum(1)
    exact = obj <= zero_tol * n
    done |= exact
    converged |= exact

    for _ in range(max_iter):
        act = np.flatnonzero(~done)
        if act.size == 0:
            break
        Ca, Sa, Ya, ba, Ba = C[act], S[act], Y[act], beta[act], basis[act]
        ra = np.arange(act.size)
        r = Ya - Ca * ba[:, :1] - Sa * ba[:, 1:]
        s = np.sign(r)
        s[np.abs(r) <= zero_tol[act, None]] = 0.0
        s[ra, Ba[:, 0]] = 0.0
        s[ra, Ba[:, 1]] = 0.0
        g0, g1 = (s * Ca).sum(1), (s * Sa).sum(1)
        i, j = Ba[:, 0], Ba[:, 1]
        Ci, Si, Cj, Sj = Ca[ra, i], Sa[ra, i], Ca[ra, j], Sa[ra, j]
        det = Ci * Sj - Cj * Si
        with np.errstate(divide="ignore", invalid="ignore"):
            ui = (-g0 * Sj + g1 * Cj) / det
            uj = (-g1 * Ci + g0 * Si) / det
        bad_basis = ~np.isfinite(ui) | ~np.isfinite(uj)
        ui = np.where(bad_basis, np.inf, ui)
        uj = np.where(bad_basis, 0.0, uj)
        optimal = (np.abs(ui) <= 1 + tol) & (np.abs(uj) <= 1 + tol)
        fin = act[optimal]
        done[fin] = True
        converged[fin] = True

        mv = ~optimal
        if not mv.any():
            continue
        idx = act[mv]
        release_i = np.abs(ui[mv]) >= np.abs(uj[mv])
        keep = np.where(release_i, j[mv], i[mv])
        ck, sk = Ca[mv][np.arange(idx.size), keep], Sa[mv][np.arange(idx.size), keep]
        d = np.column_stack((-sk, ck))
        new_beta, enter = _line_minimize(Ca[mv], Sa[mv], Ya[mv], ba[mv], d, keep)
        new_obj = np.abs(Ya[mv] - Ca[mv] * new_beta[:, :1] - Sa[mv] * new_beta[:, 1:]).sum(1)
        progress = new_obj < obj[idx] * (1 - 1e-15) - 1e-300
        iterations[idx] += 1
        ok = idx[progress]
        beta[ok] = new_beta[progress]
        basis[ok] = np.column_stack((keep[progress], enter[progress]))
        obj[ok] = new_obj[progress]
        # no descent along the violating edge: degenerate vertex
        st = idx[~progress]
        done[st] = True
        stalled[st] = True
    return beta, iterations, converged, stalled


def _irls(C, S, Y, tol, max_iter, eps=IRLS_EPS):
    m = C.shape[0]
    beta = _weighted_ls(C, S, Y)
    obj = l1_objective(C, S, Y, beta)
    iterations = np.zeros(m, dtype=int)
    converged = np.zeros(m, dtype=bool)
    act = np.arange(m)
    for _ in range(max_iter):
        if act.size == 0:
            break
        Ca, Sa, Ya, ba = C[act], S[act], Y[act], beta[act]
        r = Ya - Ca * ba[:, :1] - Sa * ba[:, 1:]
        W = 1.0 / np.maximum(np.abs(r), eps)
        nb = _weighted_ls(Ca, Sa, Ya, W)
        no = l1_objective(Ca, Sa, Ya, nb)
        iterations[act] += 1
        better = no <= obj[act]
        upd = act[better]
        beta[upd] = nb[better]
        rel = np.abs(obj[act] - no) / np.maximum(obj[act], 1e-300)
        obj[upd] = no[better]
        stop = (rel <= tol) | (obj[act] <= 1e-14 * np.abs(Ya).sum(1))
        converged[act[stop]] = True
        act = act[~stop]
    return beta, iterations, converged


def _highs_row(c, s, y):
    n = y.size
    A = sparse.hstack([sparse.csc_matrix(np.column_stack((c, s))),
                       sparse.identity(n, format="csc"), -sparse.identity(n, format="csc")])
    cost = np.concatenate(([0.0, 0.0], np.ones(2 * n)))
    bounds = [(None, None)] * 2 + [(0, None)] * (2 * n)
    res = linprog(cost, A_eq=A, b_eq=y, bounds=bounds, method="highs")
    if res.status != 0:
        return None
    return res.x[:2]


def lad_batch(C, S, Y, method: str = "simplex", tol: float = 1e-9,
              max_iter: int | None = None) -> LADBatch:
    """Solve one two-regressor LAD problem per row of ``C``, ``S``, ``Y``.

    Rows that fail to meet the stopping rule within ``max_iter`` steps are
    returned with ``converged=False`` and their best iterate, and a
    :class:`LADConvergenceWarning` is issued.
    """
    if method not in METHODS:
        raise ValidationError(f"LAD method must be one of {', '.join(METHODS)}, got {method!r}",
                              "method")
    if not tol > 0:
        raise ValidationError(f"tol must be positive, got {tol}", "tol")
    C, S, Y = _as_rows(C, S, Y)
    m, n = C.shape
    if n < 2:
        raise ValidationError("need at least two observations per row")

    if method == "simplex":
        cap = max_iter if max_iter is not None else 20 * n
        beta, iterations, converged, stalled = _simplex(C, S, Y, tol, cap)
        for k in np.flatnonzero(stalled):
            alt = _highs_row(C[k], S[k], Y[k])
            if alt is not None:
                cur = l1_objective(C[k], S[k], Y[k], beta[k])[0]
                if l1_objective(C[k], S[k], Y[k], alt)[0] < cur:
                    beta[k] = alt
            converged[k] = alt is not None
    elif method == "irls":
        cap = max_iter if max_iter is not None else IRLS_MAX_ITER
        beta, iterations, converged = _irls(C, S, Y, tol, cap)
    else:
        beta = np.empty((m, 2))
        iterations = np.ones(m, dtype=int)
        converged = np.ones(m, dtype=bool)
        for k in range(m):
            b = _highs_row(C[k], S[k], Y[k])
            if b is None:
                converged[k] = False
                b = _weighted_ls(C[k:k + 1], S[k:k + 1], Y[k:k + 1])[0]
            beta[k] = b

    if not converged.all():
        warnings.warn(
            f"LAD ({method}) did not converge for {int((~converged).sum())} of {m} rows; "
            "best iterates returned", LADConvergenceWarning, stacklevel=2)
    return LADBatch(beta, l1_objective(C, S, Y, beta), iterations, converged)


def lad_fit(X, y, method: str = "simplex", tol: float = 1e-9) -> LADBatch:
    """Single LAD problem with an (n, 2) design matrix."""
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[1] != 2:
        raise ValidationError("design matrix must have shape (n, 2)")
    return lad_batch(X[:, 0], X[:, 1], y, method=method, tol=tol)
