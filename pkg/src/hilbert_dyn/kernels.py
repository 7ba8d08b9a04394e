"""Hot numeric kernels: chord intervals and cross-ratio distances in batch.

Every kernel exists twice: a loop version compiled with numba and a
vectorised numpy version. ``USE_NUMBA`` (see ``_accel``) picks the default;
both are importable so tests can compare them.

Chord intervals are returned as four positive magnitudes per pair (x, y):

    neg_x = -t_min          pos_x = t_max
    neg_y = 1 - t_min       pos_y = t_max - 1

for the line p(t) = x + t (y - x). Each is computed from the slack at its own
base point, so no quantity is formed by subtracting nearly equal numbers and
the distance keeps full relative precision when a point sits close to the
boundary.
"""

import numpy as np

from ._accel import USE_NUMBA, njit

__all__ = [
    "slack_intervals",
    "quadric_intervals",
    "cross_ratio_log",
    "simplex_spread",
    "slack_intervals_numpy",
    "slack_intervals_jit",
    "quadric_intervals_numpy",
    "quadric_intervals_jit",
    "simplex_spread_numpy",
    "simplex_spread_jit",
]


# -- half-space slacks ------------------------------------------------------

def slack_intervals_numpy(SX, SY):
    SX = np.asarray(SX, dtype=np.float64)
    SY = np.asarray(SY, dtype=np.float64)
    R = SX - SY  # rate at which each slack is consumed per unit t
    n = SX.shape[0]
    rows = np.arange(n)
    with np.errstate(divide="ignore", invalid="ignore"):
        t_fwd = np.where(R > 0, SX / R, np.inf)
        t_bwd = np.where(R < 0, SX / -R, np.inf)
    k = np.argmin(t_fwd, axis=1)
    j = np.argmin(t_bwd, axis=1)
    pos_x = t_fwd[rows, k]
    neg_x = t_bwd[rows, j]
    rk = R[rows, k]
    rj = R[rows, j]
    with np.errstate(divide="ignore", invalid="ignore"):
        pos_y = np.where(np.isfinite(pos_x), SY[rows, k] / rk, np.inf)
        neg_y = np.where(np.isfinite(neg_x), SY[rows, j] / -rj, np.inf)
    still = ~np.any(R != 0, axis=1)
    for arr in (neg_x, pos_x, neg_y, pos_y):
        arr[still] = 1.0
    return neg_x, pos_x, neg_y, pos_y


def _slack_intervals_loop(SX, SY):
    n, m = SX.shape
    neg_x = np.empty(n)
    pos_x = np.empty(n)
    neg_y = np.empty(n)
    pos_y = np.empty(n)
    for p in range(n):
        best_f = np.inf
        best_b = np.inf
        kf = -1
        kb = -1
        moved = False
        for i in range(m):
            r = SX[p, i] - SY[p, i]
            if r > 0.0:
                moved = True
                t = SX[p, i] / r
                if t < best_f:
                    best_f = t
                    kf = i
            elif r < 0.0:
                moved = True
                t = SX[p, i] / -r
                if t < best_b:
                    best_b = t
                    kb = i
        if not moved:
            neg_x[p] = 1.0
            pos_x[p] = 1.0
            neg_y[p] = 1.0
            pos_y[p] = 1.0
            continue
        pos_x[p] = best_f
        neg_x[p] = best_b
        if kf >= 0:
            pos_y[p] = SY[p, kf] / (SX[p, kf] - SY[p, kf])
        else:
            pos_y[p] = np.inf
        if kb >= 0:
            neg_y[p] = SY[p, kb] / (SY[p, kb] - SX[p, kb])
        else:
            neg_y[p] = np.inf
    return neg_x, pos_x, neg_y, pos_y


slack_intervals_jit = njit(_slack_intervals_loop)


# -- quadric (ellipsoid) ----------------------------------------------------

def _roots_numpy(alpha, beta, c):
    # alpha t^2 + 2 beta t + c = 0 with alpha > 0, c < 0; stable root pair.
    disc = np.sqrt(np.maximum(beta * beta - alpha * c, 0.0))
    big = np.where(beta >= 0, beta + disc, disc - beta)
    pos = np.where(beta >= 0, -c / big, big / alpha)
    neg = np.where(beta >= 0, big / alpha, -c / big)
    return neg, pos


def quadric_intervals_numpy(X, Y, center, Q):
    """Intervals for the body {p : (p-c)^T Q (p-c) < 1}."""
    X = np.asarray(X, dtype=np.float64)
    Y = np.asarray(Y, dtype=np.float64)
    D = Y - X
    U = X - center
    V = Y - center
    DQ = D @ Q
    alpha = np.einsum("ij,ij->i", DQ, D)
    bx = np.einsum("ij,ij->i", DQ, U)
    by = np.einsum("ij,ij->i", DQ, V)
    cx = np.einsum("ij,ij->i", U @ Q, U) - 1.0
    cy = np.einsum("ij,ij->i", V @ Q, V) - 1.0
    still = alpha == 0
    alpha = np.where(still, 1.0, alpha)
    neg_x, pos_x = _roots_numpy(alpha, bx, cx)
    neg_y, pos_y = _roots_numpy(alpha, by, cy)
    for arr in (neg_x, pos_x, neg_y, pos_y):
        arr[still] = 1.0
    return neg_x, pos_x, neg_y, pos_y


def _quadric_intervals_loop(X, Y, center, Q):
    n, dim = X.shape
    neg_x = np.empty(n)
    pos_x = np.empty(n)
    neg_y = np.empty(n)
    pos_y = np.empty(n)
    for p in range(n):
        alpha = 0.0
        bx = 0.0
        by = 0.0
        cx = -1.0
        cy = -1.0
        for i in range(dim):
            di = Y[p, i] - X[p, i]
            ui = X[p, i] - center[i]
            vi = Y[p, i] - center[i]
            for j in range(dim):
                q = Q[i, j]
                dj = Y[p, j] - X[p, j]
                alpha += di * q * dj
                bx += di * q * (X[p, j] - center[j])
                by += di * q * (Y[p, j] - center[j])
                cx += ui * q * (X[p, j] - center[j])
                cy += vi * q * (Y[p, j] - center[j])
        if alpha == 0.0:
            neg_x[p] = 1.0
            pos_x[p] = 1.0
            neg_y[p] = 1.0
            pos_y[p] = 1.0
            continue
        for which in range(2):
            beta = bx if which == 0 else by
            c = cx if which == 0 else cy
            disc = np.sqrt(max(beta * beta - alpha * c, 0.0))
            if beta >= 0.0:
                big = beta + disc
                pos = -c / big
                neg = big / alpha
            else:
                big = disc - beta
                pos = big / alpha
                neg = -c / big
            if which == 0:
                neg_x[p] = neg
                pos_x[p] = pos
            else:
                neg_y[p] = neg
                pos_y[p] = pos
    return neg_x, pos_x, neg_y, pos_y


quadric_intervals_jit = njit(_quadric_intervals_loop)


# -- simplex closed form ----------------------------------------------------

def simplex_spread_numpy(X, Y):
    """log(max_i x_i/y_i) - log(min_i x_i/y_i) row-wise."""
    L = np.log(np.asarray(X, dtype=np.float64)) - np.log(np.asarray(Y, dtype=np.float64))
    return L.max(axis=1) - L.min(axis=1)


def _simplex_spread_loop(X, Y):
    n, dim = X.shape
    out = np.empty(n)
    for p in range(n):
        hi = -np.inf
        lo = np.inf
        for i in range(dim):
            v = np.log(X[p, i]) - np.log(Y[p, i])
            if v > hi:
                hi = v
            if v < lo:
                lo = v
        out[p] = hi - lo
    return out


simplex_spread_jit = njit(_simplex_spread_loop)


def cross_ratio_log(neg_x, pos_x, neg_y, pos_y):
    """log of the cross-ratio ((1-t_min)/(-t_min)) * (t_max/(t_max-1))."""
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.log(neg_y / neg_x) + np.log(pos_x / pos_y)


def _as_2d(a):
    return np.ascontiguousarray(np.atleast_2d(np.asarray(a, dtype=np.float64)))


if USE_NUMBA:
    def slack_intervals(SX, SY):
        return slack_intervals_jit(_as_2d(SX), _as_2d(SY))

    def quadric_intervals(X, Y, center, Q):
        return quadric_intervals_jit(_as_2d(X), _as_2d(Y),
                                     np.ascontiguousarray(center, dtype=np.float64),
                                     np.ascontiguousarray(Q, dtype=np.float64))

    def simplex_spread(X, Y):
        return simplex_spread_jit(_as_2d(X), _as_2d(Y))
else:
    slack_intervals = slack_intervals_numpy
    quadric_intervals = quadric_intervals_numpy
    simplex_spread = simplex_spread_numpy
