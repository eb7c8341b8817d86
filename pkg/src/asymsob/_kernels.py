"""Hot loops: builtin field evaluation and per-line increment integrals.

Every kernel exists twice, as a numba ``@njit`` function and as a
vectorised numpy function.  The numba path is used unless numba is
missing or the environment variable ``ASYMSOB_DISABLE_NUMBA`` is set to a
true value.  Both paths compute the same sums; only the summation order
differs.
"""

from __future__ import annotations

import math
import os

import numpy as np

ZERO, HAT1D, BUMP, TENT, CONE_INF, QSPLINE, RAMP1D = range(7)


def _flag_set(name):
    return os.environ.get(name, "").strip().lower() not in ("", "0", "false", "no")


try:
    import numba
    from numba import njit, prange

    # prefer OpenMP; probing an outdated TBB only produces warnings
    numba.config.THREADING_LAYER_PRIORITY = ["omp", "tbb", "workqueue"]
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

HAVE_NUMBA = numba is not None
USE_NUMBA = HAVE_NUMBA and not _flag_set("ASYMSOB_DISABLE_NUMBA")


def backend():
    return "numba" if USE_NUMBA else "numpy"


def set_threads(count):
    """Cap numba's worker pool; returns the count actually in effect."""
    if not HAVE_NUMBA or count is None:
        return 1 if not HAVE_NUMBA else numba.get_num_threads()
    count = max(1, min(int(count), numba.config.NUMBA_NUM_THREADS))
    numba.set_num_threads(count)
    return count


# ---------------------------------------------------------------- numpy path


def field_values_numpy(code, params, X):
    X = np.asarray(X, dtype=float)
    amp = params[0]
    Y = X - params[1:]
    if code == ZERO:
        return np.zeros(X.shape[:-1])
    if code == HAT1D:
        return amp * np.maximum(0.0, 1.0 - np.abs(Y[..., 0]))
    if code == BUMP:
        q = np.sum(Y * Y, axis=-1)
        inside = q < 1.0
        den = np.where(inside, 1.0 - q, 1.0)
        return amp * np.where(inside, np.exp(-1.0 / den), 0.0)
    if code == TENT:
        return amp * np.prod(np.maximum(0.0, 1.0 - np.abs(Y)), axis=-1)
    if code == CONE_INF:
        return amp * np.maximum(0.0, 1.0 - np.max(np.abs(Y), axis=-1))
    if code == QSPLINE:
        rho = np.sqrt(np.sum(Y * Y, axis=-1))
        inner = 1.0 - 2.0 * rho * rho
        outer = 2.0 * (1.0 - rho) * (1.0 - rho)
        return amp * np.where(rho <= 0.5, inner, np.where(rho < 1.0, outer, 0.0))
    if code == RAMP1D:
        t = Y[..., 0]
        return amp * np.where((t >= 0.0) & (t <= 1.0), 1.0 - t, 0.0)
    raise ValueError(f"unknown field code {code}")


def line_profiles_numpy(code, params, bases, dirs, breaks, nbreaks, r_nodes, p, wlo, whi, gx, gw, nsub):
    L = bases.shape[0]
    R = r_nodes.size
    out = np.zeros((L, R, 2))
    frac = ((np.arange(nsub)[:, None] + 0.5 * (gx[None, :] + 1.0)) / nsub).ravel()
    fw = np.tile(0.5 * gw / nsub, nsub)
    for l in range(L):
        k = nbreaks[l]
        if k < 2:
            continue
        brk = breaks[l, :k]
        lo = np.maximum(brk[0] - r_nodes, wlo)
        hi = np.minimum(brk[-1], whi - r_nodes)
        live = hi > lo
        if not np.any(live):
            continue
        r = r_nodes[live]
        lo, hi = lo[live], hi[live]
        cand = np.concatenate(
            [np.broadcast_to(brk, (r.size, k)), brk[None, :] - r[:, None], lo[:, None], hi[:, None]],
            axis=1,
        )
        cand = np.clip(cand, lo[:, None], hi[:, None])
        cand.sort(axis=1)
        a = cand[:, :-1]
        width = cand[:, 1:] - a
        W = a[..., None] + width[..., None] * frac
        WT = width[..., None] * fw
        base = bases[l]
        u = dirs[l]
        g0 = field_values_numpy(code, params, base + W[..., None] * u)
        g1 = field_values_numpy(code, params, base + (W + r[:, None, None])[..., None] * u)
        d = g1 - g0
        pos = np.where(d > 0.0, d, 0.0)
        neg = np.where(d < 0.0, -d, 0.0)
        out[l, live, 0] = np.sum(WT * pos ** p, axis=(1, 2))
        out[l, live, 1] = np.sum(WT * neg ** p, axis=(1, 2))
    return out


# ---------------------------------------------------------------- numba path

if HAVE_NUMBA:

    @njit(cache=True)
    def _fval(code, params, base, u, t):
        amp = params[0]
        n = base.shape[0]
        if code == ZERO:
            return 0.0
        if code == HAT1D or code == RAMP1D:
            y = base[0] + t * u[0] - params[1]
            if code == HAT1D:
                a = 1.0 - abs(y)
                return amp * a if a > 0.0 else 0.0
            if y >= 0.0 and y <= 1.0:
                return amp * (1.0 - y)
            return 0.0
        if code == TENT:
            acc = 1.0
            for i in range(n):
                a = 1.0 - abs(base[i] + t * u[i] - params[1 + i])
                if a <= 0.0:
                    return 0.0
                acc *= a
            return amp * acc
        if code == CONE_INF:
            m = 0.0
            for i in range(n):
                a = abs(base[i] + t * u[i] - params[1 + i])
                if a > m:
                    m = a
            return amp * (1.0 - m) if m < 1.0 else 0.0
        q = 0.0
        for i in range(n):
            y = base[i] + t * u[i] - params[1 + i]
            q += y * y
        if code == BUMP:
            return amp * math.exp(-1.0 / (1.0 - q)) if q < 1.0 else 0.0
        if code == QSPLINE:
            rho = math.sqrt(q)
            if rho <= 0.5:
                return amp * (1.0 - 2.0 * rho * rho)
            if rho < 1.0:
                return amp * (2.0 * (1.0 - rho) * (1.0 - rho))
            return 0.0
        return math.nan

    @njit(cache=True)
    def _field_values_nb(code, params, X):
        m = X.shape[0]
        out = np.empty(m)
        u = np.zeros(X.shape[1])
        for i in range(m):
            out[i] = _fval(code, params, X[i], u, 0.0)
        return out

    @njit(parallel=True, cache=True)
    def _line_profiles_nb(code, params, bases, dirs, breaks, nbreaks, r_nodes, p, wlo, whi, gx, gw, nsub):
        L = bases.shape[0]
        R = r_nodes.shape[0]
        m = gx.shape[0]
        out = np.zeros((L, R, 2))
        for l in prange(L):
            k = nbreaks[l]
            if k < 2:
                continue
            base = bases[l]
            u = dirs[l]
            tlo = breaks[l, 0]
            thi = breaks[l, k - 1]
            pts = np.empty(2 * k + 2)
            for j in range(R):
                r = r_nodes[j]
                lo = max(tlo - r, wlo)
                hi = min(thi, whi - r)
                if hi <= lo:
                    continue
                cnt = 2
                pts[0] = lo
                pts[1] = hi
                for i in range(k):
                    b = breaks[l, i]
                    if lo < b < hi:
                        pts[cnt] = b
                        cnt += 1
                    b = b - r
                    if lo < b < hi:
                        pts[cnt] = b
                        cnt += 1
                seg = np.sort(pts[:cnt])
                acc_p = 0.0
                acc_m = 0.0
                for i in range(cnt - 1):
                    a = seg[i]
                    width = seg[i + 1] - a
                    if width <= 0.0:
                        continue
                    h = width / nsub
                    for q in range(nsub):
                        left = a + q * h
                        for g in range(m):
                            w = left + 0.5 * h * (gx[g] + 1.0)
                            wt = 0.5 * h * gw[g]
                            d = _fval(code, params, base, u, w + r) - _fval(code, params, base, u, w)
                            if d > 0.0:
                                acc_p += wt * d ** p
                            elif d < 0.0:
                                acc_m += wt * (-d) ** p
                out[l, j, 0] = acc_p
                out[l, j, 1] = acc_m
        return out


# ---------------------------------------------------------------- dispatch


def field_values(code, params, X, use_numba=None):
    """Evaluate a builtin field at the rows of ``X`` (shape (..., n))."""
    use = USE_NUMBA if use_numba is None else use_numba
    X = np.asarray(X, dtype=float)
    if not use:
        return field_values_numpy(code, params, X)
    flat = np.ascontiguousarray(X.reshape(-1, X.shape[-1]))
    return _field_values_nb(int(code), np.asarray(params, dtype=float), flat).reshape(X.shape[:-1])


def line_profiles(code, params, bases, dirs, breaks, nbreaks, r_nodes, p, wlo, whi, gx, gw, nsub, use_numba=None):
    """Increment integrals along lines.

    For line ``l`` (points ``bases[l] + t*dirs[l]``) and radius ``r_nodes[j]``
    returns ``out[l, j, 0] = int (g(w+r) - g(w))_+^p dw`` and
    ``out[l, j, 1] = int (g(w+r) - g(w))_-^p dw`` with ``w`` restricted to
    ``[wlo, whi - r]``.  ``breaks[l, :nbreaks[l]]`` are the sorted kinks of
    the restriction, first and last being the support ends.
    """
    use = USE_NUMBA if use_numba is None else use_numba
    args = (
        int(code),
        np.ascontiguousarray(params, dtype=float),
        np.ascontiguousarray(bases, dtype=float),
        np.ascontiguousarray(dirs, dtype=float),
        np.ascontiguousarray(breaks, dtype=float),
        np.ascontiguousarray(nbreaks, dtype=np.int64),
        np.ascontiguousarray(r_nodes, dtype=float),
        float(p),
        float(wlo),
        float(whi),
        np.ascontiguousarray(gx, dtype=float),
        np.ascontiguousarray(gw, dtype=float),
        int(nsub),
    )
    if use:
        return _line_profiles_nb(*args)
    return line_profiles_numpy(*args)
