"""Estimators of the asymmetric anisotropic fractional seminorm

    E_s(f) = int int (f(x) - f(y))_+^p / ||x - y||_K^(n + s p) dx dy

and of its one-dimensional building block.  Both deterministic paths
work in polar coordinates around ``y`` and reduce the inner integral to
one-dimensional increment integrals along lines; the part of the kernel
beyond the support diameter is added in closed form.
"""

from __future__ import annotations

import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.special import roots_jacobi

from . import _kernels as kern
from .fields import as_line, power_masses
from .geometry import minkowski_functional
from .quadrature import gauss_legendre, graded_radial_rule, sphere_area, sphere_grid

DEFAULT_PANELS = 48
DEFAULT_PER_PANEL = 8
DEFAULT_GRADING = 3.0
DEFAULT_LINES_PER_DIAMETER = 64
DEFAULT_SPHERE_RESOLUTION = {1: 2, 2: 128, 3: 16}


@dataclass
class SeminormEstimate:
    value: float
    std_error: float
    method: str
    s: float
    p: float
    sign: str
    budget: dict = field(default_factory=dict)
    elapsed: float = 0.0  # milliseconds


def _default_rule(cutoff, radial):
    if radial is None:
        return graded_radial_rule(cutoff, DEFAULT_PANELS, DEFAULT_PER_PANEL, DEFAULT_GRADING)
    if isinstance(radial, dict):
        return graded_radial_rule(cutoff, **radial)
    if abs(radial.cutoff - cutoff) > 1e-12 * cutoff:
        raise ValueError("radial rule cutoff differs from the requested cutoff")
    return radial


def _pack_lines(f, lines):
    bases, dirs, brks = [], [], []
    for base, u in lines:
        bases.append(base)
        dirs.append(u)
        brks.append(f.line_breakpoints(base, u))
    width = max((b.size for b in brks), default=0)
    breaks = np.zeros((len(lines), max(width, 1)))
    nbreaks = np.zeros(len(lines), dtype=np.int64)
    for i, b in enumerate(brks):
        breaks[i, : b.size] = b
        nbreaks[i] = b.size
    return np.array(bases, dtype=float).reshape(len(lines), f.dim), np.array(dirs, dtype=float).reshape(len(lines), f.dim), breaks, nbreaks


@dataclass
class SphericalProfile:
    """Direction-resolved increment integrals of a field.

    ``plus[k, j]`` is ``sum_z |cell| * int (g(w+r_j) - g(w))_+^p dw`` over
    the lines of direction ``k``; ``minus`` the same with the negative
    part; ``mass[k]`` is ``sum_z |cell| * int |g|^p`` (the far-field
    weight).  None of this depends on the body or on ``s``.
    """

    dim: int
    p: float
    cutoff: float
    grid: object
    rule: object
    plus: np.ndarray
    minus: np.ndarray
    mass: np.ndarray
    has_tail: bool = True
    budget: dict = field(default_factory=dict)

    def negated(self):
        """Profile of ``-f``: positive and negative increments swap."""
        return replace(self, plus=self.minus, minus=self.plus)

    def direction_values(self, s, sign="plus"):
        p = self.p
        if not 0.0 < s < 1.0:
            raise ValueError("s must lie in (0, 1)")
        eta = p * (1.0 - s) - 1.0
        w = self.rule.weights(eta) / self.rule.nodes ** p
        if sign == "plus":
            arr, tail_mult = self.plus, 1.0
        elif sign == "minus":
            arr, tail_mult = self.minus, 1.0
        elif sign == "abs":
            arr, tail_mult = self.plus + self.minus, 2.0
        else:
            raise ValueError(f"unknown sign {sign!r}")
        near = np.sum(arr * w, axis=1)
        if not self.has_tail:
            return near
        return near + tail_mult * self.mass * self.cutoff ** (-s * p) / (s * p)

    def estimate(self, K, s, sign="plus"):
        n = self.dim
        if K is None:
            gk = np.ones(self.grid.weights.size)
        else:
            if K.dim != n:
                raise ValueError("body dimension does not match the field")
            gk = minkowski_functional(K, self.grid.nodes) ** (-(n + self.p * s))
        return float(np.sum(self.grid.weights * gk * self.direction_values(s, sign)))


def _transverse_basis(u):
    n = u.size
    M = np.column_stack([u, np.eye(n)])
    Q, _ = np.linalg.qr(M)
    return Q[:, 1:n]


def _transverse_points(f, u, spacing):
    """Cell centres on u-perp covering the projected support box; returns (points, cell measure)."""
    n = f.dim
    if n == 1:
        return np.zeros((1, 1)), 1.0
    Q = _transverse_basis(u)
    lo, hi = f.support
    corners = np.array(np.meshgrid(*zip(lo, hi), indexing="ij")).reshape(n, -1).T
    proj = corners @ Q
    plo, phi = proj.min(axis=0), proj.max(axis=0)
    axes = []
    for a, b in zip(plo, phi):
        count = max(1, int(math.ceil((b - a) / spacing - 1e-12)))
        axes.append(a + spacing * (np.arange(count) + 0.5))
    coords = np.stack([g.ravel() for g in np.meshgrid(*axes, indexing="ij")], axis=-1)
    return coords @ Q.T, spacing ** (n - 1)


def build_spherical_profile(f, p, sphere=None, line_spacing=None, radial=None, *, cutoff=None, w_order=8, w_sub=2, threads=None, chunk_lines=4096, use_numba=None):
    """Increment integrals along every line of every sphere direction."""
    t0 = time.perf_counter()
    n = f.dim
    if p < 1:
        raise ValueError("p must be >= 1")
    diam = f.diameter
    cutoff = diam if cutoff is None else float(cutoff)
    if cutoff < diam * (1.0 - 1e-12):
        raise ValueError("cutoff must be at least the support diameter")
    if sphere is None:
        if n not in DEFAULT_SPHERE_RESOLUTION:
            raise ValueError("pass an explicit sphere grid for n >= 4")
        sphere = sphere_grid(n, DEFAULT_SPHERE_RESOLUTION[n])
    if sphere.dim != n:
        raise ValueError("sphere grid dimension does not match the field")
    spacing = diam / DEFAULT_LINES_PER_DIAMETER if line_spacing is None else float(line_spacing)
    rule = _default_rule(cutoff, radial)
    r_nodes = np.append(rule.nodes, 2.0 * cutoff)  # last node: far-field mass
    gx, gw = np.polynomial.legendre.leggauss(w_order)
    kern.set_threads(threads)

    N = sphere.weights.size
    if sphere.antipode is not None:
        reps = [k for k in range(N) if k <= sphere.antipode[k]]
    else:
        reps = list(range(N))

    R = rule.nodes.size
    plus = np.zeros((N, R))
    minus = np.zeros((N, R))
    mass = np.zeros(N)
    line_total = 0

    pending = []  # (direction index, lines, cell measure)

    def flush():
        if not pending:
            return
        lines = [ln for _, lns, _ in pending for ln in lns]
        bases, dirs, breaks, nbreaks = _pack_lines(f, lines)
        out = kern.line_profiles(f.code, f.params, bases, dirs, breaks, nbreaks, r_nodes, p, -np.inf, np.inf, gx, gw, w_sub, use_numba=use_numba)
        start = 0
        for k, lns, cell in pending:
            block = out[start : start + len(lns)]
            start += len(lns)
            tot = cell * np.sum(block, axis=0) if len(lns) else np.zeros((R + 1, 2))
            plus[k] = tot[:R, 0]
            minus[k] = tot[:R, 1]
            mass[k] = tot[R, 0]
            a = sphere.antipode[k] if sphere.antipode is not None else k
            if a != k:
                plus[a] = tot[:R, 1]
                minus[a] = tot[:R, 0]
                mass[a] = tot[R, 0]
        pending.clear()

    queued = 0
    for k in reps:
        u = sphere.nodes[k]
        pts, cell = _transverse_points(f, u, spacing)
        lns = [(z, u) for z in pts if f.line_support(z, u) is not None]
        line_total += len(lns)
        pending.append((k, lns, cell))
        queued += len(lns)
        if queued >= chunk_lines:
            flush()
            queued = 0
    flush()

    budget = {
        "directions": int(N),
        "lines": int(line_total),
        "line_spacing": spacing,
        "radial_nodes": int(R),
        "radial_panels": int(rule.panels),
        "radial_grading": rule.grading,
        "w_order": int(w_order),
        "w_sub": int(w_sub),
        "cutoff": cutoff,
        "backend": "numba" if (kern.USE_NUMBA if use_numba is None else use_numba) else "numpy",
        "profile_ms": 1e3 * (time.perf_counter() - t0),
    }
    return SphericalProfile(n, float(p), cutoff, sphere, rule, plus, minus, mass, True, budget)


def line_profile(g, p, cutoff=None, radial=None, *, domain=None, w_order=8, w_sub=2, use_numba=None):
    """Profile of a single line function (1-d field or LineRestriction).

    With ``domain=(a, b)`` both points of each pair are restricted to
    the interval and no far-field term exists.
    """
    g = as_line(g)
    if p < 1:
        raise ValueError("p must be >= 1")
    grid = sphere_grid(1)
    if g.empty:
        diam = 0.0
    else:
        diam = g.support[1] - g.support[0]
    if domain is not None:
        a, b = map(float, domain)
        if not b > a:
            raise ValueError("domain must be a nonempty interval")
        length = b - a
        cutoff = length if cutoff is None else float(cutoff)
        if cutoff < length * (1.0 - 1e-12):
            raise ValueError("cutoff must cover the domain length")
        wlo, whi = a, b
    else:
        cutoff = (diam if diam > 0 else 1.0) if cutoff is None else float(cutoff)
        if cutoff < diam * (1.0 - 1e-12):
            raise ValueError("cutoff R0 is smaller than the support diameter; the far-field formula would be wrong")
        wlo, whi = -np.inf, np.inf
    rule = _default_rule(cutoff, radial)
    R = rule.nodes.size
    plus = np.zeros((2, R))
    minus = np.zeros((2, R))
    mass = np.zeros(2)
    if not g.empty:
        r_nodes = np.append(rule.nodes, 2.0 * cutoff)
        gx, gw = np.polynomial.legendre.leggauss(w_order)
        out = kern.line_profiles(
            g.field.code, g.field.params, g.base[None, :], g.direction[None, :], g.breakpoints[None, :],
            np.array([g.breakpoints.size]), r_nodes, p, wlo, whi, gx, gw, w_sub, use_numba=use_numba,
        )[0]
        plus[0], minus[0] = out[:R, 0], out[:R, 1]
        plus[1], minus[1] = out[:R, 1], out[:R, 0]
        mass[:] = out[R, 0]
    budget = {"radial_nodes": int(R), "w_order": int(w_order), "w_sub": int(w_sub), "cutoff": cutoff, "domain": None if domain is None else [wlo, whi]}
    return SphericalProfile(1, float(p), cutoff, grid, rule, plus, minus, mass, domain is None, budget)


def gagliardo_1d_plus(g, p, s, R0=None, rule=None, *, domain=None, w_order=8, w_sub=2, profile=None):
    """``int int_{x > y} (g(x) - g(y))_+^p / |x - y|^(1 + p s) dx dy``.

    Near field ``r <= R0`` by the graded radial rule times Gauss in ``w``,
    far field in closed form ``R0^(-sp)/(sp) * (int g_+^p + int g_-^p)``.
    With ``domain`` both points are restricted to that interval.
    """
    if profile is None:
        profile = line_profile(g, p, R0, rule, domain=domain, w_order=w_order, w_sub=w_sub)
    return float(profile.direction_values(s, "plus")[0])


def _check_s(s):
    if not 0.0 < s < 1.0:
        raise ValueError("s must lie in (0, 1)")


def aniso_seminorm_spherical(f, K, p, s, sphere=None, line_spacing=None, radial=None, *, cutoff=None, profile=None, sign="plus", **kw):
    """Deterministic estimate through the polar/Fubini decomposition.

    sum_u w_u ||u||_K^{-(n+ps)} sum_z |cell| G(f restricted to z + R u).
    Passing a precomputed ``profile`` (from build_spherical_profile)
    skips the line integrals, which are independent of K and s.
    """
    _check_s(s)
    t0 = time.perf_counter()
    if K is not None and K.dim != f.dim:
        raise ValueError("body and field dimensions differ")
    if profile is None:
        profile = build_spherical_profile(f, p, sphere, line_spacing, radial, cutoff=cutoff, **kw)
    elif profile.p != p or profile.dim != f.dim:
        raise ValueError("profile does not match the field or p")
    value = profile.estimate(K, s, sign)
    return SeminormEstimate(value, 0.0, "spherical", s, p, sign, dict(profile.budget), 1e3 * (time.perf_counter() - t0))


def _sphere_factor(K, n, p, s, seed):
    expo = -(n + p * s)
    if n == 1:
        return float(np.sum(minkowski_functional(K, np.array([[1.0], [-1.0]])) ** expo))
    if n in (2, 3):
        grid = sphere_grid(n, 4096 if n == 2 else 96)
    else:
        grid = sphere_grid(n, 1 << 16, mode="mc", seed=seed)
    return grid.integrate(lambda u: minkowski_functional(K, u) ** expo)


SMALL_RADIUS = 1e-7


def aniso_seminorm_mc(f, K, p, s, samples=1_000_000, seed=None, R0=None, *, batch=1 << 16, threads=None, sign="plus"):
    """Monte Carlo estimate of the same decomposition.

    ``y`` uniform in the support box grown by ``R0``, ``u`` uniform on the
    sphere, ``r`` with density proportional to ``r^(p(1-s)-1)`` on (0, R0];
    the far field beyond ``R0`` is added analytically.  Deterministic per
    (seed, samples, batch) at any thread count.
    """
    _check_s(s)
    if seed is None:
        raise ValueError("Monte Carlo estimator needs an explicit seed")
    if sign not in ("plus", "abs"):
        raise ValueError("sign must be 'plus' or 'abs' (use seminorm_minus for the negative part)")
    if K.dim != f.dim:
        raise ValueError("body and field dimensions differ")
    t0 = time.perf_counter()
    n = f.dim
    diam = f.diameter
    R0 = diam if R0 is None else float(R0)
    if R0 < diam * (1.0 - 1e-12):
        raise ValueError("R0 must be at least the support diameter")
    lo, hi = f.support
    elo, ehi = lo - R0, hi + R0
    vol = float(np.prod(ehi - elo))
    eta = p * (1.0 - s) - 1.0
    a = eta + 1.0
    Z = R0 ** a / a
    scale = vol * sphere_area(n) * Z
    expo = -(n + p * s)
    nb = max(1, math.ceil(samples / batch))
    sizes = [batch] * (nb - 1) + [samples - batch * (nb - 1)]
    seqs = np.random.SeedSequence(seed).spawn(nb)

    def run(i):
        rng = np.random.default_rng(seqs[i])
        m = sizes[i]
        y = elo + (ehi - elo) * rng.random((m, n))
        if n == 1:
            u = np.where(rng.random(m) < 0.5, 1.0, -1.0)[:, None]
        else:
            u = rng.standard_normal((m, n))
            u /= np.linalg.norm(u, axis=1, keepdims=True)
        r = R0 * (1.0 - rng.random(m)) ** (1.0 / a)
        # near s = 1 most radii sit far below round-off scale (or underflow);
        # there the difference quotient is replaced by the directional derivative
        tiny = r < SMALL_RADIUS * R0
        rs = np.where(tiny, 1.0, r)
        q = (f(y + rs[:, None] * u) - f(y)) / rs
        if np.any(tiny):
            q[tiny] = np.sum(f.gradient(y[tiny]) * u[tiny], axis=1)
        inc = np.maximum(q, 0.0) if sign == "plus" else np.abs(q)
        val = scale * minkowski_functional(K, u) ** expo * inc ** p
        return np.sum(val), np.sum(val * val)

    workers = (os.cpu_count() or 1) if threads is None else max(1, int(threads))
    if workers == 1:
        parts = [run(i) for i in range(nb)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(run, range(nb)))
    sums = np.array([q[0] for q in parts])
    sqs = np.array([q[1] for q in parts])
    total, total_sq = float(np.sum(sums)), float(np.sum(sqs))
    mean = total / samples
    var = max(0.0, (total_sq / samples - mean * mean) * samples / max(samples - 1, 1))
    err = math.sqrt(var / samples)

    mp, mm = power_masses(f, p)
    tail_mass = (mp + mm) * (2.0 if sign == "abs" else 1.0)
    tail = tail_mass * R0 ** (-s * p) / (s * p) * _sphere_factor(K, n, p, s, seed)
    budget = {"samples": int(samples), "seed": int(seed), "batch": int(batch), "cutoff": R0, "box_volume": vol}
    return SeminormEstimate(mean + tail, err, "pair_mc", s, p, sign, budget, 1e3 * (time.perf_counter() - t0))


def seminorm_minus(f, K, p, s, method="spherical", *, profile=None, **kw):
    """Negative-part seminorm, computed as the plus-estimator applied to ``-f``."""
    g = f.negated()
    if method == "spherical":
        prof = profile.negated() if profile is not None else None
        est = aniso_seminorm_spherical(g, K, p, s, profile=prof, **kw)
    elif method in ("mc", "pair_mc"):
        est = aniso_seminorm_mc(g, K, p, s, **kw)
    elif method == "onedim":
        est = SeminormEstimate(gagliardo_1d_plus(g, p, s, **kw), 0.0, "onedim", s, p, "plus")
    else:
        raise ValueError(f"unknown method {method!r}")
    est.sign = "minus"
    return est


# ---------------------------------------------------------------- mollifier identity


def _increment_integral(g, r, p, a, b, order):
    # int_{a <= w, w + r <= b} (g(w+r) - g(w))_+^p dw, Gauss per kink interval
    brk = g.breakpoints
    lo, hi = max(a, brk[0] - r), min(b - r, brk[-1])
    if hi <= lo:
        return 0.0
    pts = np.concatenate([[lo, hi], brk, brk - r])
    pts = np.unique(pts[(pts >= lo) & (pts <= hi)])
    x, w = np.polynomial.legendre.leggauss(order)
    left, right = pts[:-1], pts[1:]
    half = 0.5 * (right - left)
    W = (left + right)[:, None] * 0.5 + half[:, None] * x
    d = g(W + r) - g(W)
    return float(np.sum(half[:, None] * w * np.maximum(d, 0.0) ** p))


def mollifier_form_check(g, p, s, R, *, domain=None, order=12, jacobi_order=24, sub=4):
    """Compare the mollified difference-quotient integral with the scaled seminorm.

    lhs = int int_{x>y} (g(x)-g(y))_+^p/|x-y|^p * rho_eps(x-y) dx dy  (eps = 1-s)
    rhs = p (1-s) R^(-(1-s) p) * gagliardo_1d_plus(g restricted to domain)

    lhs uses a Gauss-Jacobi rule in ``r`` split at the kinks of the
    increment integral, independent of the graded rule behind ``rhs``.
    """
    g = as_line(g)
    _check_s(s)
    eps = 1.0 - s
    if domain is None:
        domain = g.support if not g.empty else (0.0, 1.0)
    a, b = map(float, domain)
    length = b - a
    if not R > length:
        raise ValueError("R must exceed the domain diameter")
    if g.empty:
        return 0.0, 0.0
    rhs = p * eps * R ** (-eps * p) * gagliardo_1d_plus(g, p, s, domain=(a, b))

    brk = g.breakpoints
    diffs = np.abs(brk[:, None] - brk[None, :]).ravel()
    knots = np.unique(np.concatenate([[0.0, length], diffs[(diffs > 0) & (diffs < length)]]))
    beta = p * eps - 1.0
    pref = p * eps / R ** (eps * p)
    lhs = 0.0
    D = lambda r: _increment_integral(g, r, p, a, b, order)
    # first panel: weight r^beta absorbed by Gauss-Jacobi
    h = knots[1]
    xj, wj = roots_jacobi(jacobi_order, 0.0, beta)
    rj = 0.5 * h * (xj + 1.0)
    wj = wj * (0.5 * h) ** (beta + 1.0)
    lhs += pref * sum(w * D(r) / r ** p for r, w in zip(rj, wj))
    for k in range(1, knots.size - 1):
        for c, d in zip(np.linspace(knots[k], knots[k + 1], sub + 1)[:-1], np.linspace(knots[k], knots[k + 1], sub + 1)[1:]):
            xr, wr = gauss_legendre(order, c, d)
            lhs += pref * sum(w * D(r) * r ** (beta - p) for r, w in zip(xr, wr))
    return float(lhs), float(rhs)
