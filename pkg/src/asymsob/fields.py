"""Compactly supported test functions with analytic gradients."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, replace

import numpy as np

from . import _kernels as kern
from .quadrature import gauss_legendre

BUILTINS = {
    "zero": kern.ZERO,
    "hat1d": kern.HAT1D,
    "bump": kern.BUMP,
    "tent_tensor": kern.TENT,
    "cone_inf": kern.CONE_INF,
    "quadratic_spline": kern.QSPLINE,
    "ramp1d": kern.RAMP1D,
}

_SMOOTHNESS = {
    "zero": "C∞",
    "hat1d": "Lipschitz",
    "bump": "C∞",
    "tent_tensor": "Lipschitz",
    "cone_inf": "Lipschitz",
    "quadratic_spline": "Lipschitz",
    "ramp1d": "Lipschitz",
}

# fields whose gradient jumps only across coordinate hyperplanes through
# the axis breaks; tensor Gauss split at those breaks is accurate for them
_AXIS_KINKS = {"zero", "hat1d", "bump", "tent_tensor", "ramp1d"}


@dataclass(frozen=True)
class ScalarField:
    """``f(x) = amplitude * F(x - center)`` for a builtin profile ``F``."""

    name: str
    dim: int
    center: tuple
    amplitude: float = 1.0

    def __post_init__(self):
        if self.name not in BUILTINS:
            raise ValueError(f"unknown builtin field {self.name!r}")
        if self.name in ("hat1d", "ramp1d") and self.dim != 1:
            raise ValueError(f"{self.name} is one-dimensional")
        if self.dim < 1 or len(self.center) != self.dim:
            raise ValueError("center must have length dim")

    @property
    def code(self):
        return BUILTINS[self.name]

    @property
    def params(self):
        return np.array([self.amplitude, *self.center], dtype=float)

    @property
    def smoothness(self):
        return _SMOOTHNESS[self.name]

    @property
    def support(self):
        """Axis-aligned box ``(lo, hi)`` containing supp f."""
        c = np.array(self.center, dtype=float)
        if self.name == "ramp1d":
            return c, c + 1.0
        return c - 1.0, c + 1.0

    @property
    def diameter(self):
        lo, hi = self.support
        return float(np.linalg.norm(hi - lo))

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return kern.field_values(self.code, self.params, x)

    def negated(self):
        return replace(self, amplitude=-self.amplitude)

    def scaled(self, c):
        return replace(self, amplitude=self.amplitude * c)

    def translated(self, shift):
        shift = np.asarray(shift, dtype=float)
        return replace(self, center=tuple(float(v) for v in np.asarray(self.center) + shift))

    def gradient(self, x):
        x = np.asarray(x, dtype=float)
        y = x - np.asarray(self.center, dtype=float)
        a = self.amplitude
        name = self.name
        if name == "zero":
            return np.zeros_like(y)
        if name == "hat1d":
            t = y[..., 0]
            g = np.where(np.abs(t) < 1.0, np.where(t < 0.0, 1.0, -1.0), 0.0)
            return a * g[..., None]
        if name == "ramp1d":
            t = y[..., 0]
            return a * np.where((t >= 0.0) & (t < 1.0), -1.0, 0.0)[..., None]
        if name == "bump":
            q = np.sum(y * y, axis=-1)
            inside = q < 1.0
            den = np.where(inside, 1.0 - q, 1.0)
            val = np.where(inside, np.exp(-1.0 / den) / den ** 2, 0.0)
            return a * (-2.0 * y * val[..., None])
        if name == "tent_tensor":
            fac = np.maximum(0.0, 1.0 - np.abs(y))
            # one-sided derivative (from the right) on the kink set y_i = 0
            sgn = np.where(y < 0.0, 1.0, -1.0) * (np.abs(y) < 1.0)
            out = np.empty_like(y)
            for i in range(self.dim):
                others = np.prod(np.delete(fac, i, axis=-1), axis=-1)
                out[..., i] = sgn[..., i] * others
            return a * out
        if name == "cone_inf":
            ay = np.abs(y)
            k = np.argmax(ay, axis=-1)
            inside = np.max(ay, axis=-1) < 1.0
            yk = np.take_along_axis(y, k[..., None], axis=-1)[..., 0]
            out = np.zeros_like(y)
            np.put_along_axis(out, k[..., None], (np.where(yk < 0.0, 1.0, -1.0) * inside)[..., None], axis=-1)
            return a * out
        if name == "quadratic_spline":
            rho = np.sqrt(np.sum(y * y, axis=-1))
            safe = np.where(rho > 0.0, rho, 1.0)
            outer = np.where(rho < 1.0, -4.0 * (1.0 - rho) / safe, 0.0)
            fac = np.where(rho <= 0.5, -4.0, outer)
            return a * y * fac[..., None]
        raise AssertionError(name)

    def axis_breaks(self):
        """Per-axis coordinates across which the field or its gradient may jump."""
        lo, hi = self.support
        c = np.asarray(self.center, dtype=float)
        out = []
        for i in range(self.dim):
            pts = {lo[i], hi[i]}
            if self.name in ("hat1d", "tent_tensor", "cone_inf", "quadratic_spline"):
                pts.add(c[i])
            out.append(np.array(sorted(pts)))
        return out

    def line_support(self, base, u):
        """Parameter interval of ``{base + t u}`` inside the support box, or None."""
        lo, hi = self.support
        tlo, thi = -np.inf, np.inf
        for i in range(self.dim):
            if abs(u[i]) < 1e-300:
                if not lo[i] <= base[i] <= hi[i]:
                    return None
                continue
            a = (lo[i] - base[i]) / u[i]
            b = (hi[i] - base[i]) / u[i]
            tlo = max(tlo, min(a, b))
            thi = min(thi, max(a, b))
        if not thi > tlo:
            return None
        return float(tlo), float(thi)

    def line_breakpoints(self, base, u):
        """Sorted kinks of ``t -> f(base + t u)``, support ends included."""
        span = self.line_support(base, u)
        if span is None:
            return np.empty(0)
        tlo, thi = span
        base = np.asarray(base, dtype=float)
        u = np.asarray(u, dtype=float)
        y0 = base - np.asarray(self.center, dtype=float)
        cand = []
        name = self.name
        if name in ("hat1d", "tent_tensor"):
            for i in range(self.dim):
                if u[i] != 0.0:
                    cand += [(k - y0[i]) / u[i] for k in (-1.0, 0.0, 1.0)]
        elif name == "ramp1d":
            cand += [(k - y0[0]) / u[0] for k in (0.0, 1.0)]
        elif name == "cone_inf":
            for i in range(self.dim):
                if u[i] != 0.0:
                    cand += [(k - y0[i]) / u[i] for k in (-1.0, 1.0)]
                for j in range(i + 1, self.dim):
                    for sg in (1.0, -1.0):
                        den = u[i] - sg * u[j]
                        if den != 0.0:
                            cand.append(-(y0[i] - sg * y0[j]) / den)
        elif name in ("bump", "quadratic_spline"):
            radii = (1.0,) if name == "bump" else (0.5, 1.0)
            b = float(y0 @ u)
            q = float(y0 @ y0)
            for rad in radii:
                disc = b * b - (q - rad * rad)
                if disc > 0.0:
                    sq = np.sqrt(disc)
                    cand += [-b - sq, -b + sq]
        pts = [t for t in cand if tlo < t < thi]
        return np.unique(np.array([tlo, *pts, thi]))

    def to_dict(self):
        return {
            "name": self.name,
            "dim": self.dim,
            "params": {"center": list(self.center), "amplitude": self.amplitude},
        }


def builtin_field(name, n, params=None):
    params = dict(params or {})
    center = params.pop("center", None)
    amplitude = params.pop("amplitude", 1.0)
    if params:
        raise ValueError(f"unknown field parameter(s): {', '.join(sorted(params))}")
    if name not in BUILTINS:
        raise ValueError(f"unknown builtin field {name!r}")
    if center is None:
        center = (0.0,) * n
    return ScalarField(name, int(n), tuple(float(c) for c in center), float(amplitude))


def field_from_dict(spec):
    """Parse ``{"name": ..., "dim": n, "params": {...}}``."""
    allowed = {"name", "dim", "params"}
    extra = set(spec) - allowed
    if extra:
        raise ValueError(f"unknown function field(s): {', '.join(sorted(extra))}")
    if "name" not in spec or "dim" not in spec:
        raise ValueError("function spec needs 'name' and 'dim'")
    return builtin_field(spec["name"], int(spec["dim"]), spec.get("params"))


@dataclass(frozen=True)
class LineRestriction:
    """``g(t) = f(base + t*direction)``."""

    field: ScalarField
    base: np.ndarray
    direction: np.ndarray
    support: tuple | None
    breakpoints: np.ndarray

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        return self.field(self.base + t[..., None] * self.direction)

    def derivative(self, t):
        t = np.asarray(t, dtype=float)
        return self.field.gradient(self.base + t[..., None] * self.direction) @ self.direction

    @property
    def empty(self):
        return self.support is None


def restrict_to_line(f, z, u):
    z = np.asarray(z, dtype=float)
    u = np.asarray(u, dtype=float)
    if z.shape != (f.dim,) or u.shape != (f.dim,):
        raise ValueError("z and u must be vectors of the field's dimension")
    if abs(np.linalg.norm(u) - 1.0) > 1e-12:
        raise ValueError("direction must be a unit vector")
    if abs(z @ u) > 1e-10 * max(1.0, np.linalg.norm(z)):
        raise ValueError("base point z must lie in the orthogonal complement of u")
    brk = f.line_breakpoints(z, u)
    span = (float(brk[0]), float(brk[-1])) if brk.size else None
    return LineRestriction(f, z, u, span, brk)


def as_line(g):
    """Accept a LineRestriction or a 1-d ScalarField."""
    if isinstance(g, LineRestriction):
        return g
    if isinstance(g, ScalarField):
        if g.dim != 1:
            raise ValueError("only 1-d fields can be used as line functions")
        return restrict_to_line(g, np.zeros(1), np.ones(1))
    raise TypeError("expected a LineRestriction or 1-d ScalarField")


def tensor_rule(f, order=8, panels=8, box=None, axis_breaks=None):
    """Tensor Gauss rule over the support box split at the field's axis breaks."""
    lo, hi = box if box is not None else f.support
    breaks = axis_breaks if axis_breaks is not None else f.axis_breaks()
    axes_x, axes_w = [], []
    for i in range(f.dim):
        pts = np.unique(np.clip(np.concatenate([[lo[i], hi[i]], breaks[i]]), lo[i], hi[i]))
        xs, ws = [], []
        for a, b in zip(pts[:-1], pts[1:]):
            sub = np.linspace(a, b, panels + 1)
            for c, d in zip(sub[:-1], sub[1:]):
                x, w = gauss_legendre(order, c, d)
                xs.append(x)
                ws.append(w)
        axes_x.append(np.concatenate(xs))
        axes_w.append(np.concatenate(ws))
    grids = np.meshgrid(*axes_x, indexing="ij")
    X = np.stack([g.ravel() for g in grids], axis=-1)
    W = np.ones(X.shape[0])
    for i, w in enumerate(np.meshgrid(*axes_w, indexing="ij")):
        W = W * w.ravel()
    return X, W


def power_masses(f, p, order=8, panels=8):
    """``(int f_+^p, int f_-^p)`` over R^n by tensor Gauss."""
    X, W = tensor_rule(f, order, panels)
    v = f(X)
    return float(np.sum(W * np.maximum(v, 0.0) ** p)), float(np.sum(W * np.maximum(-v, 0.0) ** p))


def _gauge_values(gauge, V, seed=None):
    from .geometry import CombinedGauge, ConvexBody, MomentNormSpec, combined_gauge_eval, minkowski_functional, moment_norm

    if isinstance(gauge, MomentNormSpec):
        return moment_norm(gauge, V, seed=seed)
    if isinstance(gauge, CombinedGauge):
        return combined_gauge_eval(gauge, V, seed=seed)
    if isinstance(gauge, ConvexBody):
        return minkowski_functional(gauge, V)
    if callable(gauge):
        return np.asarray(gauge(V), dtype=float)
    raise TypeError("unsupported gauge")


def rhs_rule_for(f):
    if f.smoothness in ("C∞", "C²") or f.name in _AXIS_KINKS:
        return "gauss"
    return "mc"


def grad_gauge_integral(f, gauge, p, rule="auto", order=8, panels=8, samples=200_000, seed=None, return_error=False):
    """``int ||grad f(x)||^p dx`` for a gauge on gradient vectors.

    ``rule`` is "gauss" (tensor Gauss split at axis breaks), "mc" (uniform
    samples in the support box; needs ``seed``) or "auto".
    """
    if rule == "auto":
        rule = rhs_rule_for(f)
    if rule == "gauss":
        X, W = tensor_rule(f, order, panels)
        G = f.gradient(X)
        vals = _gauge_values(gauge, G, seed=seed) ** p
        total = float(np.sum(W * vals))
        return (total, 0.0) if return_error else total
    if rule == "mc":
        if seed is None:
            raise ValueError("Monte Carlo gradient integral needs a seed")
        lo, hi = f.support
        rng = np.random.default_rng(seed)
        X = lo + (hi - lo) * rng.random((samples, f.dim))
        vol = float(np.prod(hi - lo))
        vals = vol * _gauge_values(gauge, f.gradient(X), seed=seed) ** p
        total = float(np.mean(vals))
        err = float(np.std(vals, ddof=1) / np.sqrt(samples))
        return (total, err) if return_error else total
    raise ValueError(f"unknown rule {rule!r}")


def box_corners(lo, hi):
    return np.array(list(itertools.product(*zip(lo, hi))), dtype=float)
