"""Quadrature primitives: Gauss rules, graded radial rules, sphere grids,
power-law radius sampling and the s -> 1 extrapolation fit."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial.legendre import leggauss, legvander


def gauss_legendre(m, a=-1.0, b=1.0):
    """Return nodes and weights of the ``m``-point Gauss-Legendre rule on [a, b]."""
    if m < 1:
        raise ValueError("gauss_legendre needs m >= 1")
    if not a < b:
        raise ValueError("gauss_legendre needs a < b")
    x, w = leggauss(m)
    half = 0.5 * (b - a)
    return a + half * (x + 1.0), half * w


def sphere_area(n):
    """Surface measure of the unit sphere S^{n-1} (counting measure 2 for n=1)."""
    return 2.0 * math.pi ** (n / 2.0) / math.gamma(n / 2.0)


FINE = 64


def _product_weights(nodes, h, eta):
    # weights w_k with sum_k w_k q(r_k) = int_0^h q(r) r^eta dr for deg q < len(nodes)
    x = nodes / h
    m = x.size
    vander = np.vander(x, m, increasing=True).T
    moments = 1.0 / (np.arange(m) + eta + 1.0)
    return h ** (eta + 1.0) * np.linalg.solve(vander, moments)


@dataclass(frozen=True)
class RadialRule:
    """Composite Gauss rule on (0, cutoff] with panels graded towards 0.

    The rule integrates ``q(r) * r**eta`` for smooth ``q``; the weight
    ``r**eta`` is absorbed by product integration (exact for polynomial
    ``q`` of degree < per_panel on every panel), so the nodes do not depend
    on ``eta``.
    """

    cutoff: float
    nodes: np.ndarray
    grading: float
    edges: np.ndarray
    per_panel: int
    _base_weights: np.ndarray = field(repr=False)
    _fine: tuple = field(repr=False, default=None)

    @property
    def panels(self):
        return self.edges.size - 1

    def weights(self, eta=0.0):
        if eta <= -1.0:
            raise ValueError("eta must exceed -1 for an integrable weight")
        m = self.per_panel
        if eta == 0.0:
            return self._base_weights.copy()
        # panels away from 0: r**eta is analytic there, so its moments against
        # the Lagrange basis of the panel nodes come from a finer Gauss rule
        fr, fw, lag = self._fine
        w = np.einsum("pf,pfk->pk", fw * fr**eta, lag).ravel()
        return np.concatenate([_product_weights(self.nodes[:m], self.edges[1], eta), w])

    def integrate(self, func, eta=0.0):
        """Integrate ``func(r) * r**eta`` over (0, cutoff]."""
        vals = np.asarray(func(self.nodes), dtype=float)
        return float(np.sum(self.weights(eta) * vals))


def graded_radial_rule(cutoff, panels=48, per_panel=8, grading=3.0):
    if cutoff <= 0:
        raise ValueError("cutoff must be positive")
    if grading < 1:
        raise ValueError("grading exponent must be >= 1")
    if panels < 1 or per_panel < 1:
        raise ValueError("panels and per_panel must be positive")
    edges = cutoff * (np.arange(panels + 1) / panels) ** grading
    nodes, weights = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        x, w = gauss_legendre(per_panel, a, b)
        nodes.append(x)
        weights.append(w)
    # Lagrange basis of the panel nodes sampled on a FINE-point Gauss rule
    xg, _ = np.polynomial.legendre.leggauss(per_panel)
    xf, wf = np.polynomial.legendre.leggauss(FINE)
    lag = legvander(xf, per_panel - 1) @ np.linalg.inv(legvander(xg, per_panel - 1))
    a, b = edges[1:-1], edges[2:]
    fr = 0.5 * (a + b)[:, None] + 0.5 * (b - a)[:, None] * xf
    fw = 0.5 * (b - a)[:, None] * wf
    return RadialRule(
        cutoff=float(cutoff),
        nodes=np.concatenate(nodes),
        grading=float(grading),
        edges=edges,
        per_panel=per_panel,
        _base_weights=np.concatenate(weights),
        _fine=(fr, fw, np.broadcast_to(lag, (panels - 1,) + lag.shape)),
    )


@dataclass(frozen=True)
class SphereGrid:
    """Nodes and weights for integrals over S^{n-1}.

    ``antipode[k]`` is the index of ``-nodes[k]`` when the grid is
    point-symmetric, otherwise None.
    """

    dim: int
    nodes: np.ndarray
    weights: np.ndarray
    mode: str
    resolution: int
    antipode: np.ndarray | None = None

    def integrate(self, func):
        vals = np.asarray(func(self.nodes), dtype=float)
        return float(np.sum(self.weights * vals))


def sphere_grid(n, resolution=128, mode="deterministic", seed=None):
    """Quadrature grid on S^{n-1}.

    Deterministic grids: n=1 is the two-point sphere {+1, -1}; n=2 uses
    ``resolution`` equally spaced angles (exact for trigonometric
    polynomials of degree < resolution); n=3 uses Gauss-Legendre in the
    height (split at the equator) times ``2*resolution`` uniform
    longitudes.  ``mode="mc"`` draws ``resolution`` uniform points with
    equal weights, any n >= 2.
    """
    if n < 1:
        raise ValueError("dimension must be positive")
    if mode == "mc":
        if seed is None:
            raise ValueError("mc sphere grid needs an explicit seed")
        rng = np.random.default_rng(seed)
        g = rng.standard_normal((resolution, n))
        u = g / np.linalg.norm(g, axis=1, keepdims=True)
        w = np.full(resolution, sphere_area(n) / resolution)
        return SphereGrid(n, u, w, "mc", resolution)
    if mode != "deterministic":
        raise ValueError(f"unknown sphere grid mode {mode!r}")

    if n == 1:
        return SphereGrid(1, np.array([[1.0], [-1.0]]), np.ones(2), mode, 2, np.array([1, 0]))
    if n == 2:
        m = int(resolution)
        if m < 2 or m % 2:
            raise ValueError("2-d sphere grid needs an even resolution >= 2")
        theta = 2.0 * np.pi * (np.arange(m) + 0.5) / m
        u = np.column_stack([np.cos(theta), np.sin(theta)])
        w = np.full(m, 2.0 * np.pi / m)
        anti = (np.arange(m) + m // 2) % m
        return SphereGrid(2, u, w, mode, m, anti)
    if n == 3:
        m = int(resolution)
        if m < 2 or m % 2:
            raise ValueError("3-d sphere grid needs an even resolution >= 2")
        zu, wu = gauss_legendre(m // 2, 0.0, 1.0)
        z = np.concatenate([-zu[::-1], zu])
        wz = np.concatenate([wu[::-1], wu])
        nphi = 2 * m
        phi = 2.0 * np.pi * (np.arange(nphi) + 0.5) / nphi
        zz, pp = np.meshgrid(z, phi, indexing="ij")
        rho = np.sqrt(np.maximum(0.0, 1.0 - zz ** 2))
        u = np.column_stack([(rho * np.cos(pp)).ravel(), (rho * np.sin(pp)).ravel(), zz.ravel()])
        w = (wz[:, None] * np.full(nphi, 2.0 * np.pi / nphi)[None, :]).ravel()
        iz = np.arange(m)[:, None]
        ip = np.arange(nphi)[None, :]
        anti = ((m - 1 - iz) * nphi + (ip + nphi // 2) % nphi).ravel()
        return SphereGrid(3, u, w, mode, m, anti)
    raise ValueError("deterministic sphere grids exist only for n <= 3; use mode='mc'")


def power_law_radius_sample(cutoff, exponent, count, seed):
    """Draw radii with density proportional to r**exponent on (0, cutoff].

    Returns ``(radii, normalizer)`` with ``normalizer = cutoff**(exponent+1)/(exponent+1)``.
    """
    if exponent <= -1.0:
        raise ValueError("power-law exponent must exceed -1")
    if cutoff <= 0:
        raise ValueError("cutoff must be positive")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    a = exponent + 1.0
    u = 1.0 - rng.random(count)  # in (0, 1]
    radii = cutoff * u ** (1.0 / a)
    return radii, cutoff ** a / a


def extrapolate_limit(points):
    """Least-squares fit of ``value ~ L + c*(1-s)``; returns (L, c, max residual)."""
    pts = sorted((float(s), float(v)) for s, v in points)
    if len(pts) < 3:
        raise ValueError("extrapolation needs at least 3 points")
    s = np.array([q[0] for q in pts])
    v = np.array([q[1] for q in pts])
    if np.unique(s).size != s.size:
        raise ValueError("extrapolation points need distinct s")
    if np.any((s <= 0) | (s >= 1)):
        raise ValueError("s values must lie in (0, 1)")
    design = np.column_stack([np.ones_like(s), 1.0 - s])
    (limit, slope), *_ = np.linalg.lstsq(design, v, rcond=None)
    resid = float(np.max(np.abs(design @ np.array([limit, slope]) - v)))
    return float(limit), float(slope), resid


def mollifier_rho(eps, p, R, r):
    """The truncated power mollifier ``chi_[0,R](r) * p*eps/R**(eps*p) * r**(p*eps-1)``."""
    if not 0.0 < eps < 1.0:
        raise ValueError("eps must lie in (0, 1)")
    if R <= 0:
        raise ValueError("R must be positive")
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise ValueError("r must be nonnegative")
    inside = (r > 0) & (r <= R)
    safe = np.where(inside, r, 1.0)
    out = np.where(inside, p * eps / R ** (eps * p) * safe ** (p * eps - 1.0), 0.0)
    return out if out.ndim else float(out)
