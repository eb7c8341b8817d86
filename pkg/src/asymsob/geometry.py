"""Convex bodies, Minkowski functionals, polar bodies and L_p moment-body norms."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.optimize import linprog
from scipy.spatial import ConvexHull, Delaunay, HalfspaceIntersection

from ._constants import bbm_constant

INTERIOR_MARGIN = 1e-9
CLIP_TOL = 1e-12


class UnsupportedVariant(ValueError):
    pass


def _unit_ball_volume(n):
    return math.pi ** (n / 2.0) / math.gamma(n / 2.0 + 1.0)


class ConvexBody:
    """A convex body with the origin in its interior.

    Construct through :meth:`polytope_v`, :meth:`polytope_h`, :meth:`ball`
    or :meth:`ellipsoid`; construction validates the body.
    """

    def __init__(self, kind, dim, *, vertices=None, normals=None, offsets=None, center=None, radius=None, shape=None):
        self.kind = kind
        self.dim = int(dim)
        self.vertices = None if vertices is None else np.asarray(vertices, dtype=float)
        self.normals = None if normals is None else np.asarray(normals, dtype=float)
        self.offsets = None if offsets is None else np.asarray(offsets, dtype=float)
        self.center = None if center is None else np.asarray(center, dtype=float)
        self.radius = None if radius is None else float(radius)
        self.shape = None if shape is None else np.asarray(shape, dtype=float)
        self._validate()

    # -- constructors

    @classmethod
    def polytope_v(cls, vertices):
        V = np.atleast_2d(np.asarray(vertices, dtype=float))
        return cls("polytopeV", V.shape[1], vertices=V)

    @classmethod
    def polytope_h(cls, normals, offsets):
        A = np.atleast_2d(np.asarray(normals, dtype=float))
        return cls("polytopeH", A.shape[1], normals=A, offsets=np.asarray(offsets, dtype=float).ravel())

    @classmethod
    def ball(cls, center, radius=1.0):
        c = np.atleast_1d(np.asarray(center, dtype=float))
        return cls("ball", c.size, center=c, radius=radius)

    @classmethod
    def ellipsoid(cls, center, shape):
        c = np.atleast_1d(np.asarray(center, dtype=float))
        return cls("ellipsoid", c.size, center=c, shape=np.atleast_2d(shape))

    @classmethod
    def unit_ball(cls, n):
        return cls.ball(np.zeros(n), 1.0)

    @classmethod
    def interval(cls, lo, hi):
        return cls.polytope_v([[lo], [hi]])

    # -- validation

    def _validate(self):
        n = self.dim
        if n < 1:
            raise ValueError("dimension must be positive")
        if self.kind == "polytopeV":
            if self.vertices.ndim != 2 or self.vertices.shape[0] < n + 1:
                raise ValueError("polytopeV needs at least dim+1 vertices")
            if not np.all(np.isfinite(self.vertices)):
                raise ValueError("vertices must be finite")
            self._check_vertex_interior()
        elif self.kind == "polytopeH":
            if self.normals.shape[0] != self.offsets.size:
                raise ValueError("normals and offsets differ in length")
            if np.any(self.offsets <= 0):
                raise ValueError("origin must lie in the interior: all offsets must be positive")
            polar_pts = self.normals / self.offsets[:, None]
            if not _origin_strictly_inside(polar_pts):
                raise ValueError("halfspaces do not bound a body (unbounded region)")
            R = self.circumradius
            dist = self.offsets / np.linalg.norm(self.normals, axis=1)
            if dist.min() < INTERIOR_MARGIN * R:
                raise ValueError("origin too close to the boundary")
        elif self.kind == "ball":
            if self.radius is None or self.radius <= 0:
                raise ValueError("ball radius must be positive")
            if np.linalg.norm(self.center) > self.radius * (1.0 - INTERIOR_MARGIN):
                raise ValueError("origin must lie in the interior of the ball")
        elif self.kind == "ellipsoid":
            A = self.shape
            if A.shape != (n, n) or not np.allclose(A, A.T, rtol=0, atol=1e-12 * np.abs(A).max()):
                raise ValueError("ellipsoid shape must be a symmetric n x n matrix")
            try:
                np.linalg.cholesky(A)
            except np.linalg.LinAlgError:
                raise ValueError("ellipsoid shape must be positive definite") from None
            if self.center @ A @ self.center >= 1.0 - INTERIOR_MARGIN:
                raise ValueError("origin must lie in the interior of the ellipsoid")
        else:
            raise ValueError(f"unknown body type {self.kind!r}")

    def _check_vertex_interior(self):
        V = self.vertices
        n = self.dim
        R = float(np.max(np.linalg.norm(V, axis=1)))
        if n == 1:
            lo, hi = V.min(), V.max()
            if not (lo < -INTERIOR_MARGIN * R and hi > INTERIOR_MARGIN * R):
                raise ValueError("origin must lie strictly inside the interval")
            return
        if n <= 3:
            try:
                eq = ConvexHull(V).equations
            except Exception as exc:
                raise ValueError(f"degenerate vertex set: {exc}") from None
            if np.max(eq[:, -1]) > -INTERIOR_MARGIN * R:
                raise ValueError("origin must lie strictly inside the vertex hull")
            return
        if np.linalg.matrix_rank(V) < n or not _origin_strictly_inside(V):
            raise ValueError("origin must lie strictly inside the vertex hull")

    # -- derived data

    @cached_property
    def hrep(self):
        """(normals, offsets) with ``normals @ x <= offsets``; polytopes only."""
        if self.kind == "polytopeH":
            return self.normals, self.offsets
        if self.kind != "polytopeV":
            raise UnsupportedVariant("only polytopes have a halfspace representation")
        if self.dim == 1:
            return np.array([[1.0], [-1.0]]), np.array([self.vertices.max(), -self.vertices.min()])
        if self.dim > 3:
            raise UnsupportedVariant("vertex-to-halfspace conversion is limited to n <= 3")
        eq = ConvexHull(self.vertices).equations
        eq = np.unique(np.round(eq, 12), axis=0)
        return eq[:, :-1], -eq[:, -1]

    @cached_property
    def vertex_array(self):
        if self.kind == "polytopeV":
            if self.dim == 1:
                return np.array([[self.vertices.min()], [self.vertices.max()]])
            hull = ConvexHull(self.vertices)
            return self.vertices[hull.vertices]
        if self.kind == "polytopeH":
            if self.dim == 1:
                a = self.normals[:, 0]
                b = self.offsets
                return np.array([[np.max(b[a < 0] / a[a < 0])], [np.min(b[a > 0] / a[a > 0])]])
            hs = HalfspaceIntersection(np.column_stack([self.normals, -self.offsets]), np.zeros(self.dim))
            pts = hs.intersections
            return pts[ConvexHull(pts).vertices]
        raise UnsupportedVariant("only polytopes have vertices")

    @cached_property
    def cones(self):
        """Fan triangulation from the origin: array (S, n, n) of facet simplices."""
        V = self.vertex_array
        if self.dim == 1:
            return V[:, None, :]
        hull = ConvexHull(V)
        return V[hull.simplices]

    @cached_property
    def cone_volumes(self):
        return np.abs(np.linalg.det(self.cones)) / math.factorial(self.dim)

    @property
    def is_polytope(self):
        return self.kind in ("polytopeV", "polytopeH")

    @property
    def origin_centered(self):
        return self.kind in ("ball", "ellipsoid") and not np.any(self.center)

    @cached_property
    def circumradius(self):
        if self.is_polytope:
            return float(np.max(np.linalg.norm(self.vertex_array, axis=1)))
        if self.kind == "ball":
            return float(np.linalg.norm(self.center) + self.radius)
        lam_min = np.linalg.eigvalsh(self.shape).min()
        return float(np.linalg.norm(self.center) + 1.0 / math.sqrt(lam_min))

    @cached_property
    def volume(self):
        if self.is_polytope:
            return float(np.sum(self.cone_volumes))
        if self.kind == "ball":
            return _unit_ball_volume(self.dim) * self.radius ** self.dim
        return _unit_ball_volume(self.dim) / math.sqrt(np.linalg.det(self.shape))

    # -- transformations

    def linear_image(self, A):
        """The body ``A K`` for an invertible matrix ``A``."""
        A = np.atleast_2d(np.asarray(A, dtype=float))
        if self.kind == "polytopeV":
            return ConvexBody.polytope_v(self.vertices @ A.T)
        if self.kind == "polytopeH":
            return ConvexBody.polytope_h(self.normals @ np.linalg.inv(A), self.offsets)
        Ainv = np.linalg.inv(A)
        S = np.eye(self.dim) / self.radius ** 2 if self.kind == "ball" else self.shape
        M = Ainv.T @ S @ Ainv
        return ConvexBody.ellipsoid(A @ self.center, 0.5 * (M + M.T))

    def scaled(self, lam):
        if lam <= 0:
            raise ValueError("scale factor must be positive")
        if self.kind == "polytopeV":
            return ConvexBody.polytope_v(lam * self.vertices)
        if self.kind == "polytopeH":
            return ConvexBody.polytope_h(self.normals, lam * self.offsets)
        if self.kind == "ball":
            return ConvexBody.ball(lam * self.center, lam * self.radius)
        return ConvexBody.ellipsoid(lam * self.center, self.shape / lam ** 2)

    def reflected(self):
        """The body ``-K``."""
        if self.kind == "polytopeV":
            return ConvexBody.polytope_v(-self.vertices)
        if self.kind == "polytopeH":
            return ConvexBody.polytope_h(-self.normals, self.offsets)
        if self.kind == "ball":
            return ConvexBody.ball(-self.center, self.radius)
        return ConvexBody.ellipsoid(-self.center, self.shape)

    def to_dict(self):
        d = {"type": self.kind, "dim": self.dim}
        if self.kind == "polytopeV":
            d["vertices"] = self.vertices.tolist()
        elif self.kind == "polytopeH":
            d["normals"] = self.normals.tolist()
            d["offsets"] = self.offsets.tolist()
        elif self.kind == "ball":
            d["center"] = self.center.tolist()
            d["radius"] = self.radius
        else:
            d["center"] = self.center.tolist()
            d["shape"] = self.shape.tolist()
        return d

    def __repr__(self):
        return f"ConvexBody({self.kind}, dim={self.dim})"


def _origin_strictly_inside(points):
    # LP: maximise t with sum mu_j p_j = 0, sum mu_j = 1, mu_j >= t
    P = np.asarray(points, dtype=float)
    m, n = P.shape
    if np.linalg.matrix_rank(P) < n:
        return False
    c = np.zeros(m + 1)
    c[-1] = -1.0
    A_eq = np.zeros((n + 1, m + 1))
    A_eq[:n, :m] = P.T
    A_eq[n, :m] = 1.0
    b_eq = np.zeros(n + 1)
    b_eq[n] = 1.0
    A_ub = np.column_stack([-np.eye(m), np.ones(m)])
    res = linprog(c, A_ub=A_ub, b_ub=np.zeros(m), A_eq=A_eq, b_eq=b_eq, bounds=[(0, None)] * m + [(None, None)])
    return bool(res.status == 0 and -res.fun > 1e-12)


_BODY_FIELDS = {
    "polytopeV": {"vertices"},
    "polytopeH": {"normals", "offsets"},
    "ball": {"center", "radius"},
    "ellipsoid": {"center", "shape"},
}


def body_from_dict(spec):
    """Parse the body JSON schema ``{"type": ..., "dim": n, ...}``."""
    if not isinstance(spec, dict):
        raise ValueError("body spec must be a JSON object")
    kind = spec.get("type")
    if kind not in _BODY_FIELDS:
        raise ValueError(f"body field 'type' must be one of {sorted(_BODY_FIELDS)}, got {kind!r}")
    if "dim" not in spec:
        raise ValueError("body field 'dim' is required")
    wanted = _BODY_FIELDS[kind]
    extra = set(spec) - wanted - {"type", "dim"}
    if extra:
        raise ValueError(f"unknown body field(s): {', '.join(sorted(extra))}")
    missing = wanted - set(spec)
    if missing:
        raise ValueError(f"missing body field(s): {', '.join(sorted(missing))}")
    n = int(spec["dim"])
    if kind == "polytopeV":
        body = ConvexBody.polytope_v(spec["vertices"])
    elif kind == "polytopeH":
        body = ConvexBody.polytope_h(spec["normals"], spec["offsets"])
    elif kind == "ball":
        body = ConvexBody.ball(spec["center"], spec["radius"])
    else:
        body = ConvexBody.ellipsoid(spec["center"], spec["shape"])
    if body.dim != n:
        raise ValueError(f"body field 'dim' is {n} but the data is {body.dim}-dimensional")
    return body


# ---------------------------------------------------------------- gauges


def minkowski_functional(K, x):
    """``min{lam >= 0 : x in lam K}`` for one vector or an array of row vectors."""
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    X = np.atleast_2d(x)
    if X.shape[1] != K.dim:
        raise ValueError("vector dimension does not match the body")
    if K.kind == "polytopeH" or (K.kind == "polytopeV" and K.dim <= 3):
        A, b = K.hrep
        out = np.maximum(np.max((X @ A.T) / b, axis=1), 0.0)
    elif K.kind == "polytopeV":
        out = np.array([_gauge_lp(K.vertices, row) for row in X])
    else:
        S = np.eye(K.dim) / K.radius ** 2 if K.kind == "ball" else K.shape
        c = K.center
        q = np.einsum("ij,jk,ik->i", X, S, X)
        b = X @ (S @ c)
        a = 1.0 - c @ S @ c
        den = b + np.sqrt(b * b + a * q)
        out = np.where(q > 0.0, q / np.where(den > 0.0, den, 1.0), 0.0)
    return float(out[0]) if single else out


def _gauge_lp(V, x):
    if not np.any(x):
        return 0.0
    m = V.shape[0]
    res = linprog(np.ones(m), A_eq=V.T, b_eq=x, bounds=[(0, None)] * m)
    if res.status != 0:
        raise RuntimeError(f"gauge LP failed: {res.message}")
    return float(res.fun)


def polar_body(K):
    if K.kind == "polytopeH":
        return ConvexBody.polytope_v(K.normals / K.offsets[:, None])
    if K.kind == "polytopeV":
        return ConvexBody.polytope_h(K.vertices, np.ones(K.vertices.shape[0]))
    if not K.origin_centered:
        raise UnsupportedVariant("the polar of a non-centred ball or ellipsoid is not in the variant set")
    if K.kind == "ball":
        return ConvexBody.ball(np.zeros(K.dim), 1.0 / K.radius)
    return ConvexBody.ellipsoid(np.zeros(K.dim), np.linalg.inv(K.shape))


# ---------------------------------------------------------------- exact simplex moments


def _complete_homogeneous(vals, p):
    # h_p of the variables along the last axis
    H = [np.ones(vals.shape[:-1])] + [np.zeros(vals.shape[:-1]) for _ in range(p)]
    for j in range(vals.shape[-1]):
        x = vals[..., j]
        for k in range(1, p + 1):
            H[k] = H[k] + x * H[k - 1]
    return H[p]


def _general_clip(verts, ell, p, const):
    # positive part of one simplex when >= 2 vertices lie on each side
    pos = ell > 0
    neg = ell < 0
    pts = [verts[i] for i in range(len(ell)) if not neg[i]]
    for i in np.flatnonzero(pos):
        for j in np.flatnonzero(neg):
            t = ell[i] / (ell[i] - ell[j])
            pts.append(verts[i] + t * (verts[j] - verts[i]))
    pts = np.array(pts)
    lvals = np.array([ell[i] for i in range(len(ell)) if not neg[i]] + [0.0] * (pos.sum() * neg.sum()))
    tri = Delaunay(pts)
    total = 0.0
    for simp in tri.simplices:
        w = pts[simp]
        vol = abs(np.linalg.det(w[1:] - w[0])) / math.factorial(len(w) - 1)
        total += const * vol * _complete_homogeneous(lvals[simp], p)
    return total


def _positive_moments(simplices, volumes, V, p):
    """``int_S (v . x)_+^p dx`` for every v (rows of V) and simplex S.

    simplices: (S, n+1, n); volumes: (S,); V: (m, n). Returns (m, S).
    """
    n = simplices.shape[2]
    const = math.factorial(n) * math.factorial(p) / math.factorial(n + p)
    ell = np.einsum("sjk,mk->msj", simplices, V)
    scale = np.linalg.norm(V, axis=1)[:, None, None] * np.linalg.norm(simplices, axis=2)[None, :, :]
    ell = np.where(np.abs(ell) <= CLIP_TOL * scale, 0.0, ell)
    npos = np.sum(ell > 0, axis=2)
    nneg = np.sum(ell < 0, axis=2)
    vol = volumes[None, :]
    full = const * vol * _complete_homogeneous(ell, p)

    with np.errstate(divide="ignore", invalid="ignore"):
        top = np.max(ell, axis=2, keepdims=True)
        safe_top = np.where(top > 0, top, 1.0)
        t = np.where(ell < 0, safe_top / (safe_top - ell), 1.0)
        corner_pos = const * vol * np.prod(t, axis=2) * top[..., 0] ** p

        bot = np.min(ell, axis=2, keepdims=True)
        safe_bot = np.where(bot < 0, bot, -1.0)
        t = np.where(ell > 0, safe_bot / (safe_bot - ell), 1.0)
        corner_neg = const * vol * np.prod(t, axis=2) * bot[..., 0] ** p

    out = np.where(
        nneg == 0,
        full,
        np.where(npos == 0, 0.0, np.where(npos == 1, corner_pos, full - corner_neg)),
    )
    hard = np.argwhere((npos >= 2) & (nneg >= 2))
    for mi, si in hard:
        out[mi, si] = _general_clip(simplices[si], ell[mi, si], p, const)
    return out


def simplex_integral_powered_form(vertices, v, p):
    """Exact ``int_simplex (v . x)_+^p dx`` for a nonnegative integer ``p``."""
    W = np.asarray(vertices, dtype=float)
    n = W.shape[1]
    if W.shape[0] != n + 1:
        raise ValueError("a simplex in R^n needs n+1 vertices")
    if int(p) != p or p < 0:
        raise ValueError("p must be a nonnegative integer")
    vol = abs(np.linalg.det(W[1:] - W[0])) / math.factorial(n)
    if vol == 0.0:
        return 0.0
    V = np.atleast_2d(np.asarray(v, dtype=float))
    out = _positive_moments(W[None], np.array([vol]), V, int(p))[:, 0]
    return float(out[0]) if np.ndim(v) == 1 else out


# ---------------------------------------------------------------- moment norms

SIGNS = ("plus", "minus", "symmetric")


@dataclass(frozen=True)
class MomentNormSpec:
    """Defines ``||.||`` of Z_p^{+,*}K, Z_p^{-,*}K or the symmetric Z_p^{*}K."""

    body: ConvexBody
    p: float
    sign: str = "plus"

    def __post_init__(self):
        if self.p < 1:
            raise ValueError("moment norms need p >= 1")
        if self.sign not in SIGNS:
            raise ValueError(f"sign must be one of {SIGNS}")

    @property
    def exact_available(self):
        p = self.p
        return (self.body.is_polytope and float(p).is_integer()) or self.body.origin_centered


def _origin_centered_power(K, V, p):
    # ||v||^p of Z_p^{+,*}K for origin-centred balls/ellipsoids: K = M B with
    # M = S^{-1/2}; GL covariance gives |det M| * (K_{n,p}/2) * |M^T v|^p
    n = K.dim
    if K.kind == "ball":
        return K.radius ** (n + p) * 0.5 * bbm_constant(n, p) * np.linalg.norm(V, axis=1) ** p
    evals, evecs = np.linalg.eigh(K.shape)
    M = (evecs / np.sqrt(evals)) @ evecs.T
    return 0.5 * bbm_constant(n, p) * np.prod(evals) ** -0.5 * np.linalg.norm(V @ M, axis=1) ** p


def _exact_power(spec, V):
    K, p = spec.body, spec.p
    n = K.dim
    if K.origin_centered:
        return _origin_centered_power(K, V, p)
    pi = int(p)
    cones = K.cones
    simplices = np.concatenate([np.zeros((cones.shape[0], 1, n)), cones], axis=1)
    vols = K.cone_volumes
    if spec.sign == "symmetric":
        if pi % 2 == 0:
            const = math.factorial(n) * math.factorial(pi) / math.factorial(n + pi)
            ell = np.einsum("sjk,mk->msj", simplices, V)
            tot = np.sum(const * vols[None, :] * _complete_homogeneous(ell, pi), axis=1)
            return 0.5 * (n + p) * tot
        both = _positive_moments(simplices, vols, V, pi) + _positive_moments(simplices, vols, -V, pi)
        return 0.5 * (n + p) * np.sum(both, axis=1)
    W = V if spec.sign == "plus" else -V
    return (n + p) * np.sum(_positive_moments(simplices, vols, W, pi), axis=1)


def _mc_power(spec, V, samples, seed):
    K, p = spec.body, spec.p
    n = K.dim
    X = sample_uniform(K, samples, seed)
    if spec.sign == "symmetric":
        fn = lambda ell: 0.5 * np.abs(ell) ** p
    elif spec.sign == "plus":
        fn = lambda ell: np.maximum(ell, 0.0) ** p
    else:
        fn = lambda ell: np.maximum(-ell, 0.0) ** p
    vals = np.empty(V.shape[0])
    errs = np.empty(V.shape[0])
    factor = (n + p) * K.volume
    for i0 in range(0, V.shape[0], 64):
        block = fn(X @ V[i0 : i0 + 64].T) * factor
        vals[i0 : i0 + 64] = block.mean(axis=0)
        errs[i0 : i0 + 64] = block.std(axis=0, ddof=1) / math.sqrt(samples)
    return vals, errs


def moment_norm(spec, v, *, method="auto", samples=1_000_000, seed=None, return_error=False):
    """``||v||`` for the polar (asymmetric) L_p moment body described by ``spec``.

    Exact when the body is a polytope and p is an integer (clipped simplex
    moments), or when the body is an origin-centred ball/ellipsoid (closed
    form); otherwise Monte Carlo over ``samples`` uniform points, which
    needs ``seed``.  With ``return_error`` a (value, std_error) pair is
    returned.
    """
    v = np.asarray(v, dtype=float)
    V = np.atleast_2d(v)
    if V.shape[1] != spec.body.dim:
        raise ValueError("vector dimension does not match the body")
    p = spec.p
    if method == "auto":
        method = "exact" if spec.exact_available else "mc"
    if method == "exact":
        if not spec.exact_available:
            raise ValueError("no exact path for this body and p")
        power = np.maximum(_exact_power(spec, V), 0.0)
        norm = power ** (1.0 / p)
        err = np.zeros_like(norm)
    elif method == "mc":
        if seed is None:
            raise ValueError("Monte Carlo moment norms need an explicit seed")
        power, perr = _mc_power(spec, V, samples, seed)
        power = np.maximum(power, 0.0)
        norm = power ** (1.0 / p)
        with np.errstate(divide="ignore", invalid="ignore"):
            err = np.where(norm > 0, perr / (p * norm ** (p - 1.0)), perr ** (1.0 / p))
    else:
        raise ValueError(f"unknown method {method!r}")
    if v.ndim == 1:
        norm, err = float(norm[0]), float(err[0])
    return (norm, err) if return_error else norm


@dataclass(frozen=True)
class CombinedGauge:
    """``(sum_i alpha_i g_i(v)^p)^(1/p)``, the gauge of an L_p Minkowski combination.

    Terms are MomentNormSpec (its moment-body norm) or ConvexBody (its
    Minkowski functional; pass the polar of L to combine with h_L).
    """

    terms: tuple
    p: float

    def __post_init__(self):
        if self.p < 1:
            raise ValueError("p must be >= 1")
        if not self.terms:
            raise ValueError("at least one term is required")
        weights = [w for w, _ in self.terms]
        if any(w < 0 for w in weights) or not any(w > 0 for w in weights):
            raise ValueError("weights must be nonnegative with at least one positive")
        dims = {g.body.dim if isinstance(g, MomentNormSpec) else g.dim for _, g in self.terms}
        if len(dims) != 1:
            raise ValueError("all terms must share a dimension")

    @property
    def dim(self):
        g = self.terms[0][1]
        return g.body.dim if isinstance(g, MomentNormSpec) else g.dim


def combined_gauge_eval(g, v, *, seed=None):
    v = np.asarray(v, dtype=float)
    total = 0.0
    for alpha, term in g.terms:
        if isinstance(term, MomentNormSpec):
            val = moment_norm(term, v, seed=seed)
        else:
            val = minkowski_functional(term, v)
        total = total + alpha * np.asarray(val) ** g.p
    out = np.asarray(total) ** (1.0 / g.p)
    return float(out) if v.ndim == 1 else out


# ---------------------------------------------------------------- sampling


def sample_uniform(K, count, seed):
    """``count`` i.i.d. uniform points of K; deterministic in ``seed``."""
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    n = K.dim
    if K.is_polytope:
        cones = K.cones
        prob = K.cone_volumes / K.cone_volumes.sum()
        idx = rng.choice(cones.shape[0], size=count, p=prob)
        lam = rng.dirichlet(np.ones(n + 1), size=count)[:, 1:]
        return np.einsum("mj,mjk->mk", lam, cones[idx])
    g = rng.standard_normal((count, n))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    y = g * rng.random(count)[:, None] ** (1.0 / n)
    if K.kind == "ball":
        return K.center + K.radius * y
    L = np.linalg.cholesky(K.shape)
    return K.center + np.linalg.solve(L.T, y.T).T
