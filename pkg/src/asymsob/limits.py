"""s -> 1 sweeps: scale by (1-s), extrapolate, compare with the gradient integral."""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from ._constants import bbm_constant
from .fields import as_line, grad_gauge_integral, rhs_rule_for
from .geometry import ConvexBody, MomentNormSpec
from .quadrature import extrapolate_limit, sphere_grid
from .seminorm import (
    aniso_seminorm_mc,
    build_spherical_profile,
    gagliardo_1d_plus,
    line_profile,
)

__all__ = [
    "DEFAULT_S",
    "LimitReport",
    "bbm_constant",
    "theorem_rhs",
    "sweep",
    "verify_proposition_1d",
    "verify_bbm_special_case",
    "sphere_moment_crosscheck",
]

DEFAULT_S = (0.80, 0.90, 0.95, 0.975, 0.99)
THEOREM_TOL = 0.05
PROPOSITION_TOL = 0.02
ZERO_FLOOR = 1e-3
CSV_COLUMNS = ("s", "one_minus_s", "estimate", "scaled", "std_error", "elapsed_ms", "config_digest", "version")


def config_digest(config):
    blob = json.dumps(config, sort_keys=True, separators=(",", ":"), default=_jsonable)
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def _jsonable(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    raise TypeError(f"not JSON serialisable: {type(obj)}")


@dataclass
class LimitReport:
    config: dict
    rows: list  # dicts with s, estimate, scaled, std_error, elapsed_ms
    limit: float
    slope: float
    residual: float
    rhs: float
    tolerance: float
    fit_points: int = 3
    extras: dict = field(default_factory=dict)
    elapsed: float = 0.0  # milliseconds

    def __post_init__(self):
        self.rows = sorted(self.rows, key=lambda r: r["s"])
        self.limit, self.slope, self.residual, self.rhs = (float(x) for x in (self.limit, self.slope, self.residual, self.rhs))

    @property
    def digest(self):
        return config_digest(self.config)

    @property
    def relative_error(self):
        if self.rhs == 0.0:
            return max(abs(self.limit), abs(self.rhs))
        return abs(self.limit - self.rhs) / abs(self.rhs)

    @property
    def passed(self):
        ok = self.extras.get("checks_passed", True) and not any("error" in r for r in self.rows)
        if self.rhs == 0.0:
            return ok and self.relative_error <= ZERO_FLOOR
        return ok and self.relative_error <= self.tolerance

    @property
    def verdict(self):
        return "pass" if self.passed else "fail"

    def numeric_payload(self):
        """Everything computed, without the configuration that produced it."""
        return {
            "rows": [(r["s"], r["estimate"], r["scaled"], r["std_error"]) for r in self.rows],
            "limit": self.limit,
            "slope": self.slope,
            "residual": self.residual,
            "rhs": self.rhs,
        }

    def to_dict(self, timing=False):
        rows = []
        for r in self.rows:
            row = {k: r[k] for k in ("s", "estimate", "scaled", "std_error")}
            row["one_minus_s"] = 1.0 - r["s"]
            if "error" in r:
                row["error"] = r["error"]
            if timing:
                row["elapsed_ms"] = r.get("elapsed_ms", 0.0)
            rows.append(row)
        out = {
            "version": __version__,
            "config": self.config,
            "config_digest": self.digest,
            "rows": rows,
            "limit": self.limit,
            "slope": self.slope,
            "residual": self.residual,
            "fit_points": self.fit_points,
            "rhs": self.rhs,
            "relative_error": self.relative_error,
            "tolerance": self.tolerance,
            "verdict": self.verdict,
            "extras": self.extras,
        }
        if timing:
            out["elapsed_ms"] = self.elapsed
        return out

    def to_json(self, timing=False):
        return json.dumps(self.to_dict(timing), indent=2, sort_keys=True, default=_jsonable) + "\n"

    def to_csv(self, timing=False):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\r\n")
        w.writerow(CSV_COLUMNS)
        digest = self.digest
        for r in self.rows:
            s = r["s"]
            elapsed = repr(r.get("elapsed_ms", 0.0)) if timing else ""
            w.writerow([repr(s), repr(1.0 - s), repr(r["estimate"]), repr(r["scaled"]), repr(r["std_error"]), elapsed, digest, __version__])
        return buf.getvalue()


def _fit(rows, fit_points):
    pts = [(r["s"], r["scaled"]) for r in sorted(rows, key=lambda r: r["s"]) if "error" not in r]
    use = pts[-fit_points:] if fit_points else pts
    if len(use) < 3:
        return math.nan, math.nan, math.nan
    return extrapolate_limit(use)


def _row(s, compute):
    t1 = time.perf_counter()
    try:
        value, err = compute(s)
    except (ValueError, FloatingPointError, ZeroDivisionError) as exc:
        return {"s": s, "estimate": math.nan, "scaled": math.nan, "std_error": math.nan, "elapsed_ms": 0.0, "error": str(exc)}
    return {"s": s, "estimate": value, "scaled": (1.0 - s) * value, "std_error": (1.0 - s) * err, "elapsed_ms": 1e3 * (time.perf_counter() - t1)}


def theorem_rhs(f, K, p, sign="plus", *, rule="auto", order=8, panels=8, samples=200_000, seed=0):
    """``(1/p) int ||grad f||^p`` for Z_p^{+,*}K (plus), Z_p^{-,*}K (minus);
    for sign="abs" the sum of both, computed through the symmetric body as
    ``(2/p) int ||grad f||^p_{Z_p^* K}``."""
    if K.dim != f.dim:
        raise ValueError("body and field dimensions differ")
    if f.name == "zero":
        return 0.0
    kw = dict(rule=rule, order=order, panels=panels, samples=samples, seed=seed)
    if sign in ("plus", "minus"):
        return grad_gauge_integral(f, MomentNormSpec(K, p, sign), p, **kw) / p
    if sign == "abs":
        return 2.0 * grad_gauge_integral(f, MomentNormSpec(K, p, "symmetric"), p, **kw) / p
    raise ValueError(f"unknown sign {sign!r}")


def _budget_kw(budgets, keys):
    return {k: budgets[k] for k in keys if k in budgets}


def sweep(f, K, p, sign="plus", s_list=DEFAULT_S, method="spherical", budgets=None, seed=None, *, tolerance=None, fit_points=3, threads=None, profile=None):
    """Compute (1-s) E_s at every s, extrapolate to s -> 1 and compare with theorem_rhs.

    ``sign="minus"`` runs the plus-estimator on ``-f``; ``sign="abs"`` uses
    |f(x)-f(y)|^p.  MC seeds per s are ``seed ^ index``.
    """
    t0 = time.perf_counter()
    budgets = dict(budgets or {})
    s_list = sorted(float(s) for s in s_list)
    if len(s_list) < 3:
        raise ValueError("a sweep needs at least 3 values of s")
    if any(not 0.0 < s < 1.0 for s in s_list):
        raise ValueError("s values must lie in (0, 1)")
    if K.dim != f.dim:
        raise ValueError("body and field dimensions differ")
    target = f.negated() if sign == "minus" else f
    est_sign = "abs" if sign == "abs" else "plus"
    if tolerance is None:
        tolerance = THEOREM_TOL
    config = {
        "function": f.to_dict(),
        "body": K.to_dict(),
        "p": p,
        "sign": sign,
        "method": method,
        "s": s_list,
        "budgets": budgets,
        "seed": seed,
        "fit_points": fit_points,
        "tolerance": tolerance,
    }
    rows = []
    extras = {}
    if method == "spherical":
        if profile is None:
            sphere = None
            if "sphere_resolution" in budgets:
                sphere = sphere_grid(f.dim, budgets["sphere_resolution"])
            radial = _budget_kw(budgets, ("panels", "per_panel", "grading")) or None
            profile = build_spherical_profile(
                target, p, sphere, budgets.get("line_spacing"), radial,
                cutoff=budgets.get("cutoff"), threads=threads, **_budget_kw(budgets, ("w_order", "w_sub")),
            )
        extras["budget"] = {k: v for k, v in profile.budget.items() if k != "profile_ms"}
        rows = [_row(s, lambda s: (profile.estimate(K, s, est_sign), 0.0)) for s in s_list]
    elif method in ("mc", "pair_mc"):
        if seed is None:
            raise ValueError("Monte Carlo sweeps need a seed")
        samples = int(budgets.get("samples", 1_000_000))

        def mc(i, s):
            est = aniso_seminorm_mc(target, K, p, s, samples, int(seed) ^ i, budgets.get("cutoff"), threads=threads, sign=est_sign)
            return est.value, est.std_error

        rows = [_row(s, lambda s, i=i: mc(i, s)) for i, s in enumerate(s_list)]
    else:
        raise ValueError(f"unknown method {method!r}")

    limit, slope, resid = _fit(rows, fit_points)
    rhs_sign = "plus" if sign == "minus" else sign
    rhs = theorem_rhs(target, K, p, rhs_sign, seed=0 if seed is None else int(seed))
    extras["rhs_rule"] = rhs_rule_for(f)
    return LimitReport(config, rows, limit, slope, resid, rhs, tolerance, fit_points, extras, 1e3 * (time.perf_counter() - t0))


def _positive_derivative_power(g, p, a, b, order=16):
    # int_a^b (g')_+^p over kink intervals
    brk = g.breakpoints
    pts = np.unique(np.clip(np.concatenate([[a, b], brk]), a, b))
    x, w = np.polynomial.legendre.leggauss(order)
    total = 0.0
    for lo, hi in zip(pts[:-1], pts[1:]):
        if hi <= lo:
            continue
        t = 0.5 * (lo + hi) + 0.5 * (hi - lo) * x
        total += 0.5 * (hi - lo) * float(np.sum(w * np.maximum(g.derivative(t), 0.0) ** p))
    return total


def verify_proposition_1d(f, domain, p, s_list=DEFAULT_S, *, tolerance=PROPOSITION_TOL, fit_points=3, radial=None):
    """(1-s) * Gagliardo_plus(f on domain x domain) against (1/p) int_domain (f')_+^p."""
    t0 = time.perf_counter()
    g = as_line(f)
    a, b = map(float, domain)
    if not g.empty and (g.support[0] < a - 1e-12 or g.support[1] > b + 1e-12):
        raise ValueError("the support of f must lie inside the domain")
    s_list = sorted(float(s) for s in s_list)
    prof = line_profile(g, p, radial=radial, domain=(a, b))
    rows = [_row(s, lambda s: (gagliardo_1d_plus(g, p, s, profile=prof), 0.0)) for s in s_list]
    limit, slope, resid = _fit(rows, fit_points)
    rhs = 0.0 if g.empty else _positive_derivative_power(g, p, a, b) / p
    config = {
        "kind": "proposition",
        "function": g.field.to_dict(),
        "domain": [a, b],
        "p": p,
        "s": s_list,
        "fit_points": fit_points,
        "tolerance": tolerance,
        "budgets": {k: v for k, v in prof.budget.items()},
    }
    return LimitReport(config, rows, limit, slope, resid, rhs, tolerance, fit_points, {}, 1e3 * (time.perf_counter() - t0))


def verify_bbm_special_case(f, p, s_list=DEFAULT_S, *, method="spherical", budgets=None, seed=None, tolerance=THEOREM_TOL, fit_points=3, threads=None, split_tol=1e-8):
    """Euclidean-ball kernel: plus and minus limits must sum to the |.|-kernel
    limit, which must match (K_{n,p}/p) int |grad f|^p."""
    t0 = time.perf_counter()
    n = f.dim
    B = ConvexBody.unit_ball(n)
    budgets = dict(budgets or {})
    profile = None
    if method == "spherical":
        sphere = sphere_grid(n, budgets["sphere_resolution"]) if "sphere_resolution" in budgets else None
        radial = _budget_kw(budgets, ("panels", "per_panel", "grading")) or None
        profile = build_spherical_profile(f, p, sphere, budgets.get("line_spacing"), radial, cutoff=budgets.get("cutoff"), threads=threads, **_budget_kw(budgets, ("w_order", "w_sub")))
    kw = dict(method=method, budgets=budgets, seed=seed, tolerance=tolerance, fit_points=fit_points, threads=threads)
    plus = sweep(f, B, p, "plus", s_list, profile=profile, **kw)
    minus = sweep(f, B, p, "minus", s_list, profile=None if profile is None else profile.negated(), **kw)
    absr = sweep(f, B, p, "abs", s_list, profile=profile, **kw)
    grad_p = 0.0 if f.name == "zero" else grad_gauge_integral(f, B, p, seed=0 if seed is None else seed)
    rhs = bbm_constant(n, p) / p * grad_p
    summed = plus.limit + minus.limit
    scale = max(abs(absr.limit), 1e-300)
    split_err = abs(summed - absr.limit) / scale if absr.limit != 0.0 else abs(summed)
    extras = {
        "plus_limit": plus.limit,
        "minus_limit": minus.limit,
        "summed_limit": summed,
        "abs_limit": absr.limit,
        "split_error": split_err,
        "split_tolerance": split_tol,
        "bbm_constant": bbm_constant(n, p),
        "grad_integral": grad_p,
        "plus_rows": plus.numeric_payload()["rows"],
        "minus_rows": minus.numeric_payload()["rows"],
        "checks_passed": bool(split_err <= split_tol),
    }
    config = {"kind": "bbm", "function": f.to_dict(), "p": p, "s": sorted(s_list), "method": method, "budgets": budgets, "seed": seed, "tolerance": tolerance, "fit_points": fit_points}
    return LimitReport(config, absr.rows, absr.limit, absr.slope, absr.residual, rhs, tolerance, fit_points, extras, 1e3 * (time.perf_counter() - t0))


def sphere_moment_crosscheck(n, p, v, resolution=None):
    """Numeric ``int_{S^{n-1}} (v.u)_+^p du`` with the two candidate closed forms.

    Returns (numeric, candidate_a, candidate_b) with candidate_a =
    (K_{n,p}/2)|v|^p and candidate_b = ((n+p)/4) K_{n,p} |v|^p.
    """
    if n not in (2, 3):
        raise ValueError("crosscheck is defined for n in {2, 3}")
    v = np.asarray(v, dtype=float)
    if resolution is None:
        resolution = 1 << 14 if n == 2 else 512
    grid = sphere_grid(n, resolution)
    nodes = grid.nodes
    norm = float(np.linalg.norm(v))
    if norm > 0.0:
        # rotate the grid so its splitting great circle is v-perp: the kink of
        # (v.u)_+ then falls on cell boundaries and the rule stays spectral
        M = np.eye(n)
        M[:, 0] = v / norm
        Q, _ = np.linalg.qr(M)
        Q = np.roll(Q, -1, axis=1)
        nodes = nodes @ Q.T
    numeric = float(np.sum(grid.weights * np.maximum(nodes @ v, 0.0) ** p))
    k = bbm_constant(n, p)
    norm_p = float(np.linalg.norm(v)) ** p
    return numeric, 0.5 * k * norm_p, 0.25 * (n + p) * k * norm_p


def crosscheck_match(numeric, cand_a, cand_b, rtol=1e-6):
    """Name of the candidate that reproduces the numeric value ('a', 'b', 'both' or 'none')."""
    ok_a = abs(numeric - cand_a) <= rtol * max(abs(cand_a), 1e-300)
    ok_b = abs(numeric - cand_b) <= rtol * max(abs(cand_b), 1e-300)
    return {(True, True): "both", (True, False): "a", (False, True): "b", (False, False): "none"}[(ok_a, ok_b)]
