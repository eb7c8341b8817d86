"""Command-line front end: ``asymsob body|verify|selftest``."""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from ._constants import bbm_constant
from .fields import builtin_field, field_from_dict
from .geometry import ConvexBody, MomentNormSpec, body_from_dict, minkowski_functional, moment_norm, polar_body, simplex_integral_powered_form
from .limits import DEFAULT_S, LimitReport, crosscheck_match, sphere_moment_crosscheck, sweep, theorem_rhs, verify_bbm_special_case, verify_proposition_1d
from .plot import convergence_svg
from .presets import load_preset, preset_names
from .seminorm import build_spherical_profile, mollifier_form_check

EXIT_PASS, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


class ConfigError(Exception):
    pass


# ---------------------------------------------------------------- parsing


def parse_json_text(text, what):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        offset = len(text[: exc.pos].encode("utf-8"))
        raise ConfigError(f"{what}: malformed JSON at byte offset {offset}: {exc.msg}") from None


def load_json_arg(arg, what):
    """Inline JSON (starting with '{') or a path to a UTF-8 JSON file."""
    if arg.lstrip().startswith("{"):
        return parse_json_text(arg, what)
    try:
        with open(arg, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"{what}: cannot read {arg!r}: {exc.strerror}") from None
    return parse_json_text(text, what)


def parse_vector(text, what):
    try:
        return np.array([float(t) for t in text.split(",")])
    except ValueError:
        raise ConfigError(f"{what}: expected comma-separated numbers, got {text!r}") from None


KINDS = ("theorem", "proposition", "bbm", "duality", "scaling")
BUDGET_KEYS = {"sphere_resolution", "line_spacing", "panels", "per_panel", "grading", "cutoff", "w_order", "w_sub", "samples"}
_REQUIRED = {
    "theorem": {"function", "body", "p"},
    "proposition": {"function", "domain", "p"},
    "bbm": {"function", "p"},
    "duality": {"function", "body", "p"},
    "scaling": {"function", "body", "p", "lambdas"},
}
_ALLOWED = {"kind", "function", "body", "domain", "p", "sign", "s", "method", "budgets", "seed", "tolerance", "fit_points", "lambdas"}


@dataclass
class RunConfig:
    kind: str
    function: object
    p: float
    s: list = field(default_factory=lambda: list(DEFAULT_S))
    body: object = None
    domain: tuple = None
    sign: str = "plus"
    method: str = "spherical"
    budgets: dict = field(default_factory=dict)
    seed: int = None
    tolerance: float = None
    fit_points: int = 3
    lambdas: list = None


def run_config_from_dict(d):
    """Strict validation; every error names the offending field."""
    if not isinstance(d, dict):
        raise ConfigError("run config must be a JSON object")
    extra = set(d) - _ALLOWED
    if extra:
        raise ConfigError(f"unknown config field(s): {', '.join(sorted(extra))}")
    kind = d.get("kind")
    if kind not in KINDS:
        raise ConfigError(f"config field 'kind' must be one of {list(KINDS)}, got {kind!r}")
    missing = _REQUIRED[kind] - set(d)
    if missing:
        raise ConfigError(f"missing config field(s) for kind {kind!r}: {', '.join(sorted(missing))}")
    try:
        f = field_from_dict(d["function"])
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"config field 'function': {exc}") from None
    body = None
    if "body" in d:
        try:
            body = body_from_dict(d["body"])
        except (ValueError, TypeError) as exc:
            raise ConfigError(f"config field 'body': {exc}") from None
        if body.dim != f.dim:
            raise ConfigError("config field 'body': dimension differs from 'function'")
    p = d["p"]
    if not isinstance(p, (int, float)) or isinstance(p, bool) or not p >= 1:
        raise ConfigError(f"config field 'p' must be a number >= 1, got {p!r}")
    s = d.get("s", list(DEFAULT_S))
    if not isinstance(s, list) or len(s) < 3 or not all(isinstance(x, (int, float)) and 0 < x < 1 for x in s):
        raise ConfigError("config field 's' must list at least 3 values in (0, 1)")
    sign = d.get("sign", "plus")
    if sign not in ("plus", "minus", "abs"):
        raise ConfigError(f"config field 'sign' must be plus, minus or abs, got {sign!r}")
    method = d.get("method", "spherical")
    if method not in ("spherical", "mc"):
        raise ConfigError(f"config field 'method' must be spherical or mc, got {method!r}")
    budgets = d.get("budgets", {})
    if not isinstance(budgets, dict) or set(budgets) - BUDGET_KEYS:
        bad = sorted(set(budgets) - BUDGET_KEYS) if isinstance(budgets, dict) else budgets
        raise ConfigError(f"config field 'budgets': unknown key(s) {bad}")
    seed = d.get("seed")
    if seed is not None and (not isinstance(seed, int) or isinstance(seed, bool) or seed < 0):
        raise ConfigError(f"config field 'seed' must be a nonnegative integer, got {seed!r}")
    if method == "mc" and seed is None:
        raise ConfigError("config field 'seed' is required for method 'mc'")
    tol = d.get("tolerance")
    if tol is not None and (not isinstance(tol, (int, float)) or tol <= 0):
        raise ConfigError(f"config field 'tolerance' must be positive, got {tol!r}")
    fit_points = d.get("fit_points", 3)
    if not isinstance(fit_points, int) or fit_points < 3:
        raise ConfigError("config field 'fit_points' must be an integer >= 3")
    domain = d.get("domain")
    if kind == "proposition":
        if f.dim != 1:
            raise ConfigError("config field 'function': proposition runs need a 1-d field")
        if not (isinstance(domain, list) and len(domain) == 2 and domain[0] < domain[1]):
            raise ConfigError("config field 'domain' must be [a, b] with a < b")
        domain = tuple(float(x) for x in domain)
    lambdas = d.get("lambdas")
    if kind == "scaling" and (not isinstance(lambdas, list) or not lambdas or not all(isinstance(x, (int, float)) and x > 0 for x in lambdas)):
        raise ConfigError("config field 'lambdas' must list positive numbers")
    return RunConfig(kind, f, p, [float(x) for x in s], body, domain, sign, method, dict(budgets), seed, tol, fit_points, lambdas)


def resolve_threads(arg):
    if arg is not None:
        return arg
    env = os.environ.get("ASL_THREADS")
    if env:
        try:
            n = int(env)
        except ValueError:
            raise ConfigError(f"ASL_THREADS must be a positive integer, got {env!r}") from None
        if n < 1:
            raise ConfigError(f"ASL_THREADS must be a positive integer, got {env!r}")
        return n
    return None


# ---------------------------------------------------------------- running


def _profile(cfg, target, threads):
    from .quadrature import sphere_grid

    b = cfg.budgets
    sphere = sphere_grid(target.dim, b["sphere_resolution"]) if "sphere_resolution" in b else None
    radial = {k: b[k] for k in ("panels", "per_panel", "grading") if k in b} or None
    extra = {k: b[k] for k in ("w_order", "w_sub") if k in b}
    return build_spherical_profile(target, cfg.p, sphere, b.get("line_spacing"), radial, cutoff=b.get("cutoff"), threads=threads, **extra)


def execute(cfg, threads=None):
    kw = dict(s_list=cfg.s, method=cfg.method, budgets=cfg.budgets, seed=cfg.seed, fit_points=cfg.fit_points, threads=threads)
    if cfg.tolerance is not None:
        kw["tolerance"] = cfg.tolerance
    f = cfg.function
    if cfg.kind == "proposition":
        return verify_proposition_1d(f, cfg.domain, cfg.p, cfg.s, tolerance=cfg.tolerance or 0.02, fit_points=cfg.fit_points)
    if cfg.kind == "bbm":
        kw.pop("s_list")
        return verify_bbm_special_case(f, cfg.p, cfg.s, **kw)
    if cfg.kind == "theorem":
        return sweep(f, cfg.body, cfg.p, cfg.sign, **kw)
    if cfg.kind == "duality":
        minus = sweep(f, cfg.body, cfg.p, "minus", **kw)
        plus_neg = sweep(f.negated(), cfg.body, cfg.p, "plus", **kw)
        same = minus.numeric_payload() == plus_neg.numeric_payload()
        minus.extras.update({"duality_identical": same, "checks_passed": same, "negated_plus_limit": plus_neg.limit})
        return minus
    # scaling: one profile serves K and every lambda K
    profile = _profile(cfg, f.negated() if cfg.sign == "minus" else f, threads) if cfg.method == "spherical" else None
    if profile is None:
        raise ConfigError("config field 'method': scaling runs need the deterministic spherical path")
    base = sweep(f, cfg.body, cfg.p, cfg.sign, profile=profile, **kw)
    n = f.dim
    est_sign = "abs" if cfg.sign == "abs" else "plus"
    rhs_sign = "plus" if cfg.sign == "minus" else cfg.sign
    target = f.negated() if cfg.sign == "minus" else f
    row_err = 0.0
    rhs_err = 0.0
    per_lambda = {}
    for lam in cfg.lambdas:
        lam = float(lam)
        K2 = cfg.body.scaled(lam)
        ratios = []
        for r in base.rows:
            s = r["s"]
            scaled = (1.0 - s) * profile.estimate(K2, s, est_sign)
            want = lam ** (n + s * cfg.p) * r["scaled"]
            err = abs(scaled - want) / abs(want) if want != 0.0 else abs(scaled)
            ratios.append(err)
        rhs2 = theorem_rhs(target, K2, cfg.p, rhs_sign)
        want = lam ** (n + cfg.p) * base.rhs
        e2 = abs(rhs2 - want) / abs(want) if want != 0.0 else abs(rhs2)
        row_err = max(row_err, max(ratios))
        rhs_err = max(rhs_err, e2)
        per_lambda[repr(lam)] = {"row_relative_error": max(ratios), "rhs": rhs2, "rhs_relative_error": e2}
    ok = row_err <= 1e-10 and rhs_err <= 1e-10
    base.extras.update({"lambdas": per_lambda, "row_scaling_error": row_err, "rhs_scaling_error": rhs_err, "scaling_tolerance": 1e-10, "checks_passed": ok})
    base.config["lambdas"] = [float(x) for x in cfg.lambdas]
    base.config["kind"] = "scaling"
    return base


# ---------------------------------------------------------------- subcommands


def _emit(obj):
    print(json.dumps(obj, sort_keys=True, default=float))


def cmd_body(args):
    K = body_from_dict(load_json_arg(args.body, "--body")) if args.body else None
    if K is None:
        raise ConfigError("--body is required")
    if args.action == "eval":
        if not args.x:
            raise ConfigError("--x is required for body eval")
        x = parse_vector(args.x, "--x")
        if x.size != K.dim:
            raise ConfigError(f"--x has {x.size} entries but the body is {K.dim}-dimensional")
        _emit({"gauge": float(minkowski_functional(K, x))})
    elif args.action == "polar":
        _emit({"polar": polar_body(K).to_dict()})
    else:
        if not args.v:
            raise ConfigError("--v is required for body moment-norm")
        v = parse_vector(args.v, "--v")
        if v.size != K.dim:
            raise ConfigError(f"--v has {v.size} entries but the body is {K.dim}-dimensional")
        spec = MomentNormSpec(K, args.p, args.sign)
        if args.method == "mc":
            seed = args.seed if args.seed is not None else 0
            val, err = moment_norm(spec, v, method="mc", samples=args.samples, seed=seed, return_error=True)
            _emit({"norm": val, "std_error": err, "method": "mc", "samples": args.samples, "seed": seed})
        else:
            method = "exact" if args.method == "exact" else "auto"
            if method == "auto" and not spec.exact_available:
                raise ConfigError("--method: no exact path for this body and p; pass --method mc")
            _emit({"norm": float(moment_norm(spec, v, method=method)), "method": "exact"})
    return EXIT_PASS


def _write(path, text):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def cmd_verify(args):
    if (args.preset is None) == (args.config is None):
        raise ConfigError("give exactly one of --preset or --config")
    if args.preset is not None:
        try:
            raw = load_preset(args.preset)
        except KeyError:
            raise ConfigError(f"--preset: unknown preset {args.preset!r}; known: {', '.join(preset_names())}") from None
    else:
        raw = load_json_arg(args.config, "--config")
    if args.seed is not None:
        raw["seed"] = args.seed
    if args.tolerance is not None:
        raw["tolerance"] = args.tolerance
    cfg = run_config_from_dict(raw)
    threads = resolve_threads(args.threads)
    report = execute(cfg, threads)
    if args.json:
        _write(args.json, report.to_json(timing=args.timing))
    if args.csv:
        _write(args.csv, report.to_csv(timing=args.timing))
    if args.svg:
        _write(args.svg, convergence_svg(report))
    if args.preset:
        name = args.preset
    elif args.config.lstrip().startswith("{"):
        name = f"config {report.digest}"
    else:
        name = args.config
    print(f"{name}: limit={report.limit!r} rhs={report.rhs!r} relative_error={report.relative_error:.3e} tolerance={report.tolerance} verdict={report.verdict}")
    if not (args.json or args.csv):
        sys.stdout.write(report.to_json(timing=args.timing))
    return EXIT_PASS if report.passed else EXIT_FAIL


# ---------------------------------------------------------------- selftest


def _rel(a, b):
    return abs(a - b) / max(abs(b), 1e-300)


def _check_gauge_homogeneity():
    K = ConvexBody.polytope_v([[-1, -1], [2, 0], [0, 1]])
    rng = np.random.default_rng(11)
    worst = 0.0
    for _ in range(20):
        x = rng.normal(size=2)
        lam = rng.uniform(0.1, 10.0)
        worst = max(worst, _rel(minkowski_functional(K, lam * x), lam * minkowski_functional(K, x)))
    return worst <= 1e-12, f"max rel dev {worst:.1e}"


def _check_gauge_examples():
    sq = ConvexBody.polytope_h([[1, 0], [-1, 0], [0, 1], [0, -1]], [1, 1, 1, 1])
    a = minkowski_functional(sq, np.array([2.0, 1.0]))
    b = minkowski_functional(ConvexBody.unit_ball(2), np.array([3.0, 4.0]))
    c = minkowski_functional(polar_body(sq), np.array([1.0, 1.0]))
    ok = abs(a - 2) <= 1e-12 and abs(b - 5) <= 1e-12 and abs(c - 2) <= 1e-12
    return ok, f"square(2,1)={a:.6g} ball(3,4)={b:.6g} polar(1,1)={c:.6g}"


def _check_moment_examples():
    simplex = simplex_integral_powered_form(np.array([[0, 0], [1, 0], [0, 1]], dtype=float), np.array([1.0, 0.0]), 1)
    I = ConvexBody.interval(-1, 2)
    plus = moment_norm(MomentNormSpec(I, 1, "plus"), np.array([1.0]))
    minus = moment_norm(MomentNormSpec(I, 1, "minus"), np.array([1.0]))
    ok = abs(plus - 4) <= 1e-12 and abs(minus - 1) <= 1e-12 and abs(simplex - 1 / 6) <= 1e-12
    return ok, f"simplex={simplex:.6g} interval plus={plus:.6g} minus={minus:.6g}"


def _check_moment_split():
    K = ConvexBody.polytope_v([[-1, -1], [2, 0], [0, 1]])
    rng = np.random.default_rng(5)
    worst = 0.0
    for p in (1, 2, 3):
        for _ in range(5):
            v = rng.normal(size=2)
            sym = moment_norm(MomentNormSpec(K, p, "symmetric"), v) ** p
            half = 0.5 * (moment_norm(MomentNormSpec(K, p, "plus"), v) ** p + moment_norm(MomentNormSpec(K, p, "minus"), v) ** p)
            refl = _rel(moment_norm(MomentNormSpec(K, p, "minus"), v), moment_norm(MomentNormSpec(K.reflected(), p, "plus"), v))
            worst = max(worst, _rel(sym, half), refl)
    return worst <= 1e-12, f"max rel dev {worst:.1e}"


def _check_moment_gl():
    K = ConvexBody.polytope_v([[-1, -1], [2, 0], [0, 1]])
    rng = np.random.default_rng(9)
    worst = 0.0
    for _ in range(20):
        A = rng.normal(size=(2, 2))
        if abs(np.linalg.det(A)) < 0.1:
            A += np.eye(2)
        v = rng.normal(size=2)
        lhs = moment_norm(MomentNormSpec(K.linear_image(A), 2, "plus"), v) ** 2
        rhs = abs(np.linalg.det(A)) * moment_norm(MomentNormSpec(K, 2, "plus"), A.T @ v) ** 2
        worst = max(worst, _rel(lhs, rhs))
    return worst <= 1e-9, f"max rel dev {worst:.1e}"


def _check_sphere_crosscheck():
    numeric, a, b = sphere_moment_crosscheck(2, 2, [1.0, 0.0])
    match = crosscheck_match(numeric, a, b)
    ok = abs(numeric - math.pi / 2) <= 1e-8 and match in ("a", "b", "both")
    return ok, f"numeric={numeric:.12f} candidate_a={a:.12f} candidate_b={b:.12f} matched={match}"


def _check_sphere_split():
    v = np.array([0.3, -1.2, 0.5])
    worst = 0.0
    for p in (1, 2, 3):
        up = sphere_moment_crosscheck(3, p, v)[0]
        down = sphere_moment_crosscheck(3, p, -v)[0]
        worst = max(worst, _rel(up + down, bbm_constant(3, p) * np.linalg.norm(v) ** p))
    return worst <= 1e-8, f"max rel dev {worst:.1e}"


def _check_mollifier():
    lhs, rhs = mollifier_form_check(builtin_field("hat1d", 1), 2, 0.9, 4.0)
    return _rel(lhs, rhs) <= 1e-4, f"lhs={lhs:.10g} rhs={rhs:.10g}"


def _check_bbm_constant():
    cases = [((1, p), 2.0) for p in (1, 1.5, 2, 3)] + [((2, 2), math.pi), ((3, 2), 4 * math.pi / 3)]
    worst = max(_rel(bbm_constant(*a), want) for a, want in cases)
    return worst <= 1e-12, f"max rel dev {worst:.1e}"


SELFTESTS = [
    ("gauge-homogeneity", _check_gauge_homogeneity),
    ("gauge-examples", _check_gauge_examples),
    ("moment-examples", _check_moment_examples),
    ("moment-sign-split", _check_moment_split),
    ("moment-gl-covariance", _check_moment_gl),
    ("sphere-moment-crosscheck", _check_sphere_crosscheck),
    ("sphere-moment-split", _check_sphere_split),
    ("mollifier-identity", _check_mollifier),
    ("bbm-constant", _check_bbm_constant),
]


def cmd_selftest(args):
    chosen = [(n, fn) for n, fn in SELFTESTS if not args.filter or args.filter in n]
    if not chosen:
        raise ConfigError(f"--filter {args.filter!r} matches no check")
    width = max(len(n) for n, _ in chosen)
    failures = 0
    for name, fn in chosen:
        try:
            ok, detail = fn()
        except Exception as exc:  # a crashing check is a failing check
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        failures += not ok
        print(f"{name:<{width}}  {'PASS' if ok else 'FAIL'}  {detail}")
    print(f"{len(chosen) - failures}/{len(chosen)} checks passed")
    return EXIT_PASS if failures == 0 else EXIT_FAIL


# ---------------------------------------------------------------- entry point


def build_parser():
    ap = argparse.ArgumentParser(prog="asymsob", description="Asymmetric anisotropic fractional seminorms and their s -> 1 limits.")
    ap.add_argument("--version", action="version", version=f"asymsob {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    b = sub.add_parser("body", help="gauge, polar body and moment norms of a convex body")
    b.add_argument("action", choices=["eval", "polar", "moment-norm"])
    b.add_argument("--body", required=True, help="body JSON file or inline JSON object")
    b.add_argument("--x", help="point for eval, comma separated")
    b.add_argument("--v", help="vector for moment-norm, comma separated")
    b.add_argument("--p", type=float, default=1.0)
    b.add_argument("--sign", choices=["plus", "minus", "symmetric"], default="plus")
    b.add_argument("--method", choices=["auto", "exact", "mc"], default="auto")
    b.add_argument("--samples", type=int, default=1_000_000)
    b.add_argument("--seed", type=int)
    b.set_defaults(func=cmd_body)

    v = sub.add_parser("verify", help="run an s -> 1 verification sweep")
    v.add_argument("--preset", help=f"one of: {', '.join(preset_names())}")
    v.add_argument("--config", help="run config JSON file or inline JSON object")
    v.add_argument("--seed", type=int)
    v.add_argument("--threads", type=int, help="worker cap (default: $ASL_THREADS or all cores)")
    v.add_argument("--tolerance", type=float)
    v.add_argument("--json", metavar="PATH")
    v.add_argument("--csv", metavar="PATH")
    v.add_argument("--svg", metavar="PATH")
    v.add_argument("--timing", action="store_true", help="include wall-clock columns (outputs stop being reproducible)")
    v.set_defaults(func=cmd_verify)

    t = sub.add_parser("selftest", help="fast invariant checks")
    t.add_argument("--filter", help="run only checks whose name contains this text")
    t.set_defaults(func=cmd_selftest)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    if getattr(args, "threads", None) is not None and args.threads < 1:
        print("error: --threads must be >= 1", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
