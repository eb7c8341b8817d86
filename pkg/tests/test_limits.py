import csv
import io
import json
import math

import numpy as np
import pytest

from asymsob import ConvexBody, LimitReport, bbm_constant, builtin_field, sphere_moment_crosscheck, sweep, theorem_rhs, verify_bbm_special_case, verify_proposition_1d
from asymsob.limits import crosscheck_match


def test_bbm_constant_examples():
    for p in (1, 1.5, 2, 3, 7.25):
        assert bbm_constant(1, p) == pytest.approx(2.0, abs=1e-12)
    assert bbm_constant(2, 2) == pytest.approx(math.pi, abs=1e-12)
    assert bbm_constant(3, 2) == pytest.approx(4 * math.pi / 3, abs=1e-12)


def test_bbm_constant_is_sphere_moment():
    # K_{n,p} = int_S |e1.u|^p: checked on the deterministic grid
    from asymsob import sphere_grid

    g = sphere_grid(3, 64)
    for p in (2, 4):
        assert g.integrate(lambda u: np.abs(u[:, 0]) ** p) == pytest.approx(bbm_constant(3, p), rel=1e-12)


def test_bbm_constant_rejects_bad_input():
    with pytest.raises(ValueError):
        bbm_constant(0, 2)
    with pytest.raises(ValueError):
        bbm_constant(2, 0.5)


def test_theorem_rhs_examples(hat):
    assert theorem_rhs(hat, ConvexBody.interval(-1, 1), 1, "plus") == pytest.approx(2.0, abs=1e-13)
    assert theorem_rhs(hat, ConvexBody.interval(-1, 2), 1, "plus") == pytest.approx(5.0, abs=1e-13)
    assert theorem_rhs(builtin_field("zero", 2), ConvexBody.unit_ball(2), 2) == 0.0


def test_theorem_rhs_minus_is_plus_of_negation(tent2, triangle):
    assert theorem_rhs(tent2, triangle, 2, "minus") == theorem_rhs(tent2.negated(), triangle, 2, "plus")


def test_theorem_rhs_abs_is_sum_of_signs(tent2, triangle):
    total = theorem_rhs(tent2, triangle, 2, "plus") + theorem_rhs(tent2, triangle, 2, "minus")
    assert theorem_rhs(tent2, triangle, 2, "abs") == pytest.approx(total, rel=1e-12)


def test_sweep_of_zero_passes_with_exact_zeros(disk):
    r = sweep(builtin_field("zero", 2), disk, 2)
    assert all(row["estimate"] == 0.0 and row["scaled"] == 0.0 for row in r.rows)
    assert r.limit == 0.0 and r.rhs == 0.0 and r.relative_error == 0.0 and r.verdict == "pass"


def test_one_dimensional_sweep(hat):
    r = sweep(hat, ConvexBody.interval(-1, 1), 1)
    assert r.rhs == pytest.approx(2.0)
    assert r.relative_error <= 0.05 and r.passed


def test_sweep_validation(hat, triangle):
    K = ConvexBody.interval(-1, 1)
    with pytest.raises(ValueError):
        sweep(hat, K, 1, s_list=[0.9, 0.99])
    with pytest.raises(ValueError):
        sweep(hat, K, 1, s_list=[0.9, 0.95, 1.0])
    with pytest.raises(ValueError):
        sweep(hat, triangle, 1)
    with pytest.raises(ValueError):
        sweep(hat, K, 1, method="mc")


def test_rows_sorted_and_error_recomputed():
    rows = [{"s": s, "estimate": 1.0, "scaled": 1 - s, "std_error": 0.0} for s in (0.99, 0.8, 0.9)]
    r = LimitReport({}, rows, 1.02, 0.0, 0.0, 1.0, 0.05)
    assert [row["s"] for row in r.rows] == [0.8, 0.9, 0.99]
    assert r.relative_error == pytest.approx(0.02)
    r.limit = 1.2
    assert r.relative_error == pytest.approx(0.2) and r.verdict == "fail"


def test_zero_rhs_uses_absolute_floor():
    r = LimitReport({}, [], 5e-4, 0.0, 0.0, 0.0, 0.05)
    assert r.passed
    r.limit = 2e-3
    assert not r.passed


def test_report_serialisation(hat):
    r = verify_proposition_1d(hat, (-2, 2), 1)
    d = json.loads(r.to_json())
    assert d["config_digest"] == r.digest and d["version"]
    assert d["verdict"] == "pass" and "elapsed_ms" not in d
    rows = list(csv.reader(io.StringIO(r.to_csv())))
    assert rows[0] == ["s", "one_minus_s", "estimate", "scaled", "std_error", "elapsed_ms", "config_digest", "version"]
    assert len(rows) == 6
    assert all(row[5] == "" and row[6] == r.digest for row in rows[1:])
    timed = list(csv.reader(io.StringIO(r.to_csv(timing=True))))
    assert all(float(row[5]) >= 0 for row in timed[1:])
    assert r.to_csv() == verify_proposition_1d(hat, (-2, 2), 1).to_csv()


@pytest.mark.parametrize("p", [1, 2])
def test_proposition_hat(hat, p):
    r = verify_proposition_1d(hat, (-2, 2), p)
    assert r.rhs == pytest.approx(1 / p, abs=1e-14)
    assert r.relative_error <= 0.02


def test_proposition_non_increasing():
    r = verify_proposition_1d(builtin_field("ramp1d", 1), (0, 1), 1)
    assert r.rhs == 0.0 and r.limit <= 1e-3 and r.passed


def test_proposition_requires_support_inside_domain(hat):
    with pytest.raises(ValueError):
        verify_proposition_1d(hat, (-0.5, 2), 1)


def test_bbm_one_dimensional(hat):
    r = verify_bbm_special_case(hat, 1)
    assert r.rhs == pytest.approx(4.0)
    assert abs(r.extras["plus_limit"] + r.extras["minus_limit"] - 4.0) <= 0.05 * 4.0
    assert r.extras["split_error"] <= 1e-8 and r.passed


def test_bbm_zero():
    r = verify_bbm_special_case(builtin_field("zero", 2), 2)
    assert r.limit == 0.0 and r.rhs == 0.0 and r.passed


def test_sphere_crosscheck_values():
    numeric, a, b = sphere_moment_crosscheck(2, 2, [1.0, 0.0])
    assert abs(numeric - math.pi / 2) <= 1e-8
    assert crosscheck_match(numeric, a, b) == "a"
    assert b == pytest.approx(math.pi)


@pytest.mark.parametrize("n", [2, 3])
def test_sphere_crosscheck_homogeneity_and_split(n, rng):
    v = rng.normal(size=n)
    for p in (1, 2, 3):
        num, a, _ = sphere_moment_crosscheck(n, p, v)
        assert sphere_moment_crosscheck(n, p, 1.7 * v)[0] == pytest.approx(1.7**p * num, rel=1e-8)
        down = sphere_moment_crosscheck(n, p, -v)[0]
        assert num + down == pytest.approx(bbm_constant(n, p) * np.linalg.norm(v) ** p, rel=1e-8)


def test_sphere_crosscheck_dimension():
    with pytest.raises(ValueError):
        sphere_moment_crosscheck(4, 2, [1, 0, 0, 0])


def test_scaling_of_rows_and_rhs(small_tent_profile, tent2, triangle):
    for lam in (0.5, 2.0):
        K2 = triangle.scaled(lam)
        a = sweep(tent2, triangle, 2, profile=small_tent_profile)
        b = sweep(tent2, K2, 2, profile=small_tent_profile)
        for ra, rb in zip(a.rows, b.rows):
            assert rb["scaled"] == pytest.approx(lam ** (2 + 2 * ra["s"]) * ra["scaled"], rel=1e-10)
        assert b.rhs == pytest.approx(lam**4 * a.rhs, rel=1e-10)


def test_failed_rows_are_marked():
    from asymsob.limits import _row

    row = _row(0.9, lambda s: (_ for _ in ()).throw(ValueError("bad")))
    assert row["error"] == "bad" and math.isnan(row["estimate"])
    r = LimitReport({}, [row, dict(row, s=0.95), dict(row, s=0.99)], math.nan, math.nan, math.nan, 1.0, 0.05)
    assert r.verdict == "fail"
