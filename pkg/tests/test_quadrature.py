import math

import numpy as np
import pytest

from asymsob import extrapolate_limit, gauss_legendre, graded_radial_rule, mollifier_rho, power_law_radius_sample, sphere_grid
from asymsob._constants import bbm_constant
from asymsob.quadrature import sphere_area


def test_gauss_degree_three_exact_with_two_nodes():
    x, w = gauss_legendre(2, 0.0, 1.0)
    assert np.sum(w * x**3) == pytest.approx(0.25, abs=1e-15)


def test_gauss_weights_sum_to_length():
    _, w = gauss_legendre(5)
    assert np.sum(w) == pytest.approx(2.0, abs=1e-15)


def test_gauss_degree_seven():
    x, w = gauss_legendre(4, 0.0, 1.0)
    assert abs(np.sum(w * x**7) - 0.125) <= 1e-14


@pytest.mark.parametrize("bad", [(0, 0, 1), (3, 1, 1), (3, 2, 1)])
def test_gauss_rejects_bad_input(bad):
    with pytest.raises(ValueError):
        gauss_legendre(*bad)


def test_radial_rule_nodes_increasing_and_positive():
    rule = graded_radial_rule(2.0)
    assert np.all(np.diff(rule.nodes) > 0)
    assert rule.nodes[0] > 0 and rule.nodes[-1] <= 2.0
    assert rule.edges[1] == pytest.approx(2.0 * (1 / 48) ** 3)


def test_radial_rule_mild_singularity():
    rule = graded_radial_rule(1.0)
    got = rule.integrate(lambda r: np.ones_like(r), eta=-0.1)
    assert abs(got - 1 / 0.9) <= 1e-6 * (1 / 0.9)


def test_radial_rule_linear():
    assert abs(graded_radial_rule(1.0).integrate(lambda r: r) - 0.5) <= 1e-12


def test_radial_rule_near_one_stress():
    # s = 0.99, p = 2: exponent p - 1 - sp = 0.02 - 1
    rule = graded_radial_rule(2.0)
    want = 2**0.02 / 0.02
    assert abs(rule.integrate(lambda r: np.ones_like(r), eta=0.02 - 1) - want) <= 1e-6 * want


@pytest.mark.parametrize("p", [1, 1.5, 2, 3, 4])
@pytest.mark.parametrize("s", [0.5, 0.8, 0.9, 0.99, 0.995])
def test_radial_rule_contract_over_parameter_range(p, s):
    # r^(p-1-sp) with the weight absorbed either way must hit the closed form
    rule = graded_radial_rule(1.7)
    a = p - p * s
    want = 1.7**a / a
    eta = p * (1 - s) - 1
    assert abs(rule.integrate(lambda r: np.ones_like(r), eta=eta) - want) <= 1e-6 * want


def test_radial_rule_validation():
    with pytest.raises(ValueError):
        graded_radial_rule(-1.0)
    with pytest.raises(ValueError):
        graded_radial_rule(1.0, grading=0.5)
    with pytest.raises(ValueError):
        graded_radial_rule(1.0).weights(-1.0)


def test_circle_measure():
    g = sphere_grid(2, 64)
    assert g.integrate(lambda u: np.ones(len(u))) == pytest.approx(2 * math.pi, abs=1e-12)


def test_sphere_second_moment_n3():
    g = sphere_grid(3, 24)
    assert abs(g.integrate(lambda u: u[:, 2] ** 2) - 4 * math.pi / 3) <= 1e-10
    assert abs(np.sum(g.weights) - 4 * math.pi) <= 1e-10
    assert np.allclose(np.linalg.norm(g.nodes, axis=1), 1.0, atol=1e-12)


def test_circle_positive_part_of_linear_form():
    v = np.array([0.6, -0.8]) * 3.0
    g = sphere_grid(2, 4096)
    assert g.integrate(lambda u: np.maximum(u @ v, 0.0)) == pytest.approx(2 * 3.0, rel=1e-6)


@pytest.mark.parametrize("n,res", [(2, 32), (3, 10)])
def test_grid_point_symmetric_split_is_exact(n, res):
    g = sphere_grid(n, res)
    v = np.arange(1, n + 1) / 3.0
    for p in (1, 2, 3):
        plus = np.sum(g.weights * np.maximum(g.nodes @ v, 0) ** p)
        minus = np.sum(g.weights * np.maximum(-(g.nodes @ v), 0) ** p)
        full = np.sum(g.weights * np.abs(g.nodes @ v) ** p)
        assert plus + minus == pytest.approx(full, rel=1e-14)
    assert np.allclose(g.nodes[g.antipode], -g.nodes, atol=1e-15)


def test_sphere_grid_modes():
    with pytest.raises(ValueError):
        sphere_grid(4, 8)
    g = sphere_grid(5, 1000, mode="mc", seed=3)
    assert np.sum(g.weights) == pytest.approx(sphere_area(5), rel=1e-13)
    assert np.array_equal(g.nodes, sphere_grid(5, 1000, mode="mc", seed=3).nodes)
    with pytest.raises(ValueError):
        sphere_grid(3, 10, mode="mc")


def test_sphere_area_matches_moment_constant():
    # |S^{n-1}| = K_{n,0}: the p = 0 member of the same Gamma family
    for n in (2, 3, 4):
        want = 2 * math.pi ** (n / 2) / math.gamma(n / 2)
        assert sphere_area(n) == pytest.approx(want, rel=1e-14)
    assert bbm_constant(2, 2) == pytest.approx(math.pi, rel=1e-14)


def test_power_law_uniform_case():
    r, z = power_law_radius_sample(3.0, 0.0, 200_000, seed=1)
    assert z == 3.0
    assert np.all((r > 0) & (r <= 3.0))
    # uniform: mean 1.5, sd 3/sqrt(12)
    assert abs(r.mean() - 1.5) <= 3 * (3 / math.sqrt(12)) / math.sqrt(r.size)


def test_power_law_linear_density_mean():
    r, z = power_law_radius_sample(1.0, 1.0, 100_000, seed=2)
    assert z == 0.5
    sd = math.sqrt(0.5 - (2 / 3) ** 2)
    assert abs(r.mean() - 2 / 3) <= 3 * sd / math.sqrt(r.size)


def test_power_law_rejects_nonintegrable():
    with pytest.raises(ValueError):
        power_law_radius_sample(1.0, -1.0, 10, 0)


def test_extrapolation_exact_model():
    pts = [(s, 7 + 2 * (1 - s)) for s in (0.9, 0.95, 0.99)]
    L, c, res = extrapolate_limit(pts)
    assert L == pytest.approx(7, abs=1e-12)
    assert c == pytest.approx(2, abs=1e-10)
    assert res <= 1e-12


def test_extrapolation_constant():
    L, c, _ = extrapolate_limit([(0.8, 5.0), (0.9, 5.0), (0.99, 5.0)])
    assert L == pytest.approx(5.0, abs=1e-13) and abs(c) <= 1e-12


def test_extrapolation_validation():
    with pytest.raises(ValueError):
        extrapolate_limit([(0.9, 1.0), (0.95, 1.0)])
    with pytest.raises(ValueError):
        extrapolate_limit([(0.9, 1.0), (0.9, 1.0), (0.95, 1.0)])
    with pytest.raises(ValueError):
        extrapolate_limit([(0.9, 1.0), (1.0, 1.0), (0.95, 1.0)])


@pytest.mark.parametrize("eps,p,R", [(0.1, 2, 4.0), (0.01, 1, 1.0), (0.5, 3, 2.5)])
def test_mollifier_has_unit_mass(eps, p, R):
    rule = graded_radial_rule(R)
    # rho = const * r^(p eps - 1): absorb the power in the rule
    const = mollifier_rho(eps, p, R, 1.0)
    total = rule.integrate(lambda r: np.full_like(r, const), eta=p * eps - 1)
    assert abs(total - 1.0) <= 1e-10
    direct = rule.integrate(lambda r: mollifier_rho(eps, p, R, r) * r ** (1 - p * eps), eta=p * eps - 1)
    assert abs(direct - 1.0) <= 1e-10


def test_mollifier_mass_escapes_to_origin():
    R, p, delta = 2.0, 2, 0.5
    prev = 1.0
    for eps in (0.5, 0.2, 0.1, 0.05, 0.01):
        rule = graded_radial_rule(R - delta)
        shifted = rule.integrate(lambda r: mollifier_rho(eps, p, R, r + delta))
        assert shifted == pytest.approx(1 - (delta / R) ** (eps * p), rel=1e-8)
        assert shifted < prev
        prev = shifted
    assert prev < 0.03


def test_mollifier_zero_beyond_R():
    assert mollifier_rho(0.1, 2, 1.0, 1.5) == 0.0
    assert np.all(mollifier_rho(0.1, 2, 1.0, np.array([1.01, 3.0])) == 0.0)
