import math
from fractions import Fraction as F

import numpy as np
import pytest

from motzkinlab import (
    GaussURule,
    MixedMeasure,
    QuadratureError,
    WeightConfig,
    cheb_u,
    cheb_u_closed,
    h_m_dp,
    lemma42_check,
    mu_moment,
    mu_moment_split,
    ratio_probe,
    semicircle_moment,
    theta_integral,
    viennot_integral,
    weight_table,
)

ONE = lambda x: np.ones_like(np.asarray(x, dtype=float))


def test_cheb_u_values():
    grid = np.linspace(-2.0, 2.0, 41)
    assert np.all(cheb_u(0, grid) == 1.0)
    for n in range(9):
        assert cheb_u(n, 2.0) == pytest.approx(n + 1, rel=1e-12)
        assert np.max(np.abs(cheb_u(n, grid))) <= n + 1 + 1e-9
    assert cheb_u(2, 2.5) == pytest.approx(5.25, rel=1e-14)
    assert cheb_u_closed(2, 2.5) == pytest.approx(5.25, rel=1e-12)


def test_cheb_u_recursion_vs_closed_form_off_interval():
    for n in range(0, 12):
        for x in (2.0, 2.5, 3.3, 4.8, -2.0, -2.7):
            assert cheb_u(n, x) == pytest.approx(cheb_u_closed(n, x), rel=1e-12)


def test_gauss_rule_mass_and_moments():
    rule = GaussURule.build(20)
    assert rule.integrate(ONE) == pytest.approx(1.0, abs=1e-14)
    for k in range(0, 40, 2):
        exact = semicircle_moment(k)
        got = rule.integrate(lambda x: x**k)
        assert got == pytest.approx(exact, rel=1e-12)
    for k in range(1, 40, 2):
        # odd moments vanish; the attainable accuracy is set by the
        # magnitude of the summed terms, not by the zero value
        scale = rule.integrate(lambda x: np.abs(x) ** k)
        assert abs(rule.integrate(lambda x: x**k)) <= 1e-12 * max(1.0, scale)


def test_semicircle_moment_oracle():
    # Catalan numbers by an independent direct formula
    for j, k in enumerate(range(0, 16, 2)):
        assert semicircle_moment(k) == math.comb(2 * j, j) // (j + 1)
    assert semicircle_moment(7) == 0


def test_viennot_examples():
    assert viennot_integral(0, 0, 1, 1.0) == pytest.approx(1.0, abs=1e-12)
    assert viennot_integral(0, 0, 1, 0.5) == pytest.approx(0.5, abs=1e-12)
    for sigma in (0.5, 1.0, 2.0):
        assert viennot_integral(0, 0, 2, sigma) == pytest.approx(
            sigma**2 + 1, rel=1e-12
        )
    assert viennot_integral(0, 1, 1, 1.0) == pytest.approx(1.0, rel=1e-12)


def test_viennot_against_engine_subgrid():
    for sigma in (F(1, 2), F(2)):
        weights = WeightConfig.constant(sigma)
        for length in (1, 3, 7):
            table = weight_table(weights, length, 4 + length)
            for m in range(5):
                for n in range(5):
                    exact = float(table.value(m, n))
                    got = viennot_integral(m, n, length, float(sigma))
                    assert abs(got - exact) <= 1e-10 * max(1.0, abs(exact))


def test_geometric_series_of_cheb_u():
    # sum_n rho^n u_n(x) converges to 1 / (1 - rho x + rho^2) on [-2, 2];
    # truncation error is bounded by a constant times N rho^N
    grid = np.linspace(-2.0, 2.0, 81)
    for rho in (0.3, 0.7, 0.95):
        target = 1.0 / (1.0 - grid * rho + rho * rho)
        prev_err = None
        n_terms = 64
        while n_terms <= 512:
            partial = np.zeros_like(grid)
            for n in range(n_terms):
                partial += rho**n * cheb_u(n, grid)
            err = float(np.max(np.abs(partial - target)))
            assert err <= 20.0 * n_terms * rho**n_terms
            if prev_err is not None:
                assert err < prev_err
            prev_err = err
            n_terms *= 2


def test_mixed_measure_fields():
    semi = MixedMeasure.semicircle()
    assert semi.atom_mass == 0.0
    assert semi.top_of_support == 2.0
    assert semi.density(0.0) == pytest.approx(1 / math.pi)
    m2 = MixedMeasure(2.0)
    assert m2.atom_mass == pytest.approx(0.75)
    assert m2.atom_location == pytest.approx(2.5)
    assert m2.top_of_support == pytest.approx(2.5)
    sub = MixedMeasure(0.5)
    assert sub.atom_mass == 0.0
    grid = np.linspace(-2, 2, 101)
    assert np.all(m2.density(grid) >= 0)


def test_mass_normalization_grid():
    for rho in (0.1, 0.5, 0.9, 1.0, 1.1, 2.0, 3.0):
        assert mu_moment(ONE, rho, 1.0, 0) == pytest.approx(1.0, abs=1e-10)


def test_atom_split():
    continuous, atom = mu_moment_split(ONE, 2.0, 1.0, 0)
    assert atom == pytest.approx(0.75, abs=1e-12)
    assert continuous == pytest.approx(0.25, abs=1e-10)
    _, atom_sub = mu_moment_split(ONE, 0.5, 1.0, 0)
    assert atom_sub == 0.0
    _, atom_crit = mu_moment_split(ONE, 1.0, 1.0, 0)
    assert atom_crit == 0.0


def test_first_moment_equals_ratio():
    ident = lambda x: np.asarray(x, dtype=float)
    for rho in (0.5, 1.0, 2.0):
        assert mu_moment(ident, rho, 1.0, 0) == pytest.approx(rho, abs=1e-10)


def test_h_m_dp_examples():
    sigma = F(1)
    assert h_m_dp(0, F(1, 2), 1, sigma) == sigma + F(1, 2)
    assert h_m_dp(1, F(1, 2), 1, sigma) == 1 + sigma * F(1, 2) + F(1, 4)
    table = weight_table(WeightConfig.constant(sigma), 3, 5)
    assert h_m_dp(2, 0, 3, sigma) == table.value(2, 0)


def test_mixed_moment_certificates():
    for m, rho, length, sigma in (
        (0, "1/2", 3, 1),
        (0, 2, 3, 1),
        (2, 1, 10, "1/2"),
        (4, 3, 20, "1/2"),
    ):
        report = lemma42_check(m, rho, length, sigma)
        assert report.passed, report
        assert report.residual <= 1e-8
    obj = lemma42_check(1, 2, 4, 1).to_json_obj()
    assert obj["pass"] and set(obj) >= {"check", "params", "lhs", "rhs", "residual", "tol"}


def test_ratio_probe_behaviour():
    # constant functions give exactly the constant
    const = lambda x: np.full_like(np.asarray(x, dtype=float), 3.5)
    for r in ratio_probe(const, MixedMeasure(2.0), 1.0, [1, 4, 9]):
        assert r == pytest.approx(3.5, rel=1e-12)
    # identity against the semicircle edge
    ident = lambda x: np.asarray(x, dtype=float)
    ratios = ratio_probe(ident, MixedMeasure.semicircle(), 1.0, [4, 16, 64, 256])
    gaps = [abs(r - 2.0) for r in ratios]
    assert gaps == sorted(gaps, reverse=True)
    assert gaps[-1] < 0.05
    # the defining polynomial of the tilt vanishes at the atom: headroom
    # for the end height drains away
    poly = lambda x: 1.0 - 2.0 * np.asarray(x, dtype=float) + 4.0
    drained = ratio_probe(poly, MixedMeasure(2.0), 1.0, [2, 8, 32, 128])
    assert all(a > b for a, b in zip(drained, drained[1:]))
    assert drained[-1] == pytest.approx(0.0, abs=1e-3)


def test_distance_to_top_decreases_on_dyadic_ladder():
    for measure in (MixedMeasure.semicircle(), MixedMeasure(2.0)):
        top = measure.top_of_support
        func = lambda x: top - np.asarray(x, dtype=float)
        values = ratio_probe(func, measure, 1.0, [2, 4, 8, 16, 32])
        assert all(a > b for a, b in zip(values, values[1:]))


def test_theta_integral_non_convergence():
    with pytest.raises(QuadratureError):
        theta_integral(lambda t: np.sin(t), tol=0.0, max_nodes=4096)
