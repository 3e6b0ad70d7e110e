import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from magucp import ConfigurationError, EvaluationError
from magucp.quadrature import (
    RadiiGrid,
    integrate_ball,
    integrate_sphere,
    make_ball_rule,
    make_rules,
    make_sphere_rule,
)
from oracles import ball_monomial, monomials, sphere_monomial


def _monomial(alpha):
    return lambda x: np.prod([x[..., i] ** a for i, a in enumerate(alpha)], axis=0)


def _relative(got, exact, area):
    # odd monomials integrate to zero; measure them against the rule's total weight
    return abs(got - exact) / max(abs(exact), area)


class TestSphereRule:
    def test_circle_constant(self):
        assert integrate_sphere(lambda x: np.ones(x.shape[:-1]), 1.0, make_sphere_rule(2, 16)) == pytest.approx(
            2 * math.pi, rel=1e-15
        )

    def test_sphere_x1_squared(self):
        got = integrate_sphere(lambda x: x[..., 0] ** 2, 1.0, make_sphere_rule(3, 14))
        assert got == pytest.approx(4 * math.pi / 3, rel=1e-14)

    def test_circle_cos_squared(self):
        got = integrate_sphere(lambda x: x[..., 0] ** 2, 1.0, make_sphere_rule(2, 64))
        assert got == pytest.approx(math.pi, rel=1e-15)

    @pytest.mark.parametrize("n,order", [(2, 8), (2, 33), (2, 100), (3, 7), (3, 14), (3, 23), (3, 30)])
    def test_exact_on_declared_basis(self, n, order):
        rule = make_sphere_rule(n, order)
        assert rule.exact_degree >= order - 1 if n == 2 else rule.exact_degree >= order
        area = float(np.sum(rule.weights))
        for alpha in monomials(n, rule.exact_degree):
            got = integrate_sphere(_monomial(alpha), 1.0, rule)
            assert _relative(got, sphere_monomial(alpha), area) <= 1e-12, alpha

    @pytest.mark.parametrize("n", [2, 3])
    def test_default_rule_exact_on_sampled_basis(self, n, rng):
        rule = make_rules(n).sphere
        basis = monomials(n, rule.exact_degree)
        area = float(np.sum(rule.weights))
        for i in rng.choice(len(basis), size=300, replace=False):
            alpha = basis[i]
            got = integrate_sphere(_monomial(alpha), 1.0, rule)
            assert _relative(got, sphere_monomial(alpha), area) <= 1e-12, alpha

    def test_default_sizes(self):
        assert len(make_rules(2).sphere) == 256
        assert len(make_rules(3).sphere) == 64 * 128

    def test_first_inexact_degree_is_detected(self):
        rule = make_sphere_rule(2, 8)
        got = integrate_sphere(_monomial((8, 0)), 1.0, rule)
        assert abs(got - sphere_monomial((8, 0))) > 1e-3

    @pytest.mark.parametrize("bad", [1, 0, -3, 2.5, True, "8"])
    def test_bad_order(self, bad):
        with pytest.raises(ConfigurationError):
            make_sphere_rule(2, bad)

    def test_bad_dimension(self):
        with pytest.raises(ConfigurationError):
            make_sphere_rule(4, 8)
        with pytest.raises(ConfigurationError):
            make_rules(1)


class TestIntegrateSphere:
    def test_radius_half(self):
        assert integrate_sphere(lambda x: np.ones(x.shape[:-1]), 0.5, make_sphere_rule(2, 8)) == pytest.approx(math.pi)

    def test_norm_squared(self):
        got = integrate_sphere(lambda x: np.sum(x * x, -1), 0.5, make_sphere_rule(3, 6))
        assert got == pytest.approx(math.pi / 4, rel=1e-14)

    @pytest.mark.parametrize("n", [2, 3])
    @pytest.mark.parametrize("r", [0.1, 0.77, 1.0])
    def test_odd_symmetry(self, n, r):
        assert abs(integrate_sphere(lambda x: x[..., 0], r, make_sphere_rule(n, 11))) < 1e-15

    def test_complex_integrand(self):
        got = integrate_sphere(lambda x: (x[..., 0] + 1j * x[..., 1]) ** 2 + 1j, 1.0, make_sphere_rule(2, 16))
        assert got == pytest.approx(2j * math.pi, abs=1e-14)

    def test_non_finite_names_node(self):
        rule = make_sphere_rule(2, 4)

        def f(x):
            out = np.ones(x.shape[:-1])
            out[2] = np.nan
            return out

        with pytest.raises(EvaluationError, match="node 2"):
            integrate_sphere(f, 1.0, rule)

    @pytest.mark.parametrize("r", [0.0, -0.1, 1.5, float("nan")])
    def test_bad_radius(self, r):
        with pytest.raises(ConfigurationError):
            integrate_sphere(lambda x: x[..., 0], r, make_sphere_rule(2, 4))

    @settings(max_examples=30, deadline=None)
    @given(r=st.floats(0.01, 1.0), n=st.sampled_from([2, 3]), c=st.floats(-2, 2))
    def test_scaling(self, r, n, c):
        rule = make_sphere_rule(n, 12)

        def f(x):
            return np.exp(c * x[..., 0]) * np.cos(x[..., 1])

        scaled = r ** (n - 1) * integrate_sphere(lambda y: f(r * y), 1.0, rule)
        assert integrate_sphere(f, r, rule) == pytest.approx(scaled, rel=1e-14, abs=1e-300)


class TestBallRule:
    def test_unit_disc(self):
        rule = make_ball_rule(2, 8, 16)
        assert integrate_ball(lambda x: np.ones(x.shape[:-1]), 1.0, rule) == pytest.approx(math.pi, rel=1e-14)

    def test_unit_ball(self):
        rule = make_ball_rule(3, 8, 8)
        assert integrate_ball(lambda x: np.ones(x.shape[:-1]), 1.0, rule) == pytest.approx(4 * math.pi / 3, rel=1e-14)

    def test_disc_moment(self):
        rule = make_ball_rule(2, 8, 16)
        assert integrate_ball(lambda x: np.sum(x * x, -1), 1.0, rule) == pytest.approx(math.pi / 2, rel=1e-14)

    @pytest.mark.parametrize("n,radial,order", [(2, 4, 20), (2, 16, 12), (3, 5, 12), (3, 12, 9)])
    def test_exact_on_declared_basis(self, n, radial, order):
        rule = make_ball_rule(n, radial, order)
        assert rule.exact_degree == min(2 * radial - 1, rule.sphere_rule.exact_degree)
        vol = float(np.sum(rule.weights))
        for alpha in monomials(n, rule.exact_degree):
            got = integrate_ball(_monomial(alpha), 1.0, rule)
            assert _relative(got, ball_monomial(alpha), vol) <= 1e-12, alpha

    def test_radial_exactness_limit(self):
        rule = make_ball_rule(2, 3, 40)
        assert rule.exact_degree == 5
        exact = ball_monomial((6, 0))
        assert abs(integrate_ball(_monomial((6, 0)), 1.0, rule) - exact) > 1e-8 * exact

    @pytest.mark.parametrize("n", [2, 3])
    def test_spectral_convergence(self, n):
        # int_B exp(-|x|^2) = |S| int_0^1 t^{N-1} e^{-t^2} dt
        if n == 2:
            exact = math.pi * (1 - math.exp(-1))
        else:
            exact = 4 * math.pi * (math.sqrt(math.pi) / 4 * math.erf(1) - math.exp(-1) / 2)
        errs = []
        for nodes in (2, 4, 8, 16):
            rule = make_ball_rule(n, nodes, 40)
            errs.append(abs(integrate_ball(lambda x: np.exp(-np.sum(x * x, -1)), 1.0, rule) - exact))
        for a, b in zip(errs, errs[1:]):
            assert b <= 1e-13 or a / b >= 100

    @pytest.mark.parametrize("bad", [0, -1, 2.0, False])
    def test_bad_nodes(self, bad):
        with pytest.raises(ConfigurationError):
            make_ball_rule(2, bad)


class TestRadiiGrid:
    def test_default(self):
        g = RadiiGrid.uniform()
        assert len(g) == 73
        assert g.radii[0] == 0.05 and g.radii[-1] == pytest.approx(0.95, abs=1e-14)
        assert g.spacing == 0.0125

    def test_immutable(self):
        with pytest.raises(ValueError):
            RadiiGrid.uniform().radii[0] = 0.5

    @pytest.mark.parametrize(
        "kwargs", [{"r_max": 1.2}, {"r_min": 0.0}, {"r_min": 0.5, "r_max": 0.4}, {"step": 0.0}, {"step": -1.0}]
    )
    def test_rejects(self, kwargs):
        with pytest.raises(ConfigurationError):
            RadiiGrid.uniform(**kwargs)

    @pytest.mark.parametrize("values", [[], [0.2, 0.1], [0.1, 1.0], [0.0, 0.5], [[0.1, 0.2]]])
    def test_from_values_rejects(self, values):
        with pytest.raises(ConfigurationError):
            RadiiGrid.from_values(values)
