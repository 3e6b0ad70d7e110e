import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from magucp import ConfigurationError, catalog, derive_phi, gauge_transform, mag_gradient, mag_laplacian
from magucp.fields import (
    VectorPotential,
    ball_samples,
    bilinear_gauge,
    constant_field,
    constant_potential,
    flat_field,
    gaussian_field,
    gradient_potential,
    holomorphic_power,
    linear_gauge,
    rotational_potential,
    scale_triple,
    xi_frobenius_max,
    xi_matrix,
    zero_potential,
)
from builders import zero_triple
from conftest import CATALOG, catalog_id
from oracles import fd_gradient, fd_laplacian, random_ball_points

X2 = np.array([[0.3, -0.7], [0.0, 0.0], [1.0, 0.0], [-0.5, 0.5]])


class TestMagGradient:
    def test_constant_field_no_potential(self):
        v = mag_gradient(constant_field(1.0, 2), zero_potential(2), X2)
        assert np.array_equal(v, np.zeros((4, 2)))

    def test_constant_field_constant_potential(self):
        a = [0.7, -1.1, 0.25]
        x = np.array([[0.1, 0.2, 0.3], [-0.4, 0.0, 0.9]])
        v = mag_gradient(constant_field(1.0, 3), constant_potential(a), x)
        assert np.allclose(v, np.broadcast_to(a, (2, 3)), rtol=0, atol=1e-15)

    def test_gaussian_at_unit_point(self):
        v = mag_gradient(gaussian_field(2), zero_potential(2), np.array([1.0, 0.0]))
        assert v[0] == pytest.approx(-2j * math.exp(-1), abs=1e-15)
        assert v[1] == 0

    def test_dimension_mismatch(self):
        with pytest.raises(ConfigurationError):
            mag_gradient(gaussian_field(2), zero_potential(3), X2)

    def test_points_of_wrong_width(self):
        with pytest.raises(ConfigurationError):
            mag_gradient(gaussian_field(3), zero_potential(3), X2)


class TestMagLaplacian:
    @pytest.mark.parametrize("k", [1, 2, 3, 7])
    def test_holomorphic_power_is_harmonic(self, k):
        assert np.max(np.abs(mag_laplacian(holomorphic_power(k), zero_potential(2), X2))) < 1e-13

    def test_gaussian_at_origin(self):
        assert mag_laplacian(gaussian_field(2), zero_potential(2), np.zeros(2)) == pytest.approx(4.0, abs=1e-15)

    def test_constant_field_constant_potential(self):
        a = np.array([0.5, -0.3])
        out = mag_laplacian(constant_field(1.0, 2), constant_potential(a), X2)
        assert np.allclose(out, a @ a, rtol=0, atol=1e-15)


class TestXi:
    def test_zero_potential(self):
        assert np.array_equal(xi_matrix(zero_potential(2), X2), np.zeros((4, 2, 2)))

    def test_pure_gauge_has_no_curl(self):
        xi = xi_matrix(gradient_potential(bilinear_gauge(2)), X2)
        assert np.array_equal(xi, np.zeros((4, 2, 2)))

    def test_rotation(self):
        xi = xi_matrix(rotational_potential(1.0), X2)
        assert np.array_equal(xi, np.broadcast_to([[0.0, 2.0], [-2.0, 0.0]], (4, 2, 2)))

    def test_frobenius_max_examples(self):
        pts = ball_samples(2)
        assert xi_frobenius_max(zero_potential(2), pts) == 0
        assert xi_frobenius_max(rotational_potential(1.0), pts) == pytest.approx(2 * math.sqrt(2), rel=1e-14)

    def test_frobenius_max_shear(self):
        # A = (0, x1^2): xi_12 = 2 x1
        def jac(x):
            out = np.zeros(x.shape + (2,))
            out[..., 0, 1] = 2 * x[..., 0]
            return out

        pot = VectorPotential(2, lambda x: np.stack([0 * x[..., 0], x[..., 0] ** 2], -1), jac)
        pts = ball_samples(2)
        # oracle: the same dense samples scanned directly
        oracle = math.sqrt(2) * 2 * np.max(np.abs(pts[:, 0]))
        got = xi_frobenius_max(pot, pts)
        assert got == pytest.approx(oracle, rel=1e-14)
        assert got == pytest.approx(2 * math.sqrt(2), rel=1e-12)

    def test_empty_samples(self):
        with pytest.raises(ConfigurationError):
            xi_frobenius_max(zero_potential(2), np.empty((0, 2)))

    @pytest.mark.parametrize("entry", CATALOG, ids=catalog_id)
    def test_antisymmetry(self, entry, rng):
        t = catalog(*entry)
        x = random_ball_points(rng, t.dimension, 100)
        xi = xi_matrix(t.potential_a, x)
        assert np.array_equal(xi + np.swapaxes(xi, -1, -2), np.zeros_like(xi))


class TestDerivePhi:
    def test_gaussian(self, rng):
        phi = derive_phi(gaussian_field(2), zero_potential(2))
        x = random_ball_points(rng, 2, 200)
        vals = phi.value(x)
        assert np.allclose(vals, 4 - 4 * np.sum(x * x, -1), rtol=0, atol=1e-13)
        assert np.max(np.abs(vals.imag)) < 1e-13
        assert phi.sup_norm == pytest.approx(4.0)

    def test_constant(self):
        a = np.array([1.5, -2.0])
        phi = derive_phi(constant_field(1.0, 2), constant_potential(a))
        assert np.allclose(phi.value(X2), a @ a, rtol=0, atol=1e-14)

    def test_rotational_gaussian(self, rng):
        phi = derive_phi(gaussian_field(2), rotational_potential(1.0))
        x = random_ball_points(rng, 2, 200)
        assert np.allclose(phi.value(x), 4 - 3 * np.sum(x * x, -1), rtol=0, atol=1e-13)

    def test_rejects_zeros(self):
        with pytest.raises(ConfigurationError, match="floor"):
            derive_phi(holomorphic_power(2), zero_potential(2))

    def test_rejects_flat(self):
        with pytest.raises(ConfigurationError):
            derive_phi(flat_field(2), zero_potential(2))


class TestCatalog:
    def test_harmonic_linear(self):
        t = catalog("harmonic2d", k=1)
        x = X2
        assert np.allclose(t.omega.value(x), x[:, 0] + 1j * x[:, 1])
        assert np.array_equal(t.potential_a.value(x), np.zeros_like(x))
        assert np.array_equal(t.potential_phi.value(x), np.zeros(4))

    def test_gaussian_phi_at_origin(self):
        assert catalog("gaussian", N=2).potential_phi.value(np.zeros((1, 2)))[0] == 4

    def test_rotational_phi(self, rng):
        t = catalog("rotational_gauss", b=1)
        x = random_ball_points(rng, 2, 50)
        assert np.allclose(t.potential_phi.value(x), 4 - 3 * np.sum(x * x, -1), atol=1e-13)
        assert t.potential_phi.sup_norm == pytest.approx(4.0, rel=1e-12)
        assert t.xi_frobenius_bound == pytest.approx(2 * math.sqrt(2), rel=1e-14)

    @pytest.mark.parametrize(
        "name,params",
        [
            ("nope", {}),
            ("harmonic2d", {"k": 0}),
            ("harmonic2d", {"k": 1.5}),
            ("harmonic2d", {"k": 2, "N": 3}),
            ("gaussian", {"N": 4}),
            ("constant_field", {}),
            ("constant_field", {"a": [1, 2, 3, 4]}),
            ("constant_field", {"a": "x"}),
            ("rotational_gauss", {"b": "big"}),
        ],
    )
    def test_rejects(self, name, params):
        with pytest.raises(ConfigurationError):
            catalog(name, params)

    def test_cached(self):
        assert catalog("gaussian", {"N": 3}) is catalog("gaussian", N=3)


@pytest.mark.parametrize("entry", CATALOG, ids=catalog_id)
def test_manufactured_residual(entry, rng):
    t = catalog(*entry)
    x = random_ball_points(rng, t.dimension, 1000)
    bound = 1e-10 * (1 + np.abs(t.potential_phi.value(x) * t.omega.value(x)))
    assert np.all(t.residual(x) <= bound)


@pytest.mark.parametrize("entry", CATALOG, ids=catalog_id)
def test_analytic_derivatives_match_differences(entry, rng):
    t = catalog(*entry)
    x = random_ball_points(rng, t.dimension, 200)
    w = t.omega
    assert np.max(np.abs(w.gradient(x) - fd_gradient(w.value, x))) <= 1e-6
    assert np.max(np.abs(w.laplacian(x) - fd_laplacian(w.value, x))) <= 1e-6
    jac = t.potential_a.jacobian(x)
    # the oracle stacks d/dx_i last, the library stores d_i a_j as [i, j]
    fd_jac = np.swapaxes(fd_gradient(t.potential_a.value, x), -1, -2)
    assert np.max(np.abs(jac - fd_jac)) <= 1e-6
    assert np.allclose(t.potential_a.divergence(x), np.trace(jac, axis1=-2, axis2=-1), atol=1e-14)


@pytest.mark.parametrize("n", [2, 3])
def test_flat_field_derivatives(n, rng):
    w = flat_field(n)
    x = random_ball_points(rng, n, 200)
    x = x[np.sum(x * x, -1) > 0.04]
    assert np.max(np.abs(w.gradient(x) - fd_gradient(w.value, x))) <= 1e-6
    assert np.max(np.abs(w.laplacian(x) - fd_laplacian(w.value, x))) <= 1e-6
    assert w.value(np.zeros((1, n)))[0] == 0


class TestGauge:
    def test_identity_gauge(self, rng):
        t = catalog("rotational_gauss", b=1.0)
        g = gauge_transform(t, linear_gauge([0.0, 0.0]))
        x = random_ball_points(rng, 2, 50)
        assert np.array_equal(g.omega.value(x), t.omega.value(x))
        assert np.array_equal(mag_gradient(g.omega, g.potential_a, x), mag_gradient(t.omega, t.potential_a, x))

    @pytest.mark.parametrize("entry", CATALOG, ids=catalog_id)
    def test_covariance_bilinear(self, entry, rng):
        t = catalog(*entry)
        chi = bilinear_gauge(t.dimension)
        self._check_covariance(t, chi, random_ball_points(rng, t.dimension, 200))

    def _check_covariance(self, t, chi, x):
        g = gauge_transform(t, chi)
        before = mag_gradient(t.omega, t.potential_a, x)
        after = mag_gradient(g.omega, g.potential_a, x)
        expected = np.exp(1j * chi.value(x))[:, None] * before
        scale = 1 + np.abs(before)
        assert np.all(np.abs(after - expected) <= 1e-10 * scale)
        assert np.max(g.residual(x) / (1 + np.abs(g.potential_phi.value(x) * g.omega.value(x)))) <= 1e-10

    @settings(max_examples=25, deadline=None)
    @given(
        c=st.lists(st.floats(-3, 3), min_size=3, max_size=3),
        seed=st.integers(0, 2**32 - 1),
        which=st.sampled_from([e for e in CATALOG]),
    )
    def test_covariance_linear(self, c, seed, which):
        t = catalog(*which)
        rng = np.random.default_rng(seed)
        self._check_covariance(t, linear_gauge(c[: t.dimension]), random_ball_points(rng, t.dimension, 50))

    def test_gauge_dimension_mismatch(self):
        with pytest.raises(ConfigurationError):
            gauge_transform(catalog("gaussian", N=2), bilinear_gauge(3))

    def test_bilinear_needs_distinct_indices(self):
        with pytest.raises(ConfigurationError):
            bilinear_gauge(2, 1, 1)


def test_scaled_triple_is_still_a_solution(rng):
    t = scale_triple(catalog("harmonic2d", k=3), 2.5 - 1j)
    x = random_ball_points(rng, 2, 100)
    assert np.max(t.residual(x)) < 1e-12


def test_zero_triple_residual():
    assert np.array_equal(zero_triple(3).residual(np.zeros((2, 3))), np.zeros(2))


def test_ball_samples_cover_the_ball():
    for n, minimum in ((2, 10**6), (3, 10**6)):
        pts = ball_samples(n)
        r = np.sqrt(np.sum(pts * pts, -1))
        assert len(pts) >= minimum
        assert np.max(r) == pytest.approx(1.0, abs=1e-14)
        assert np.all(r <= 1 + 1e-14)
