import math

import numpy as np
import pytest

from liouville_lab.errors import ContractError, DomainError, ParameterError
from liouville_lab.quadrature import cumulative_panels, gauss_legendre, integrate
from liouville_lab.radial import (
    EIGHT_PI,
    LiouvilleBubble,
    RadialGrid,
    RadialProfile,
    boundary_weight,
    bubble_mass,
    bubble_value,
    cumulative_mass,
    gauss_bonnet_check,
    geometric_grid,
    half_scaled_bubble_value,
    profile_mass,
    uniform_grid,
)


class TestQuadrature:
    def test_polynomial_exact(self):
        # degree-13 polynomial is exact for the 7-point rule
        val = gauss_legendre(lambda x: x ** 12, 0.0, 1.0, npoints=7)
        assert val == pytest.approx(1.0 / 13.0, rel=1e-14)

    def test_adaptive_matches_analytic(self):
        val = integrate(lambda x: np.exp(-x) * np.sin(x), 0.0, 10.0)
        exact = 0.5 * (1.0 - math.exp(-10.0) * (math.sin(10.0) + math.cos(10.0)))
        assert val == pytest.approx(exact, rel=1e-12)

    def test_cumulative_panels_monotone(self):
        radii = np.linspace(0.0, 3.0, 40)
        acc = cumulative_panels(lambda s: np.exp(-s) * s, radii)
        assert acc[0] == 0.0
        assert np.all(np.diff(acc) > 0)
        assert acc[-1] == pytest.approx(integrate(lambda s: np.exp(-s) * s, 0, 3),
                                        rel=1e-10)


class TestGrids:
    def test_uniform_grid_endpoints(self):
        g = uniform_grid(2.0, 64)
        assert g.nodes[0] == 0.0
        assert g.r_max == pytest.approx(2.0)

    def test_grid_rejects_nonzero_start(self):
        with pytest.raises(ContractError):
            RadialGrid(np.linspace(0.1, 1.0, 32))

    def test_grid_rejects_tiny(self):
        with pytest.raises(ContractError):
            RadialGrid(np.linspace(0.0, 1.0, 8))

    def test_geometric_grid_refines_origin(self):
        g = geometric_grid(10.0, 128)
        steps = np.diff(g.nodes)
        assert steps[0] < steps[-1]


class TestBubble:
    def test_rejects_nonpositive_scale(self):
        with pytest.raises(ParameterError):
            LiouvilleBubble(0.0)

    @pytest.mark.parametrize("lam", [0.25, 1.0, 3.7])
    def test_solves_liouville_equation(self, lam):
        # u'' + u'/r + e^u = 0 with the closed-form derivative
        b = LiouvilleBubble(lam)
        r = np.linspace(0.05, 5.0, 50)
        h = 1e-5
        upp = (b.derivative(r + h) - b.derivative(r - h)) / (2 * h)
        residual = upp + b.derivative(r) / r + np.exp(b.value(r))
        assert np.max(np.abs(residual)) < 1e-6

    def test_total_mass_is_eight_pi(self):
        b = LiouvilleBubble(2.0)
        assert float(b.mass(1e9)) == pytest.approx(EIGHT_PI, rel=1e-12)

    def test_mass_monotone_in_radius(self):
        b = LiouvilleBubble(0.7)
        r = np.linspace(0.0, 20.0, 200)
        assert np.all(np.diff(b.mass(r)) > 0)

    def test_half_normalization_shift(self):
        # 2 V = U - ln 2 pointwise
        r = np.linspace(0.0, 4.0, 17)
        lhs = 2.0 * half_scaled_bubble_value(1.5, r)
        rhs = bubble_value(1.5, r) - math.log(2.0)
        np.testing.assert_allclose(lhs, rhs, atol=1e-14)

    def test_quadrature_mass_agrees_with_closed_form(self):
        grid = geometric_grid(3.0, 256)
        p = LiouvilleBubble(1.3).as_profile(grid)
        assert profile_mass(p, 3.0) == pytest.approx(bubble_mass(1.3, 3.0),
                                                     rel=1e-9)


class TestRadialProfile:
    def setup_method(self):
        self.grid = uniform_grid(2.0, 201)
        self.p = RadialProfile.from_callable(
            lambda r: np.exp(-np.asarray(r) ** 2), self.grid,
            df=lambda r: -2.0 * np.asarray(r) * np.exp(-np.asarray(r) ** 2))

    def test_value_roundtrip(self):
        assert float(self.p.value(1.3)) == pytest.approx(math.exp(-1.69), rel=1e-12)

    def test_synthesized_derivative_accuracy(self):
        q = RadialProfile.from_samples(self.grid,
                                       np.exp(-self.grid.nodes ** 2))
        r = np.linspace(0.1, 1.9, 25)
        d_true = -2.0 * r * np.exp(-r ** 2)
        np.testing.assert_allclose(q.derivative(r), d_true, atol=5e-7)

    def test_laplacian_at_origin(self):
        # Delta e^(-r^2) = (4 r^2 - 4) e^(-r^2); at r = 0 that is -4
        assert self.p.laplacian(0.0) == pytest.approx(-4.0, abs=1e-5)

    def test_laplacian_interior(self):
        r = 0.8
        exact = (4 * r * r - 4) * math.exp(-r * r)
        assert self.p.laplacian(r) == pytest.approx(exact, rel=1e-6)

    def test_mass_outside_domain_raises(self):
        with pytest.raises(DomainError):
            profile_mass(self.p, 5.0)

    def test_strictly_decreasing_flag(self):
        assert self.p.strictly_decreasing
        rising = RadialProfile.from_samples(self.grid, self.grid.nodes ** 2)
        assert not rising.strictly_decreasing


class TestMassAndBoundary:
    def test_boundary_weight_at_origin(self):
        p = LiouvilleBubble(1.0).as_profile(uniform_grid(1.0, 33))
        assert boundary_weight(p, 0.0) == 0.0

    def test_boundary_weight_is_kappa_circumference(self):
        # e^(U(R)/2) = lam/(1 + lam^2 R^2/8)
        lam, R = 2.0, 1.5
        p = LiouvilleBubble(lam).as_profile(uniform_grid(R, 33))
        kappa = lam / (1.0 + lam * lam * R * R / 8.0)
        assert boundary_weight(p, R) == pytest.approx(2 * math.pi * R * kappa,
                                                      rel=1e-12)

    def test_cumulative_mass_endpoints(self):
        grid = uniform_grid(2.0, 101)
        p = LiouvilleBubble(1.0).as_profile(grid)
        acc = cumulative_mass(p, np.array([0.0, 1.0, 2.0]))
        assert acc[0] == 0.0
        assert acc[2] == pytest.approx(bubble_mass(1.0, 2.0), rel=1e-9)

    def test_gauss_bonnet_on_bubble(self):
        grid = uniform_grid(1.0, 129)
        p = LiouvilleBubble(1.0).as_profile(grid)
        rep = gauss_bonnet_check(p, 1.0)
        assert abs(rep.defect) < 1e-10

    def test_gauss_bonnet_needs_derivatives(self):
        grid = uniform_grid(1.0, 33)
        p = RadialProfile(grid=grid, values=np.zeros(33))
        with pytest.raises(ContractError):
            gauss_bonnet_check(p, 1.0)
