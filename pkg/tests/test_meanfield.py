import math

import numpy as np
import pytest

from liouville_lab.errors import ContractError, ParameterError
from liouville_lab.meanfield import (
    JalphaInput,
    KernelSpec,
    beta_sweep,
    constrained_tilt_profile,
    jalpha_eval,
    kernel_props,
    pohozaev_residual,
    shoot,
    solve_for_beta,
)

FOUR_PI = 4.0 * math.pi


class TestKernels:
    def test_constant_props(self):
        k = KernelSpec.constant(2.0)
        kv, kp, dlk = kernel_props(k, np.array([0.5, 1.0]))
        assert np.all(kv == 2.0)
        assert np.all(kp == 0.0)
        assert np.all(dlk == 0.0)
        assert k.l == 0.0

    def test_poly_asymptotic_exponent(self):
        k = KernelSpec.poly(1.5)
        r = 1e6
        assert float(r * k.k_prime(r) / k.k(r)) == pytest.approx(3.0, rel=1e-6)

    def test_ring_delta_ln_k_nonneg_for_large_l(self):
        k = KernelSpec.ring(1.0)
        r = np.linspace(0.01, 50.0, 200)
        assert np.all(k.delta_ln_k(r) >= 0)

    def test_onsager_delta_ln_k_closed_form_matches_fd(self):
        k = KernelSpec.onsager(12.0 * math.pi, 0.3)
        r = np.array([0.4, 1.0, 2.7])
        h = 1e-5
        lnk = lambda s: np.log(k.k(s))
        fd = (lnk(r + h) - 2 * lnk(r) + lnk(r - h)) / h ** 2 \
            + (lnk(r + h) - lnk(r - h)) / (2 * h * r)
        np.testing.assert_allclose(k.delta_ln_k(r), fd, rtol=1e-5)

    def test_rk_over_k_nondecreasing(self):
        # the (K1)-style monotonicity for compliant kernels
        r = np.linspace(0.05, 30.0, 300)
        for k in (KernelSpec.poly(0.5), KernelSpec.ring(1.2)):
            ratio = r * k.k_prime(r) / k.k(r)
            assert np.all(np.diff(ratio) >= -1e-12)

    def test_invalid_parameters(self):
        with pytest.raises(ParameterError):
            KernelSpec.poly(-1.0)
        with pytest.raises(ParameterError):
            KernelSpec.onsager(-1.0, 0.0)


class TestShooting:
    def test_constant_kernel_recovers_bubble(self):
        # k = 1: exact solution is the bubble, beta = 4
        res = shoot(KernelSpec.constant(), 0.0)
        assert res.beta == pytest.approx(4.0, abs=1e-8)
        assert res.tail_slope == pytest.approx(4.0, rel=1e-2)

    @pytest.mark.parametrize("a0", [-4.0, 4.0])
    def test_beta_scale_invariant_for_constant_kernel(self, a0):
        res = shoot(KernelSpec.constant(), a0)
        assert res.beta == pytest.approx(4.0, abs=1e-6)

    def test_profile_starts_at_a0(self):
        res = shoot(KernelSpec.constant(), 1.5)
        assert float(res.profile.value(0.0)) == pytest.approx(1.5, abs=1e-9)

    def test_pohozaev_identity(self):
        res = shoot(KernelSpec.poly(0.5), 0.0)
        assert res.pohozaev_residual <= 1e-5 * math.pi * res.beta ** 2

    def test_standalone_pohozaev_agrees(self):
        kernel = KernelSpec.constant()
        res = shoot(kernel, 0.0)
        # trapezoid cross-check is cruder than the carried integral
        assert pohozaev_residual(res, kernel) < 1e-2 * math.pi * res.beta ** 2

    def test_short_domain_rejected(self):
        with pytest.raises(ParameterError):
            shoot(KernelSpec.constant(), 0.0, r_max=1.0)


class TestSweep:
    def test_poly_half_interval(self):
        kernel = KernelSpec.poly(0.5)
        report = beta_sweep(kernel, np.linspace(-6, 6, 13), r_max=500.0)
        assert report.all_in_interval
        assert 4.0 < report.beta_min
        assert report.beta_max < 6.0

    def test_parallel_matches_sequential(self):
        kernel = KernelSpec.poly(1.0)
        grid = np.linspace(-2, 2, 5)
        seq = beta_sweep(kernel, grid, r_max=300.0, parallelism=1)
        par = beta_sweep(kernel, grid, r_max=300.0, parallelism=4)
        assert [r.beta for r in seq.rows] == [r.beta for r in par.rows]

    def test_beta_decreases_in_a0(self):
        report = beta_sweep(KernelSpec.poly(0.5), np.linspace(-4, 4, 9),
                            r_max=500.0)
        betas = [r.beta for r in report.rows]
        assert all(b1 > b2 for b1, b2 in zip(betas, betas[1:]))


class TestTargeting:
    def test_hits_prescribed_beta(self):
        res = solve_for_beta(KernelSpec.poly(1.0), 6.0, r_max=800.0)
        assert res.beta == pytest.approx(6.0, abs=1e-5)

    def test_unreachable_target_raises(self):
        # poly(0.5) only reaches beta in (4, 6)
        with pytest.raises(ContractError):
            solve_for_beta(KernelSpec.poly(0.5), 7.5, r_max=300.0)


class TestJalpha:
    def test_constant_profile_gives_zero(self):
        rep = jalpha_eval(JalphaInput(alpha=0.5, g=lambda x: 0.7 + 0.0 * x,
                                      gprime=lambda x: 0.0 * x))
        assert rep.value == pytest.approx(0.0, abs=1e-14)

    def test_tilt_family_satisfies_constraint(self):
        g, shift = constrained_tilt_profile(0.3)
        rep = jalpha_eval(JalphaInput(alpha=0.5, g=g))
        assert abs(rep.constraint_x3) < 1e-10

    def test_functional_nonnegative_on_family(self):
        for eps in (0.05, 0.2, 0.5):
            g, _ = constrained_tilt_profile(eps)
            rep = jalpha_eval(JalphaInput(alpha=0.5, g=g))
            assert rep.value >= -1e-6

    def test_alpha_must_be_positive(self):
        with pytest.raises(ParameterError):
            JalphaInput(alpha=0.0, g=lambda x: x)
