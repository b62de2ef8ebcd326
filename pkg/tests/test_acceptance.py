"""Acceptance gate: twelve numbered criteria, one printed pass/fail
line each.  Tolerances are pinned; loosening them is not an option.
"""

import math

import numpy as np
import pytest
from scipy.optimize import brentq

from liouville_lab.bol import bol_deficit, first_eigenvalue
from liouville_lab.meanfield import (
    JalphaInput,
    KernelSpec,
    beta_sweep,
    constrained_tilt_profile,
    jalpha_eval,
    shoot,
    solve_for_beta,
)
from liouville_lab.radial import (
    EIGHT_PI,
    LiouvilleBubble,
    RadialProfile,
    bubble_mass,
    geometric_grid,
    uniform_grid,
)
from liouville_lab.rearrange import gradient_comparison, rearrange_radial
from liouville_lab.sci import (
    LOWER,
    UPPER,
    cap_heights,
    dichotomy_check,
    make_pair,
    pair_beta,
    pair_total_mass,
    quadratic_mass_roots,
    sci_verify_radial,
)
from liouville_lab.transforms import onsager_transform

FOUR_PI = 4.0 * math.pi


@pytest.fixture
def announce(capsys, request):
    """Print one live pass/fail line per criterion, past the capture."""
    outcome = {"ok": False, "label": ""}

    def set_result(label, ok):
        outcome["label"] = label
        outcome["ok"] = ok

    yield set_result
    status = "PASS" if outcome["ok"] else "FAIL"
    with capsys.disabled():
        print(f"[{status}] {outcome['label']}")


def random_pairs(n, seed):
    rng = np.random.default_rng(seed)
    pairs = []
    while len(pairs) < n:
        lam1 = float(np.exp(rng.uniform(np.log(0.1), np.log(10.0))))
        R = float(rng.uniform(0.5, 2.0))
        if abs(lam1 - math.sqrt(8.0) / R) < 1e-6:
            continue
        pairs.append(make_pair(lam1, R))
    return pairs


def test_criterion_01_bol_equality_on_bubbles(announce):
    lams = np.linspace(0.25, 8.0, 10)
    radii = np.linspace(0.1, 4.0, 10)
    worst_closed = worst_quad = 0.0
    for lam in lams:
        p = LiouvilleBubble(float(lam)).as_profile(geometric_grid(4.0, 256))
        for r in radii:
            worst_closed = max(worst_closed,
                               abs(bol_deficit(p, float(r), "closed_form")))
            worst_quad = max(worst_quad,
                             abs(bol_deficit(p, float(r), "quadrature")))
    ok = worst_closed <= 1e-9 and worst_quad <= 1e-6
    announce(f"criterion 1: Bol deficit vanishes on bubbles "
             f"(closed {worst_closed:.2e}, quad {worst_quad:.2e})", ok)
    assert worst_closed <= 1e-9
    assert worst_quad <= 1e-6


def test_criterion_02_pair_mass_eight_pi(announce):
    pairs = random_pairs(100, seed=20)
    worst = max(abs(pair_total_mass(p) - EIGHT_PI) for p in pairs)
    worst_quad = max(abs(pair_total_mass(p, "quadrature") - EIGHT_PI)
                     for p in pairs[:20])
    ok = worst <= 1e-12 and worst_quad <= 1e-6
    announce(f"criterion 2: pair mass = 8*pi "
             f"(closed {worst:.2e}, quad {worst_quad:.2e})", ok)
    assert worst <= 1e-12
    assert worst_quad <= 1e-6


def test_criterion_03_cap_complementarity(announce):
    pairs = random_pairs(100, seed=20)
    worst = max(abs(abs(z1) - z2) for z1, z2 in map(cap_heights, pairs))
    ok = worst <= 1e-12
    announce(f"criterion 3: |z1| = z2 on pairs (worst {worst:.2e})", ok)
    assert worst <= 1e-12


def test_criterion_04_dichotomy_branches(announce):
    pairs = random_pairs(50, seed=4)
    worst_mass = worst_root = 0.0
    branches_ok = True
    for pair in pairs:
        grid = uniform_grid(pair.R, 257)
        for lam, want in ((pair.lambda1, LOWER), (pair.lambda2, UPPER)):
            psi = LiouvilleBubble(lam).as_profile(grid)
            rep = dichotomy_check(psi, pair)
            branches_ok &= rep.verdict == want
            target = rep.m1 if want == LOWER else rep.m2
            worst_mass = max(worst_mass, abs(rep.m - target))
        m1, m2 = quadratic_mass_roots(pair_beta(pair))
        worst_root = max(worst_root,
                         abs(m1 - bubble_mass(pair.lambda1, pair.R)),
                         abs(m2 - bubble_mass(pair.lambda2, pair.R)))
    ok = branches_ok and worst_mass <= 1e-8 and worst_root <= 1e-10
    announce(f"criterion 4: dichotomy branches on 50 pairs "
             f"(mass {worst_mass:.2e}, roots {worst_root:.2e})", ok)
    assert branches_ok
    assert worst_mass <= 1e-8
    assert worst_root <= 1e-10


def _zero_profile(grid):
    z = lambda r: 0.0 * np.asarray(r, dtype=float)
    return RadialProfile.from_callable(z, grid, df=z)


def test_criterion_05_sci_pipeline(announce):
    # equality case: the matched pair itself with f = 0
    pair = make_pair(1.0, 1.0)
    grid = uniform_grid(1.0, 257)
    w1 = LiouvilleBubble(pair.lambda1).as_profile(grid)
    w2 = LiouvilleBubble(pair.lambda2).as_profile(grid)
    zero = _zero_profile(grid)
    eq = sci_verify_radial(w1, w2, zero, zero, 1.0)
    eq_ok = abs(eq.slack) <= 1e-6

    # strict case: lift the steep bubble by c > 0, matching radius moves
    rng = np.random.default_rng(5)
    strict_ok = True
    min_slack = math.inf
    for _ in range(20):
        lam1 = float(rng.uniform(0.4, 2.0))
        lam2 = float(rng.uniform(3.0, 9.0))
        c = float(rng.uniform(0.02, 0.4))
        b1, b2 = LiouvilleBubble(lam1), LiouvilleBubble(lam2)
        R = brentq(lambda s: float(b2.value(s)) + c - float(b1.value(s)),
                   1e-9, 1e6)
        g = uniform_grid(R, 257)
        sw1 = b1.as_profile(g)
        sw2 = RadialProfile.from_callable(
            lambda r: b2.value(r) + c, g, df=b2.derivative,
            mass_fn=lambda r: math.exp(c) * b2.mass(r))
        f2 = RadialProfile.from_callable(
            lambda r: (math.exp(c) - 1.0) * np.exp(b2.value(r)), g)
        rep = sci_verify_radial(sw1, sw2, _zero_profile(g), f2, R)
        strict_ok &= rep.slack > 0
        min_slack = min(min_slack, rep.slack)
    ok = eq_ok and strict_ok
    announce(f"criterion 5: covering pipeline (equality slack "
             f"{eq.slack:.2e}, min strict slack {min_slack:.3f})", ok)
    assert eq_ok
    assert strict_ok


def test_criterion_06_eigenvalue_mass_criterion(announce):
    lam = 1.0
    b = LiouvilleBubble(lam)

    def truncation_radius(mass):
        return math.sqrt(8.0 * mass / (lam * lam * (EIGHT_PI - mass)))

    R0 = truncation_radius(FOUR_PI)
    w = b.as_profile(geometric_grid(R0, 600))
    at_half = first_eigenvalue(w, R0, nodes=512).lambda1w

    R_low = truncation_radius(FOUR_PI - 0.2)
    pos = first_eigenvalue(b.as_profile(geometric_grid(R_low, 600)),
                           R_low, nodes=512).lambda1w
    R_high = truncation_radius(FOUR_PI + 0.2)
    neg = first_eigenvalue(b.as_profile(geometric_grid(R_high, 600)),
                           R_high, nodes=512).lambda1w

    ok = abs(at_half) <= 2e-3 and pos > 0 and neg < 0
    announce(f"criterion 6: eigenvalue zero at mass 4*pi "
             f"({at_half:.2e}; flips {pos:+.4f}/{neg:+.4f})", ok)
    assert abs(at_half) <= 2e-3
    assert pos > 0
    assert neg < 0


def test_criterion_07_shooting_exactness(announce):
    kernel = KernelSpec.constant()
    worst_beta = worst_poh = 0.0
    for a0 in (-4.0, 0.0, 4.0):
        res = shoot(kernel, a0)
        worst_beta = max(worst_beta, abs(res.beta - 4.0))
        worst_poh = max(worst_poh,
                        res.pohozaev_residual / (math.pi * res.beta ** 2))
    ok = worst_beta <= 1e-6 and worst_poh <= 1e-6
    announce(f"criterion 7: constant kernel beta = 4 "
             f"(beta err {worst_beta:.2e}, Pohozaev {worst_poh:.2e})", ok)
    assert worst_beta <= 1e-6
    assert worst_poh <= 1e-6


def test_criterion_08_range_sweep(announce):
    kernel = KernelSpec.poly(0.5)
    report = beta_sweep(kernel, np.linspace(-8.0, 8.0, 65), r_max=1000.0)
    in_interval = all(4.0 < row.beta < 6.0 for row in report.rows)
    ok = (in_interval and len(report.rows) == 65
          and report.beta_max >= 5.9 and report.beta_min <= 4.1)
    announce(f"criterion 8: 65-point sweep beta in (4, 6) "
             f"(range [{report.beta_min:.4f}, {report.beta_max:.4f}])", ok)
    assert len(report.rows) == 65
    assert in_interval
    assert report.beta_max >= 5.9
    assert report.beta_min <= 4.1


def test_criterion_09_singular_mean_field(announce):
    kernel = KernelSpec.poly(1.0)   # k = 1 + r^2
    worst = 0.0
    poh_ok = True
    for alpha in (-0.5, 0.0, 0.5):
        target = 2.0 * (alpha + 3.0)
        res = solve_for_beta(kernel, target, beta_tol=1e-4)
        worst = max(worst, abs(res.beta - target))
        poh_ok &= res.pohozaev_residual <= 1e-5 * math.pi * res.beta ** 2
    ok = worst <= 1e-4 and poh_ok
    announce(f"criterion 9: beta = 2(alpha+3) targeting "
             f"(worst {worst:.2e})", ok)
    assert worst <= 1e-4
    assert poh_ok


def test_criterion_10_onsager_boundary(announce):
    r = np.concatenate(([0.0], np.geomspace(1e-3, 100.0, 3000)))
    sign_ok = True
    for alpha in (8.0 * math.pi, 12.0 * math.pi, 16.0 * math.pi):
        gamma_c = alpha / (8.0 * math.pi) - 1.0
        below = max(gamma_c - 1e-6, 0.0)
        min_below = float(np.min(KernelSpec.onsager(alpha, below).delta_ln_k(r)))
        min_above = float(np.min(
            KernelSpec.onsager(alpha, gamma_c + 1e-6).delta_ln_k(r)))
        sign_ok &= min_below >= -1e-15 and min_above < 0.0

    grid = geometric_grid(200.0, 512)
    z = lambda s: 0.0 * np.asarray(s, dtype=float)
    flat = RadialProfile.from_callable(z, grid, df=z)
    _, _, rep = onsager_transform(flat, 8.0 * math.pi, 0.0)
    resid_ok = rep.residual_sup <= 1e-8
    ok = sign_ok and resid_ok
    announce(f"criterion 10: Onsager sign boundary at alpha/8pi - 1 "
             f"(trivial residual {rep.residual_sup:.2e})", ok)
    assert sign_ok
    assert resid_ok


def test_criterion_11_rearrangement(announce):
    # identity case: rearranging against the weight's own measure
    lam = 2.0
    grid = uniform_grid(1.0, 201)
    w = LiouvilleBubble(lam).as_profile(grid)
    phi_id = RadialProfile.from_callable(
        lambda r: LiouvilleBubble(5.0).value(r) - LiouvilleBubble(lam).value(r),
        grid,
        df=lambda r: LiouvilleBubble(5.0).derivative(r)
        - LiouvilleBubble(lam).derivative(r))
    star_id = rearrange_radial(phi_id, w, lam, min_levels=1024)
    r_test = np.linspace(0.0, min(1.0, star_id.profile.r_max), 40)
    identity_err = float(np.max(np.abs(
        np.asarray(star_id.profile.value(r_test), dtype=float)
        - np.asarray(phi_id.value(r_test), dtype=float))))

    rng = np.random.default_rng(11)
    worst_resid = 0.0
    worst_grad = 0.0
    for _ in range(20):
        a = float(rng.uniform(0.3, 2.0))
        bq = float(rng.uniform(0.05, 0.8))
        lam_w = float(rng.uniform(0.5, 4.0))
        lam_t = float(rng.uniform(0.5, 4.0))
        wt = LiouvilleBubble(lam_w).as_profile(grid)
        phi = RadialProfile.from_callable(
            lambda r: a * np.cos(np.asarray(r, dtype=float))
            - bq * np.asarray(r, dtype=float) ** 2, grid,
            df=lambda r: -a * np.sin(np.asarray(r, dtype=float))
            - 2.0 * bq * np.asarray(r, dtype=float))
        star = rearrange_radial(phi, wt, lam_t)
        worst_resid = max(worst_resid, star.equimeasurability_residual)
        comp = gradient_comparison(phi, wt, star)
        worst_grad = min(worst_grad, float(np.min(comp.difference)))
    ok = identity_err <= 1e-6 and worst_resid <= 1e-8 and worst_grad >= -1e-8
    announce(f"criterion 11: rearrangement (identity {identity_err:.2e}, "
             f"residual {worst_resid:.2e}, min grad diff {worst_grad:.2e})",
             ok)
    assert identity_err <= 1e-6
    assert worst_resid <= 1e-8
    assert worst_grad >= -1e-8


def test_criterion_12_functional_sanity(announce):
    const = jalpha_eval(JalphaInput(alpha=0.5, g=lambda x: 1.3 + 0.0 * x,
                                    gprime=lambda x: 0.0 * x))
    const_ok = abs(const.value) <= 1e-13

    min_val = math.inf
    for eps in np.linspace(0.02, 0.6, 12):
        g, _ = constrained_tilt_profile(float(eps))
        rep = jalpha_eval(JalphaInput(alpha=0.5, g=g))
        min_val = min(min_val, rep.value)
    ok = const_ok and min_val >= -1e-6
    announce(f"criterion 12: functional sanity (constant {const.value:.2e}, "
             f"family min {min_val:.2e})", ok)
    assert const_ok
    assert min_val >= -1e-6
