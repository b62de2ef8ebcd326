"""Boundary-matched bubble pairs, the mass dichotomy, and the full
sphere-covering verification pipeline.

A pair of bubbles U_{lam1}, U_{lam2} with lam1 lam2 = 8/R^2 agrees on
the circle of radius R and splits the sphere's total mass exactly:
the two masses on B_R sum to 8 pi.  The dichotomy says a decreasing
supersolution matching that boundary data has mass below the smaller
bubble mass or above the larger one, the two roots of
x^2 - 8 pi x + 2 beta = 0 with beta the squared boundary weight.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (ComplexRootError, ContractError, DegeneratePairError,
                     HypothesisError, ParameterError)
from .radial import (EIGHT_PI, LiouvilleBubble, RadialProfile, bubble_mass,
                     bubble_value, boundary_weight, profile_mass, uniform_grid)
from .bol import radial_hypothesis_check
from .rearrange import rearrange_radial

FOUR_PI = 4.0 * math.pi

LOWER = "LOWER"
UPPER = "UPPER"
VIOLATION = "VIOLATION"


# ---------------------------------------------------------------------------
# pairs
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BubblePair:
    lambda1: float
    lambda2: float
    R: float
    kappa: float

    def __post_init__(self):
        l1, l2, R, k = self.lambda1, self.lambda2, self.R, self.kappa
        if abs(l1 * l2 - 8.0 / R ** 2) > 1e-12 * (8.0 / R ** 2):
            raise ContractError("pair violates lambda1 lambda2 = 8/R^2")
        if abs(l1 + l2 - 8.0 / (k * R ** 2)) > 1e-12 * (l1 + l2):
            raise ContractError("pair violates lambda1 + lambda2 = 8/(kappa R^2)")
        if abs(bubble_value(l1, R) - bubble_value(l2, R)) > 1e-12:
            raise ContractError("bubbles do not match on the boundary circle")


def make_pair(lambda1, R, degenerate_tol=1e-12) -> BubblePair:
    """Boundary-matched pair from one bubble parameter and the
    matching radius; labels are ordered so lambda1 < lambda2."""
    lambda1, R = float(lambda1), float(R)
    if lambda1 <= 0 or R <= 0:
        raise ParameterError("lambda1 and R must be positive")
    crit = math.sqrt(8.0) / R
    if abs(lambda1 - crit) <= degenerate_tol * crit:
        raise DegeneratePairError(
            "lambda1 = sqrt(8)/R gives a double root (both caps hemispheres)")
    lambda2 = 8.0 / (lambda1 * R ** 2)
    if lambda1 > lambda2:
        lambda1, lambda2 = lambda2, lambda1
    kappa = lambda1 / (1.0 + lambda1 ** 2 * R ** 2 / 8.0)
    return BubblePair(lambda1=lambda1, lambda2=lambda2, R=R, kappa=kappa)


def pair_total_mass(pair: BubblePair, method="closed_form", rtol=1e-10):
    """Sum of the two bubble masses on B_R; equal to 8 pi."""
    if method == "closed_form":
        return bubble_mass(pair.lambda1, pair.R) + bubble_mass(pair.lambda2, pair.R)
    if method == "quadrature":
        grid = uniform_grid(pair.R, 257)
        total = 0.0
        for lam in (pair.lambda1, pair.lambda2):
            prof = LiouvilleBubble(lam).as_profile(grid)
            prof = RadialProfile(grid=prof.grid, values=prof.values,
                                 derivatives=prof.derivatives,
                                 func=prof.func, dfunc=prof.dfunc)
            total += profile_mass(prof, pair.R, rtol=rtol)
        return total
    raise ParameterError(f"unknown method {method!r}")


def cap_heights(pair: BubblePair):
    """Heights z_i = 1 - 2 kappa/lambda_i of the two spherical caps the
    pair covers; antisymmetric about the equator."""
    z1 = 1.0 - 2.0 * pair.kappa / pair.lambda1
    z2 = 1.0 - 2.0 * pair.kappa / pair.lambda2
    return z1, z2


def pair_beta(pair: BubblePair):
    """Squared boundary weight of either bubble at the matching
    radius: (2 pi R kappa)^2, since e^(U(R)/2) = kappa."""
    return (2.0 * math.pi * pair.R * pair.kappa) ** 2


def quadratic_mass_roots(beta):
    """Roots 4 pi -+ sqrt(16 pi^2 - 2 beta) of x^2 - 8 pi x + 2 beta = 0."""
    beta = float(beta)
    if beta < 0:
        raise ParameterError("beta must be nonnegative")
    disc = 16.0 * math.pi ** 2 - 2.0 * beta
    if disc < -1e-9:
        raise ComplexRootError(f"beta = {beta} exceeds 8 pi^2; roots are complex")
    root = math.sqrt(max(disc, 0.0))
    return FOUR_PI - root, FOUR_PI + root


# ---------------------------------------------------------------------------
# dichotomy
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DichotomyReport:
    m: float
    m1: float
    m2: float
    beta_b: float
    verdict: str
    hypothesis_ok: bool
    diagnostics: dict = field(default_factory=dict)


def dichotomy_check(psi: RadialProfile, pair: BubblePair,
                    boundary_tol=1e-6, mass_tol=1e-8) -> DichotomyReport:
    """Place the mass of e^psi on B_R relative to the two bubble
    masses.

    psi must match the pair's common boundary value at R.  Failures of
    the supersolution hypothesis are recorded in the verdict
    (VIOLATION), never raised: near-equality cases stay reportable.
    """
    R = pair.R
    psi_b = float(psi.value(R))
    match_b = bubble_value(pair.lambda1, R)
    if abs(psi_b - match_b) > boundary_tol:
        raise ContractError(
            f"psi({R}) = {psi_b:.9f} does not match the pair boundary "
            f"value {match_b:.9f}")

    try:
        hyp = radial_hypothesis_check(psi)
        hyp_ok = hyp.all_ok
        hyp_diag = {"max_slack": float(np.max(hyp.slack)),
                    "total_mass": hyp.total_mass}
    except HypothesisError as exc:
        hyp_ok = False
        hyp_diag = {"failure": str(exc)}

    m = profile_mass(psi, R)
    m1 = bubble_mass(pair.lambda1, R)
    m2 = bubble_mass(pair.lambda2, R)
    beta_b = boundary_weight(psi, R) ** 2

    if m <= m1 + mass_tol:
        verdict = LOWER
    elif m >= m2 - mass_tol:
        verdict = UPPER
    else:
        verdict = VIOLATION
    if not hyp_ok and verdict == VIOLATION:
        hyp_diag["note"] = "hypothesis failure explains the gap placement"

    return DichotomyReport(m=float(m), m1=float(m1), m2=float(m2),
                           beta_b=float(beta_b), verdict=verdict,
                           hypothesis_ok=hyp_ok, diagnostics=hyp_diag)


# ---------------------------------------------------------------------------
# normalization conversion
# ---------------------------------------------------------------------------

def convert_mass(mass, to="4pi"):
    """Convert between the e^w normalization (bound 8 pi) and the
    half-conformal-factor normalization w = 2v (bound 4 pi): the
    substitution u = 2v - ln 2 halves every mass."""
    if to == "4pi":
        return mass / 2.0
    if to == "8pi":
        return mass * 2.0
    raise ParameterError("normalization must be '4pi' or '8pi'")


# ---------------------------------------------------------------------------
# full pipeline
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SciReport:
    total_mass: float
    bound: float
    slack: float
    lambda1: float
    dichotomy: DichotomyReport | None
    diagnostics: dict = field(default_factory=dict)


def _pde_residual(w: RadialProfile, f: RadialProfile, radii):
    worst = 0.0
    for r in radii:
        r = float(r)
        res = w.laplacian(r) + math.exp(float(w.value(r))) - float(f.value(r))
        worst = max(worst, abs(res))
    return worst


def sci_verify_radial(w1: RadialProfile, w2: RadialProfile,
                      f1: RadialProfile, f2: RadialProfile, R,
                      pde_tol=1e-4, nonneg_tol=1e-10,
                      min_levels=128) -> SciReport:
    """Run the covering pipeline on a radial pair of supersolutions.

    Hypotheses checked nodewise before any computation: f2 >= f1 >= 0,
    w2 >= w1 with equality at R, and both PDE residuals
    |Delta w_i + e^(w_i) - f_i| below ``pde_tol``.  Each failure names
    its clause.  The pipeline then matches a bubble to the mass of
    e^(w1), rearranges phi = w2 - w1 onto the bubble disc B_1, and
    places psi = U_lam1 + phi* through the dichotomy; the report
    carries the combined mass against the 8 pi bound.
    """
    R = float(R)
    for prof, name in ((w1, "w1"), (w2, "w2"), (f1, "f1"), (f2, "f2")):
        if abs(prof.r_max - R) > 1e-12:
            raise HypothesisError(f"{name} is not defined on the disc of radius {R}")

    nodes = w1.grid.nodes
    f1v = np.asarray(f1.value(nodes), dtype=float)
    f2v = np.asarray(f2.value(nodes), dtype=float)
    if np.min(f1v) < -nonneg_tol:
        raise HypothesisError("clause f1 >= 0 fails "
                              f"(min f1 = {np.min(f1v):.3e})")
    if np.min(f2v - f1v) < -nonneg_tol:
        raise HypothesisError("clause f2 >= f1 fails "
                              f"(min f2 - f1 = {np.min(f2v - f1v):.3e})")

    w1v = np.asarray(w1.value(nodes), dtype=float)
    w2v = np.asarray(w2.value(nodes), dtype=float)
    if np.min(w2v - w1v) < -nonneg_tol:
        raise HypothesisError("clause w2 >= w1 fails "
                              f"(min w2 - w1 = {np.min(w2v - w1v):.3e})")
    gap_b = float(w2.value(R)) - float(w1.value(R))
    if abs(gap_b) > 1e-8:
        raise HypothesisError(f"clause w2 = w1 on the boundary fails "
                              f"(gap {gap_b:.3e})")

    check = nodes[1:-1:max(1, len(nodes) // 30)]
    res1 = _pde_residual(w1, f1, check)
    res2 = _pde_residual(w2, f2, check)
    if res1 > pde_tol:
        raise HypothesisError(f"clause PDE residual of (w1, f1) fails "
                              f"({res1:.3e} > {pde_tol:.1e})")
    if res2 > pde_tol:
        raise HypothesisError(f"clause PDE residual of (w2, f2) fails "
                              f"({res2:.3e} > {pde_tol:.1e})")

    mass1 = profile_mass(w1, R)
    mass2 = profile_mass(w2, R)
    total = mass1 + mass2
    diagnostics = {"mass_w1": float(mass1), "mass_w2": float(mass2),
                   "pde_residual_w1": res1, "pde_residual_w2": res2}

    if mass1 >= EIGHT_PI:
        diagnostics["note"] = "e^(w1) alone carries at least 8 pi"
        return SciReport(total_mass=float(total), bound=EIGHT_PI,
                         slack=float(total - EIGHT_PI), lambda1=float("nan"),
                         dichotomy=None, diagnostics=diagnostics)

    # bubble on B_1 with the same total mass as e^(w1) on B_R
    lam1 = math.sqrt(8.0 * mass1 / (EIGHT_PI - mass1))
    grid = w1.grid
    phi = RadialProfile.from_samples(grid, w2v - w1v)
    star = rearrange_radial(phi, w1, lam1, min_levels=min_levels)
    diagnostics["rearrangement_residual"] = star.equimeasurability_residual

    bubble = LiouvilleBubble(lam1)
    rho = star.profile.grid.nodes
    psi_vals = np.asarray(bubble.value(rho), dtype=float) + star.profile.values
    psi = RadialProfile.from_samples(star.profile.grid, psi_vals)
    diagnostics["psi_mass"] = float(profile_mass(psi, psi.r_max))
    # the rearrangement preserves the exponential integral layer by layer
    diagnostics["mass_transfer_gap"] = abs(diagnostics["psi_mass"] - mass2)

    if abs(lam1 - math.sqrt(8.0)) <= 1e-9:
        # degenerate matched pair: both masses are 4 pi
        m_half = bubble_mass(lam1, 1.0)
        verdict = UPPER if diagnostics["psi_mass"] >= m_half - 1e-8 else LOWER
        dich = DichotomyReport(m=diagnostics["psi_mass"], m1=m_half,
                               m2=m_half, beta_b=(2.0 * math.pi * lam1
                                                  / (1.0 + lam1 ** 2 / 8.0)) ** 2,
                               verdict=verdict, hypothesis_ok=True,
                               diagnostics={"degenerate": True})
    else:
        pair = make_pair(lam1, 1.0)
        dich = dichotomy_check(psi, pair)

    return SciReport(total_mass=float(total), bound=EIGHT_PI,
                     slack=float(total - EIGHT_PI), lambda1=lam1,
                     dichotomy=dich, diagnostics=diagnostics)
