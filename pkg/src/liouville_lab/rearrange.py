"""Equimeasurable rearrangement with respect to two conformal
measures.

Given a decreasing radial profile phi on a disc carrying the measure
e^w dy, the rearranged profile phi* on the bubble disc carries the
measure e^(U_lam) dy and matches superlevel masses threshold by
threshold:

    int_{phi* > t} e^(U_lam) dy = int_{phi > t} e^w dy = a(t).

Because the bubble's cumulative mass is an explicit increasing
function of radius, the level radius rho(t) solving
bubble_mass(lam, rho) = a(t) is inverted in closed form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import HypothesisError, InfeasibleError
from .radial import (EIGHT_PI, LiouvilleBubble, RadialGrid, RadialProfile,
                     cumulative_mass)
from .bol import invert_profile, threshold_ladder


@dataclass(frozen=True)
class MassDistribution:
    thresholds: np.ndarray   # decreasing
    a_of_t: np.ndarray       # superlevel mass under e^w dy, nondecreasing


@dataclass(frozen=True)
class RearrangedProfile:
    profile: RadialProfile
    lam: float
    boundary_constant: float
    distribution: MassDistribution
    equimeasurability_residual: float


def bubble_mass_inverse(lam, a):
    """Radius rho with bubble mass 8 pi l^2 rho^2/(8 + l^2 rho^2) = a."""
    a = np.asarray(a, dtype=float)
    if np.any(a >= EIGHT_PI):
        raise InfeasibleError("target mass reaches the bubble total 8 pi")
    return np.sqrt(8.0 * a / (EIGHT_PI - a)) / lam


def mass_distribution(phi: RadialProfile, w: RadialProfile,
                      min_levels=128) -> MassDistribution:
    """Superlevel masses a(t) of phi under e^w dy along the threshold
    ladder of phi."""
    thresholds = threshold_ladder(phi, min_levels)
    radii = np.array([invert_profile(phi, t) for t in thresholds])
    a = cumulative_mass(w, radii)
    return MassDistribution(thresholds=thresholds, a_of_t=a)


def rearrange_radial(phi: RadialProfile, w: RadialProfile, lam,
                     min_levels=128) -> RearrangedProfile:
    """Rearrange phi equimeasurably from (e^w dy) onto (e^(U_lam) dy).

    phi must be strictly decreasing (or constant, in which case the
    output is the constant on the disc carrying the full mass of e^w).
    """
    if phi.r_max != w.r_max:
        raise HypothesisError("phi and w must share the same domain radius")

    if np.ptp(phi.values) == 0.0:
        total = float(cumulative_mass(w, np.array([0.0, w.r_max]))[-1])
        rho = float(bubble_mass_inverse(lam, total))
        c = float(phi.values[0])
        grid = RadialGrid(np.linspace(0.0, rho, 33))
        prof = RadialProfile.from_samples(grid, np.full(33, c),
                                          derivatives=np.zeros(33))
        dist = MassDistribution(thresholds=np.array([c]),
                                a_of_t=np.array([total]))
        return RearrangedProfile(profile=prof, lam=float(lam),
                                 boundary_constant=c, distribution=dist,
                                 equimeasurability_residual=0.0)

    if not phi.strictly_decreasing:
        raise HypothesisError("phi must be strictly decreasing (or constant)")

    dist = mass_distribution(phi, w, min_levels)
    rho = bubble_mass_inverse(lam, dist.a_of_t)
    # top threshold t = phi(0) has a = 0, rho = 0: the grid starts at 0
    if rho[0] != 0.0:
        rho = np.concatenate(([0.0], rho))
        values = np.concatenate(([dist.thresholds[0]], dist.thresholds))
    else:
        values = dist.thresholds.copy()
    # enforce strict monotonicity against roundoff duplicates
    keep = np.concatenate(([True], np.diff(rho) > 0))
    rho, values = rho[keep], values[keep]

    grid = RadialGrid(rho)
    prof = RadialProfile.from_samples(grid, values)
    star = RearrangedProfile(profile=prof, lam=float(lam),
                             boundary_constant=float(phi.value(phi.r_max)),
                             distribution=dist,
                             equimeasurability_residual=0.0)
    resid = equimeasurability_residual(star)
    return RearrangedProfile(profile=prof, lam=float(lam),
                             boundary_constant=star.boundary_constant,
                             distribution=dist,
                             equimeasurability_residual=resid)


def equimeasurability_residual(star: RearrangedProfile):
    """max over thresholds of |bubble superlevel mass of phi* - a(t)|,
    re-inverting the built profile rather than reusing construction
    radii."""
    bubble = LiouvilleBubble(star.lam)
    prof = star.profile
    worst = 0.0
    for t, a in zip(star.distribution.thresholds, star.distribution.a_of_t):
        rho = invert_profile(prof, float(t))
        worst = max(worst, abs(float(bubble.mass(rho)) - float(a)))
    return worst


# ---------------------------------------------------------------------------
# boundary gradient comparison
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GradientComparison:
    thresholds: np.ndarray
    grad_original: np.ndarray    # int |grad phi| over {phi = t}
    grad_rearranged: np.ndarray  # int |grad phi*| over {phi* = t}
    difference: np.ndarray       # original - rearranged, >= 0 expected
    j_of_t: np.ndarray           # int |grad phi|^2 over {phi > t}
    big_j_of_t: np.ndarray       # int |grad phi| over {phi > t}


def gradient_comparison(phi: RadialProfile, w: RadialProfile,
                        star: RearrangedProfile) -> GradientComparison:
    """Per-threshold boundary gradient integrals of phi and phi*.

    For radial inputs both sides are exact one-dimensional
    expressions: the original is 2 pi s |phi'(s)| at the level radius
    s(t); the rearranged side, through the coarea identity and the
    bubble's Bol equality, is a (8 pi - a) |phi'(s)| / (4 pi s e^w(s)).
    """
    if not phi.has_derivative_data:
        raise HypothesisError("gradient comparison needs derivative data")
    thresholds = star.distribution.thresholds
    a_vals = star.distribution.a_of_t
    s = np.array([invert_profile(phi, float(t)) for t in thresholds])
    dphi = np.abs(np.asarray(phi.derivative(s), dtype=float))
    ew = np.exp(np.asarray(w.value(s), dtype=float))

    grad_orig = 2.0 * math.pi * s * dphi
    with np.errstate(invalid="ignore", divide="ignore"):
        grad_star = a_vals * (EIGHT_PI - a_vals) * dphi / (4.0 * math.pi * s * ew)
    grad_star = np.where(s > 0.0, grad_star, 0.0)

    # j(t), J(t) samples: cumulative over the superlevel disc
    def grad_sq(sig):
        return np.asarray(phi.derivative(sig), dtype=float) ** 2 * sig

    def grad_abs(sig):
        return np.abs(np.asarray(phi.derivative(sig), dtype=float)) * sig

    from .quadrature import cumulative_panels
    order = np.argsort(s)
    j_sorted = 2.0 * math.pi * cumulative_panels(grad_sq, s[order])
    bj_sorted = 2.0 * math.pi * cumulative_panels(grad_abs, s[order])
    j = np.empty_like(j_sorted)
    bj = np.empty_like(bj_sorted)
    j[order] = j_sorted
    bj[order] = bj_sorted

    return GradientComparison(
        thresholds=thresholds, grad_original=grad_orig,
        grad_rearranged=grad_star, difference=grad_orig - grad_star,
        j_of_t=j, big_j_of_t=bj)
