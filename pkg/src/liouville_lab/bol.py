"""Isoperimetric deficits for conformal discs, the level-set
machinery behind the radial inequality, and the first-eigenvalue mass
criterion.

The deficit of a profile p at radius r is

    (2 pi r e^(p(r)/2))^2 - (1/2) m (8 pi - m),   m = mass of e^p on B_r,

which vanishes identically on the explicit bubble family and is
nonnegative for supersolutions with mass at most 8 pi.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh_tridiagonal
from scipy.optimize import brentq

from .errors import HypothesisError, ResolutionError
from .quadrature import DEFAULT_RTOL
from .radial import (EIGHT_PI, RadialProfile, boundary_weight, cumulative_mass,
                     profile_mass)


def bol_deficit(p: RadialProfile, r, method="auto", rtol=DEFAULT_RTOL):
    """Boundary weight squared minus (1/2) m (8 pi - m) on B_r.

    ``method``: "closed_form" uses the profile's closed-form cumulative
    mass (available on bubble profiles), "quadrature" forces adaptive
    integration, "auto" prefers the closed form when present.
    """
    r = float(r)
    if method == "closed_form" or (method == "auto" and p.mass_fn is not None):
        if p.mass_fn is None:
            raise HypothesisError("profile has no closed-form mass")
        m = float(p.mass_fn(r))
    else:
        m = profile_mass(p, r, rtol=rtol)
    bw = boundary_weight(p, r)
    return bw * bw - 0.5 * m * (EIGHT_PI - m)


# ---------------------------------------------------------------------------
# radial hypothesis check
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HypothesisReport:
    radii: np.ndarray
    slack: np.ndarray          # 2 pi r |p'| - mass(B_r); <= 0 required
    violations: np.ndarray     # bool per node
    total_mass: float
    mass_bound_ok: bool

    @property
    def all_ok(self) -> bool:
        return bool(not self.violations.any()) and self.mass_bound_ok


def radial_hypothesis_check(p: RadialProfile, tol=1e-8) -> HypothesisReport:
    """Nodewise check of the boundary-gradient bound
    int_{dB_r} |grad p| <= int_{B_r} e^p and the 8 pi mass cap."""
    if not p.strictly_decreasing:
        raise HypothesisError("profile must be strictly decreasing")
    if not p.has_derivative_data:
        raise HypothesisError("hypothesis check needs derivative data")
    radii = p.grid.nodes
    masses = cumulative_mass(p, radii)
    grads = 2.0 * math.pi * radii * np.abs(p.derivative(radii))
    slack = grads - masses
    total = masses[-1]
    return HypothesisReport(
        radii=radii[1:], slack=slack[1:], violations=slack[1:] > tol,
        total_mass=float(total),
        mass_bound_ok=bool(total <= EIGHT_PI + tol))


# ---------------------------------------------------------------------------
# level functions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LevelFunctions:
    thresholds: np.ndarray     # decreasing, above the boundary value
    k_of_t: np.ndarray         # mass of the superlevel disc
    mu_of_t: np.ndarray        # Euclidean area of the superlevel disc
    monotone_q: np.ndarray     # e^t mu - k + k^2/(8 pi)
    boundary_value: float


def invert_profile(p: RadialProfile, t):
    """Radius where the strictly decreasing profile equals t."""
    v0, vR = float(p.value(0.0)), float(p.value(p.r_max))
    if t >= v0:
        return 0.0
    if t <= vR:
        return p.r_max
    return brentq(lambda r: float(p.value(r)) - t, 0.0, p.r_max, xtol=1e-14)


def threshold_ladder(p: RadialProfile, min_levels=128):
    """Decreasing thresholds at node values plus dyadic refinement."""
    vals = np.unique(p.values)  # ascending
    while len(vals) - 1 < min_levels:
        mids = 0.5 * (vals[:-1] + vals[1:])
        vals = np.unique(np.concatenate([vals, mids]))
    return vals[::-1].copy()


def level_functions(p: RadialProfile, min_levels=128) -> LevelFunctions:
    """Sample k(t), mu(t) and the monotone combination along the level
    ladder of a strictly decreasing radial profile, whose superlevel
    sets are discs."""
    if not p.strictly_decreasing:
        raise HypothesisError("level functions need a strictly decreasing profile")
    thresholds = threshold_ladder(p, min_levels)
    radii = np.array([invert_profile(p, t) for t in thresholds])
    masses = cumulative_mass(p, radii)
    mu = math.pi * radii ** 2
    q = np.exp(thresholds) * mu - masses + masses ** 2 / EIGHT_PI
    return LevelFunctions(
        thresholds=thresholds, k_of_t=masses, mu_of_t=mu, monotone_q=q,
        boundary_value=float(p.value(p.r_max)))


# ---------------------------------------------------------------------------
# first eigenvalue of Delta + e^w
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EigenReport:
    lambda1w: float
    mass: float
    grid_size: int


def _eig_smallest(w: RadialProfile, r_outer, n):
    """Smallest mu of -(r phi')' = mu r e^w phi, phi(R) = 0, by a
    finite-volume tridiagonal discretization; radial ground state."""
    h = r_outer / n
    r = np.arange(n) * h
    rp = r + 0.5 * h                       # r_{i+1/2}
    ew = np.exp(np.asarray(w.value(r), dtype=float))
    diag = np.empty(n)
    diag[0] = rp[0] / h
    diag[1:] = (rp[:-1] + rp[1:]) / h
    off = -rp[:-1] / h
    b = np.empty(n)
    b[0] = ew[0] * h * h / 8.0
    b[1:] = ew[1:] * r[1:] * h
    s = 1.0 / np.sqrt(b)
    c_diag = diag * s * s
    c_off = off * s[:-1] * s[1:]
    vals = eigh_tridiagonal(c_diag, c_off, select="i",
                            select_range=(0, 0), eigvals_only=True)
    return float(vals[0])


def first_eigenvalue(w: RadialProfile, r_outer, nodes=512) -> EigenReport:
    """lambda_1 of the quadratic form int |grad phi|^2 - int phi^2 e^w
    on the disc of radius ``r_outer`` with zero boundary data,
    normalized by int phi^2 e^w = 1: the value is mu_1 - 1 where mu_1
    is the smallest weighted Dirichlet eigenvalue.

    Richardson extrapolation over grids nodes/2 and nodes sharpens the
    second-order discretization.
    """
    if nodes < 64:
        raise ResolutionError("eigensolve needs at least 64 nodes")
    r_outer = float(r_outer)
    mu_coarse = _eig_smallest(w, r_outer, nodes // 2)
    mu_fine = _eig_smallest(w, r_outer, nodes)
    mu = (4.0 * mu_fine - mu_coarse) / 3.0
    mass = profile_mass(w, min(r_outer, w.r_max))
    return EigenReport(lambda1w=mu - 1.0, mass=mass, grid_size=nodes)
