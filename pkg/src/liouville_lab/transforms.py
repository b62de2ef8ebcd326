"""Sphere-to-plane changes of variables.

Three pipelines share the same stereographic projection with pole at
x3 = 1: the Moser-Trudinger normalization, the singular mean-field
normalization, and the Onsager vortex normalization.  Axisymmetric
sphere inputs are functions g(x3) on [-1, 1]; on the plane they become
radial through x3 = (r^2 - 1)/(r^2 + 1).

Integrals of transformed densities are evaluated through the exact
substitution x3(r), which maps the whole plane onto the compact
interval [-1, 1] and removes all tail truncation error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError, PoleError, SingularityError, InconsistencyError
from .meanfield import KernelSpec
from .radial import RadialGrid, RadialProfile, geometric_grid
from .quadrature import gauss_legendre_interval

FOUR_PI = 4.0 * math.pi
EIGHT_PI = 8.0 * math.pi


# ---------------------------------------------------------------------------
# point maps
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SpherePoint:
    x1: float
    x2: float
    x3: float

    def __post_init__(self):
        norm = self.x1 ** 2 + self.x2 ** 2 + self.x3 ** 2
        if abs(norm - 1.0) > 1e-12:
            raise ParameterError(f"point not on the unit sphere: |x|^2 = {norm}")


@dataclass(frozen=True)
class PlanePoint:
    y1: float
    y2: float

    def __post_init__(self):
        if not (math.isfinite(self.y1) and math.isfinite(self.y2)):
            raise ParameterError("plane coordinates must be finite")


def stereo_project(x: SpherePoint) -> PlanePoint:
    """Projection (x1/(1-x3), x2/(1-x3)); undefined at the pole x3 = 1."""
    if x.x3 >= 1.0 - 1e-15:
        raise PoleError("stereographic projection undefined at the pole")
    return PlanePoint(x.x1 / (1.0 - x.x3), x.x2 / (1.0 - x.x3))


def stereo_inverse(y: PlanePoint) -> SpherePoint:
    rho2 = y.y1 ** 2 + y.y2 ** 2
    d = 1.0 + rho2
    return SpherePoint(2.0 * y.y1 / d, 2.0 * y.y2 / d, (rho2 - 1.0) / d)


def kelvin(y: PlanePoint) -> PlanePoint:
    """Inversion z = y/|y|^2; an involution fixing the unit circle."""
    rho2 = y.y1 ** 2 + y.y2 ** 2
    if rho2 == 0.0:
        raise SingularityError("Kelvin transform undefined at the origin")
    return PlanePoint(y.y1 / rho2, y.y2 / rho2)


def x3_of_radius(r):
    r = np.asarray(r, dtype=float)
    return (r * r - 1.0) / (r * r + 1.0)


def radius_of_x3(x):
    x = np.asarray(x, dtype=float)
    return np.sqrt((1.0 + x) / (1.0 - x))


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TransformReport:
    residual_sup: float
    mass: float
    expected_mass: float
    extras: dict = field(default_factory=dict)


def _pde_residual_sup(v: RadialProfile, weight, radii):
    """Sup over ``radii`` of |Delta v + weight(r) e^v|."""
    worst = 0.0
    for r in radii:
        res = v.laplacian(float(r)) + float(weight(np.asarray(r))) * math.exp(
            float(v.value(r)))
        worst = max(worst, abs(res))
    return worst


def _g_derivative(g, x, h=1e-6):
    """Central difference of the sphere profile, clamped to [-1, 1]."""
    hi = np.clip(np.asarray(x, dtype=float) + h, -1.0, 1.0)
    lo = np.clip(np.asarray(x, dtype=float) - h, -1.0, 1.0)
    return (np.asarray(g(hi), dtype=float) - np.asarray(g(lo), dtype=float)) \
        / (hi - lo)


def _check_radii(grid: RadialGrid, count=40):
    nodes = grid.nodes[1:-1]
    if len(nodes) <= count:
        return nodes
    idx = np.linspace(0, len(nodes) - 1, count).astype(int)
    return nodes[idx]


# ---------------------------------------------------------------------------
# Moser-Trudinger normalization
# ---------------------------------------------------------------------------

def mt_transform(g, alpha, r_max=50.0, n=512, quad_n=400):
    """Plane profile v = g(x3(r)) - (2/alpha) ln(1+r^2) + ln(8/alpha).

    ``g`` is an axisymmetric sphere profile g(x3) on [-1, 1].  The
    report carries the sup residual of Delta v + (1+r^2)^(2/alpha-2) e^v
    and the transformed total integral against its target 8*pi/alpha.
    """
    if alpha <= 0:
        raise ParameterError("alpha must be positive")

    def v_func(r):
        r = np.asarray(r, dtype=float)
        return g(x3_of_radius(r)) - (2.0 / alpha) * np.log1p(r * r) \
            + math.log(8.0 / alpha)

    def dv_func(r):
        r = np.asarray(r, dtype=float)
        d = 1.0 + r * r
        return _g_derivative(g, x3_of_radius(r)) * 4.0 * r / (d * d) \
            - (4.0 / alpha) * r / d

    grid = geometric_grid(r_max, n)
    v = RadialProfile.from_callable(v_func, grid, df=dv_func)

    def weight(r):
        return (1.0 + np.asarray(r, dtype=float) ** 2) ** (2.0 * (1.0 / alpha - 1.0))

    residual = _pde_residual_sup(v, weight, _check_radii(grid))

    # exact substitution: integral over the plane = (8 pi/alpha) * mean of e^g
    x, w = gauss_legendre_interval(quad_n)
    mean_eg = 0.5 * float(np.dot(w, np.exp(g(x))))
    mass = (EIGHT_PI / alpha) * mean_eg
    return v, TransformReport(residual_sup=residual, mass=mass,
                              expected_mass=EIGHT_PI / alpha)


# ---------------------------------------------------------------------------
# singular mean-field normalization
# ---------------------------------------------------------------------------

def singular_mf_transform(g, alpha, r_max=50.0, n=512, quad_n=400):
    """Plane profile for the singular mean-field problem:
    v = g(x3(r)) - ln(int e^g dw) + ln(16 pi (3+alpha)) - 3 ln(1+r^2),
    with target mass int (1+r^2) e^v dy = 4 pi (alpha+3).
    """
    if not (-1.0 < alpha < 1.0):
        raise ParameterError("singularity strength must lie in (-1, 1)")

    x, w = gauss_legendre_interval(quad_n)
    # unnormalized sphere measure: dw = 2 pi dx3 for axisymmetric integrands
    total_eg = 2.0 * math.pi * float(np.dot(w, np.exp(g(x))))
    shift = -math.log(total_eg) + math.log(16.0 * math.pi * (3.0 + alpha))

    def v_func(r):
        r = np.asarray(r, dtype=float)
        return g(x3_of_radius(r)) + shift - 3.0 * np.log1p(r * r)

    def dv_func(r):
        r = np.asarray(r, dtype=float)
        d = 1.0 + r * r
        return _g_derivative(g, x3_of_radius(r)) * 4.0 * r / (d * d) \
            - 6.0 * r / d

    grid = geometric_grid(r_max, n)
    v = RadialProfile.from_callable(v_func, grid, df=dv_func)

    def weight(r):
        return 1.0 + np.asarray(r, dtype=float) ** 2

    residual = _pde_residual_sup(v, weight, _check_radii(grid))

    # (1+r^2) e^v dy under x3(r): 4 pi * int e^(v(r(x))) (1-x)^(-3) dx;
    # e^v supplies (1+r^2)^(-3) = (1-x)^3/8, so the integrand collapses
    # to (pi/2) e^(g + shift)
    ev_factor = np.exp(g(x) + shift)
    mass = 0.5 * math.pi * float(np.dot(w, ev_factor))
    return v, TransformReport(residual_sup=residual, mass=mass,
                              expected_mass=FOUR_PI * (alpha + 3.0))


# ---------------------------------------------------------------------------
# Onsager normalization
# ---------------------------------------------------------------------------

def onsager_transform(v: RadialProfile, alpha, gamma, residual_tol=1e-8,
                      quad_n=400, n_check=40):
    """Project a solved Onsager profile to Delta w + K e^w = 0 with
    K(r) = 2 (1+r^2)^(alpha/4pi - 2) e^(gamma J), J = 2/(1+r^2).

    The additive constant and the coefficient on v are re-derived from
    the two contracts (zero PDE residual, total K e^w mass = alpha)
    rather than assumed: with
    I = int J^2 exp(alpha v - gamma x3) dy the consistent choice is

        w = alpha (v - ln(1+r^2)/(4 pi)) + ln(2 alpha / I) - gamma.

    Raises ``InconsistencyError`` when the residual stays above
    ``residual_tol`` after the re-derivation.
    """
    if alpha <= 0:
        raise ParameterError("alpha must be positive")
    if gamma < 0:
        raise ParameterError("gamma must be nonnegative")

    x, wts = gauss_legendre_interval(quad_n)
    r_of_x = radius_of_x3(x)
    v_at = v.value(np.minimum(r_of_x, v.r_max))
    # int J^2 F dy = 2 pi int F dx3 for radial F
    i_total = 2.0 * math.pi * float(np.dot(wts, np.exp(alpha * v_at - gamma * x)))
    const = math.log(2.0 * alpha / i_total) - gamma

    grid = v.grid

    def w_func(r):
        r = np.asarray(r, dtype=float)
        return alpha * (v.value(r) - np.log1p(r * r) / FOUR_PI) + const

    w_profile = RadialProfile.from_callable(w_func, grid)
    kernel = KernelSpec.onsager(alpha, gamma)

    # Delta w = alpha Delta v - (alpha/pi)(1+r^2)^(-2); the log term is exact
    worst = 0.0
    for r in _check_radii(grid, n_check):
        r = float(r)
        lap = alpha * v.laplacian(r) - (alpha / math.pi) / (1.0 + r * r) ** 2
        res = lap + float(kernel.k(np.asarray(r))) * math.exp(float(w_func(r)))
        worst = max(worst, abs(res))

    # mass of K e^w through the same substitution
    j_of_x = 1.0 - x
    mass = 0.5 * math.exp(const) * 2.0 * math.pi * float(
        np.dot(wts, np.exp(alpha * v_at + gamma * j_of_x)))

    extras = {
        "delta_ln_k_min_rederived": _min_delta_ln_k(kernel, grid),
        "delta_ln_k_min_alt": _min_delta_ln_k_alt(alpha, gamma, grid),
        "additive_constant": const,
        "v_coefficient": alpha,
    }
    report = TransformReport(residual_sup=worst, mass=mass,
                             expected_mass=float(alpha), extras=extras)
    if worst > residual_tol:
        raise InconsistencyError(
            f"Onsager contract residual {worst:.3e} exceeds {residual_tol:.1e}",
            diagnostics={"report": report})
    return w_profile, kernel, report


def _min_delta_ln_k(kernel: KernelSpec, grid: RadialGrid):
    return float(np.min(kernel.delta_ln_k(grid.nodes)))


def _min_delta_ln_k_alt(alpha, gamma, grid: RadialGrid):
    # variant transcription with both terms over (1+r^2)^3, kept so the
    # report can show how far it drifts from the derived form
    r = grid.nodes
    a = alpha / FOUR_PI - 2.0
    val = 4.0 * a / (1.0 + r * r) ** 3 + 8.0 * gamma * (r * r - 1.0) / (1.0 + r * r) ** 3
    return float(np.min(val))
