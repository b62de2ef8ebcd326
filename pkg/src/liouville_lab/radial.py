"""Radial substrate: grids, profiles, the explicit bubble family,
masses, boundary weights and the Gauss-Bonnet flux check.

A ``RadialProfile`` is a scalar function of radius on [0, R].  Sampled
profiles interpolate with a monotone cubic (PCHIP) so that strictly
decreasing data stays strictly decreasing; closed-form families carry
their own evaluators and bypass interpolation entirely.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.interpolate import PchipInterpolator

from .errors import ContractError, DomainError, ParameterError
from .quadrature import DEFAULT_RTOL, cumulative_panels, integrate

EIGHT_PI = 8.0 * math.pi
MIN_GRID_NODES = 16


# ---------------------------------------------------------------------------
# grids
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RadialGrid:
    """Strictly increasing radii r_0 = 0 < r_1 < ... < r_n = R."""

    nodes: np.ndarray

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        object.__setattr__(self, "nodes", nodes)
        if nodes.ndim != 1 or nodes.size < MIN_GRID_NODES:
            raise ContractError(f"grid needs at least {MIN_GRID_NODES} nodes")
        if nodes[0] != 0.0:
            raise ContractError("first grid node must be exactly 0")
        if not np.all(np.diff(nodes) > 0):
            raise ContractError("grid nodes must be strictly increasing")

    @property
    def r_max(self) -> float:
        return float(self.nodes[-1])

    def __len__(self):
        return self.nodes.size


def uniform_grid(r_max, n=256) -> RadialGrid:
    return RadialGrid(np.linspace(0.0, float(r_max), n))


def geometric_grid(r_max, n=256) -> RadialGrid:
    """Geometric spacing r_i = R (2^(i/n) - 1): resolves both the
    origin and the logarithmic tail of decaying solutions."""
    i = np.arange(n + 1, dtype=float)
    return RadialGrid(float(r_max) * (np.exp2(i / n) - 1.0))


# ---------------------------------------------------------------------------
# profiles
# ---------------------------------------------------------------------------

def _poly_derivatives(nodes, values):
    """Node derivatives by local quartic fits (5-point windows),
    one-sided at the endpoints.  Works on nonuniform grids."""
    n = len(nodes)
    out = np.empty(n)
    for i in range(n):
        lo = min(max(i - 2, 0), n - 5)
        window = slice(lo, lo + 5)
        # shift for conditioning
        x = nodes[window] - nodes[i]
        coeffs = np.polyfit(x, values[window], 4)
        out[i] = coeffs[-2]
    return out


@dataclass(frozen=True)
class RadialProfile:
    """Scalar function of radius on [0, R] with a derivative contract.

    Either sampled (``values`` at ``grid`` nodes, PCHIP in between) or
    closed form (``func``/``dfunc`` callables; samples kept for
    serialization).  ``mass_fn``, when present, is a closed-form
    cumulative mass r -> integral of e^profile over B_r.
    """

    grid: RadialGrid
    values: np.ndarray
    derivatives: np.ndarray | None = None
    func: object = field(default=None, repr=False)
    dfunc: object = field(default=None, repr=False)
    mass_fn: object = field(default=None, repr=False)

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", values)
        if values.shape != self.grid.nodes.shape:
            raise ContractError("values shape must match grid")
        if not np.all(np.isfinite(values)):
            raise ContractError("profile values must be finite")
        if self.derivatives is not None:
            derivs = np.asarray(self.derivatives, dtype=float)
            if derivs.shape != values.shape:
                raise ContractError("derivatives shape must match grid")
            object.__setattr__(self, "derivatives", derivs)

    # -- construction -------------------------------------------------

    @classmethod
    def from_samples(cls, grid, values, derivatives=None, synthesize=True):
        values = np.asarray(values, dtype=float)
        if derivatives is None and synthesize:
            derivatives = _poly_derivatives(grid.nodes, values)
        return cls(grid=grid, values=values, derivatives=derivatives)

    @classmethod
    def from_callable(cls, f, grid, df=None, mass_fn=None):
        values = np.asarray(f(grid.nodes), dtype=float)
        derivs = np.asarray(df(grid.nodes), dtype=float) if df is not None else None
        return cls(grid=grid, values=values, derivatives=derivs,
                   func=f, dfunc=df, mass_fn=mass_fn)

    # -- evaluation ---------------------------------------------------

    @cached_property
    def _interp(self):
        return PchipInterpolator(self.grid.nodes, self.values, extrapolate=True)

    @cached_property
    def _dinterp(self):
        if self.derivatives is not None:
            return PchipInterpolator(self.grid.nodes, self.derivatives,
                                     extrapolate=True)
        return self._interp.derivative()

    def value(self, r):
        if self.func is not None:
            return self.func(np.asarray(r, dtype=float))
        return self._interp(np.asarray(r, dtype=float))

    def derivative(self, r):
        if self.dfunc is not None:
            return self.dfunc(np.asarray(r, dtype=float))
        if self.derivatives is None and self.func is None:
            raise ContractError("profile carries no derivative data")
        return self._dinterp(np.asarray(r, dtype=float))

    @property
    def has_derivative_data(self) -> bool:
        return self.dfunc is not None or self.derivatives is not None

    @property
    def r_max(self) -> float:
        return self.grid.r_max

    @property
    def strictly_decreasing(self) -> bool:
        return bool(np.all(np.diff(self.values) < 0))

    def laplacian(self, r, h=None):
        """Radial Laplacian p'' + p'/r by centered differences of the
        derivative contract; even reflection through the origin."""
        r = float(r)
        if not self.has_derivative_data:
            raise ContractError("profile carries no derivative data")
        if h is None:
            h = 1e-5 * (1.0 + r) if self.dfunc is not None else 1e-3 * (1.0 + r)
        if r == 0.0:
            # Delta p = 2 p''(0); p'(0) = 0 for smooth radial profiles
            return 2.0 * float(self.derivative(h)) / h
        h = min(h, 0.5 * r)
        second = float(self.derivative(r + h) - self.derivative(r - h)) / (2.0 * h)
        return second + float(self.derivative(r)) / r


# ---------------------------------------------------------------------------
# the explicit bubble family
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LiouvilleBubble:
    """One-parameter family of explicit radial entire solutions of
    Delta u + e^u = 0 with total mass 8*pi."""

    lam: float

    def __post_init__(self):
        if not self.lam > 0:
            raise ParameterError("bubble scale must be positive")

    def value(self, r):
        r = np.asarray(r, dtype=float)
        return -2.0 * np.log1p(self.lam ** 2 * r ** 2 / 8.0) + 2.0 * math.log(self.lam)

    def derivative(self, r):
        r = np.asarray(r, dtype=float)
        return -4.0 * self.lam ** 2 * r / (8.0 + self.lam ** 2 * r ** 2)

    def mass(self, r):
        """Closed-form integral of e^u over B_r: 8*pi*l^2 r^2/(8 + l^2 r^2)."""
        r = np.asarray(r, dtype=float)
        x = self.lam ** 2 * r ** 2
        return EIGHT_PI * x / (8.0 + x)

    def as_profile(self, grid: RadialGrid) -> RadialProfile:
        return RadialProfile.from_callable(
            self.value, grid, df=self.derivative, mass_fn=self.mass)


def bubble_value(lam, r):
    return LiouvilleBubble(lam).value(r)


def bubble_mass(lam, r):
    return LiouvilleBubble(lam).mass(r)


def half_scaled_bubble_value(lam, r):
    """The half-normalization V(r) with 2 V = U - ln 2."""
    r = np.asarray(r, dtype=float)
    return -np.log1p(lam ** 2 * r ** 2 / 8.0) + math.log(lam) - 0.5 * math.log(2.0)


# ---------------------------------------------------------------------------
# masses and boundary weights
# ---------------------------------------------------------------------------

def profile_mass(p: RadialProfile, r, kernel=None, rtol=DEFAULT_RTOL):
    """Integral of k e^p over B_r, by adaptive quadrature.

    ``kernel`` is a vectorized callable k(s) (default 1).
    """
    r = float(r)
    if r < 0 or r > p.r_max * (1.0 + 1e-12):
        raise DomainError(f"radius {r} outside profile domain [0, {p.r_max}]")
    if r == 0.0:
        return 0.0
    if kernel is None:
        def f(s):
            return np.exp(p.value(s)) * s
    else:
        def f(s):
            return kernel(s) * np.exp(p.value(s)) * s
    return 2.0 * math.pi * integrate(f, 0.0, min(r, p.r_max), rtol=rtol)


def cumulative_mass(p: RadialProfile, radii, kernel=None):
    """Mass of k e^p over B_r for every r in the sorted array ``radii``."""
    if kernel is None:
        def f(s):
            return np.exp(p.value(s)) * s
    else:
        def f(s):
            return kernel(s) * np.exp(p.value(s)) * s
    return 2.0 * math.pi * cumulative_panels(f, radii)


def boundary_weight(p: RadialProfile, r):
    """Integral of e^(p/2) over the circle of radius r: 2*pi*r*e^(p(r)/2)."""
    r = float(r)
    if r == 0.0:
        return 0.0
    if r < 0 or r > p.r_max * (1.0 + 1e-12):
        raise DomainError(f"radius {r} outside profile domain [0, {p.r_max}]")
    return 2.0 * math.pi * r * math.exp(0.5 * float(p.value(r)))


# ---------------------------------------------------------------------------
# Gauss-Bonnet flux check
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GaussBonnetReport:
    area: float
    flux: float
    geodesic_total: float
    defect: float


def gauss_bonnet_check(p: RadialProfile, r, rtol=DEFAULT_RTOL) -> GaussBonnetReport:
    """Compare the mass of e^p on B_r against the boundary flux
    -2*pi*r*p'(r); the two agree exactly for solutions of
    Delta p + e^p = 0.  The defect is reported, never raised."""
    if not p.has_derivative_data:
        raise ContractError("Gauss-Bonnet check needs derivative data")
    r = float(r)
    area = profile_mass(p, r, rtol=rtol)
    flux = -2.0 * math.pi * r * float(p.derivative(r))
    return GaussBonnetReport(
        area=area,
        flux=flux,
        geodesic_total=2.0 * math.pi - area,
        defect=abs(area - flux),
    )
