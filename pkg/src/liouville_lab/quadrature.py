"""Adaptive composite Gauss-Legendre quadrature.

Integrands in this package are smooth radial functions with possibly
steep exponential layers, so a 15-point rule with recursive bisection
and a relative tolerance is both fast and robust.  Integrand callables
must accept and return numpy arrays.
"""

from __future__ import annotations

import numpy as np

_NODES15, _WEIGHTS15 = np.polynomial.legendre.leggauss(15)
_NODES7, _WEIGHTS7 = np.polynomial.legendre.leggauss(7)

DEFAULT_RTOL = 1e-10


def _fixed(f, a, b, nodes, weights):
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    return half * float(np.dot(weights, f(mid + half * nodes)))


def gauss_legendre(f, a, b, npoints=15):
    """Single fixed Gauss-Legendre panel on [a, b]."""
    nodes, weights = np.polynomial.legendre.leggauss(npoints)
    return _fixed(f, a, b, nodes, weights)


def integrate(f, a, b, rtol=DEFAULT_RTOL, atol=1e-14, max_depth=40):
    """Adaptive integral of ``f`` over [a, b].

    Bisects panels until the 7/15 point estimates agree to the
    requested tolerance.  ``f`` must be vectorized.
    """
    if b <= a:
        return 0.0

    def recurse(lo, hi, coarse_est, depth):
        fine = _fixed(f, lo, hi, _NODES15, _WEIGHTS15)
        if depth >= max_depth:
            return fine
        if abs(fine - coarse_est) <= rtol * abs(fine) + atol:
            return fine
        mid = 0.5 * (lo + hi)
        left = _fixed(f, lo, mid, _NODES7, _WEIGHTS7)
        right = _fixed(f, mid, hi, _NODES7, _WEIGHTS7)
        return recurse(lo, mid, left, depth + 1) + recurse(mid, hi, right, depth + 1)

    coarse = _fixed(f, a, b, _NODES7, _WEIGHTS7)
    return recurse(a, b, coarse, 0)


def cumulative_panels(f, radii):
    """Cumulative integral of ``f`` at each radius in ``radii``.

    One 15-point panel per segment; exact enough for the densely
    sampled smooth integrands used by level-set bookkeeping.  Returns
    an array of the same length as ``radii`` (which must be sorted
    ascending, first entry may be 0).
    """
    radii = np.asarray(radii, dtype=float)
    out = np.empty_like(radii)
    acc = 0.0
    prev = radii[0]
    out[0] = 0.0 if prev == 0.0 else _fixed(f, 0.0, prev, _NODES15, _WEIGHTS15)
    acc = out[0]
    for i in range(1, len(radii)):
        acc += _fixed(f, prev, radii[i], _NODES15, _WEIGHTS15)
        out[i] = acc
        prev = radii[i]
    return out


def gauss_legendre_interval(n=200):
    """Nodes and weights on [-1, 1] for sphere-side integrals."""
    return np.polynomial.legendre.leggauss(n)
