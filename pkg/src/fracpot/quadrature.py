"""Quadrature helpers for power-law kernels.

Everything here reduces to 1D rules:

* rectangle integrals of (xi^2 + eta^2)^p over [a,b]x[c,d] in the first
  quadrant, via a polar-angle reduction (handles the origin corner for
  p > -1 without special-casing),
* the radially-analytic tail of the 2D kernel outside a square,
* composite Gauss-Legendre panels and Gauss-Jacobi rules with an
  algebraic endpoint weight, used by the singular-integral evaluators.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.integrate import quad
from scipy.special import roots_jacobi, roots_legendre

__all__ = [
    "cospow_integral",
    "rect_power_integral",
    "RectPowerIntegrator",
    "tail_integral_2d",
    "gauss_panels",
    "gauss_jacobi_01",
]


def cospow_integral(a: float, theta: float, epsabs: float = 1e-14,
                    epsrel: float = 1e-12) -> float:
    """Integral of cos(t)**a over [0, theta], theta < pi/2.

    The integrand may peak sharply near pi/2 for a < 0; adaptive
    quadrature concentrates nodes there.
    """
    if theta == 0.0:
        return 0.0
    val, _ = quad(lambda t: math.cos(t) ** a, 0.0, theta,
                  epsabs=epsabs, epsrel=epsrel, limit=200)
    return val


class RectPowerIntegrator:
    """Integrates (xi^2+eta^2)^p over axis-aligned rectangles in Q1.

    Uses G(X, Y) = int_{[0,X]x[0,Y]} r^{2p} dA, reduced in polar
    coordinates to incomplete cosine-power integrals:

        G(X, Y) = [X^q g(atan(Y/X)) + Y^q g(atan(X/Y))] / q,
        q = 2p + 2 > 0,   g(t) = int_0^t cos(u)^{-q} du.

    Rectangle values follow by inclusion-exclusion; the origin corner is
    regular because q > 0.  G values are memoized, which makes building a
    full stencil cheap (neighboring cells share corners).
    """

    def __init__(self, p: float, tol: float = 1e-12):
        q = 2.0 * p + 2.0
        if q <= 0:
            raise ValueError(f"exponent p={p} not integrable at the origin")
        self.p = p
        self.q = q
        self.tol = tol
        self._g_cache: dict[float, float] = {}
        self._G_cache: dict[tuple[float, float], float] = {}

    def _g(self, theta: float) -> float:
        val = self._g_cache.get(theta)
        if val is None:
            val = cospow_integral(-self.q, theta, epsabs=self.tol * 1e-2,
                                  epsrel=self.tol)
            self._g_cache[theta] = val
        return val

    def corner(self, X: float, Y: float) -> float:
        """G(X, Y) over [0,X] x [0,Y]."""
        if X <= 0.0 or Y <= 0.0:
            return 0.0
        key = (X, Y) if X <= Y else (Y, X)
        val = self._G_cache.get(key)
        if val is None:
            a, b = key
            val = (a**self.q * self._g(math.atan2(b, a))
                   + b**self.q * self._g(math.atan2(a, b))) / self.q
            self._G_cache[key] = val
        return val

    def rect(self, a: float, b: float, c: float, d: float) -> float:
        """Integral over [a,b] x [c,d], 0 <= a < b, 0 <= c < d."""
        if b <= a or d <= c:
            return 0.0
        return (self.corner(b, d) - self.corner(a, d)
                - self.corner(b, c) + self.corner(a, c))


def rect_power_integral(p: float, a: float, b: float, c: float, d: float,
                        tol: float = 1e-12) -> float:
    """One-shot rectangle integral of (xi^2+eta^2)^p (see RectPowerIntegrator)."""
    return RectPowerIntegrator(p, tol=tol).rect(a, b, c, d)


def tail_integral_2d(L: float, s: float, tol: float = 1e-12) -> float:
    """Integral of (xi^2+eta^2)^{-(1+s)} over the first quadrant outside [0,2L]^2.

    In polar coordinates the radial part is analytic, leaving

        (2L)^{-2s} / s * int_0^{pi/4} cos(t)^{2s} dt.
    """
    if L <= 0:
        raise ValueError("L must be positive")
    if not 0 < s < 1:
        raise ValueError(f"s must lie in (0,1), got {s}")
    ang = cospow_integral(2.0 * s, math.pi / 4.0, epsabs=tol * 1e-2, epsrel=tol)
    return (2.0 * L) ** (-2.0 * s) / s * ang


def gauss_panels(a: float, b: float, n_panels: int, order: int):
    """Composite Gauss-Legendre nodes/weights on [a, b]."""
    x, w = roots_legendre(order)
    edges = np.linspace(a, b, n_panels + 1)
    mid = 0.5 * (edges[:-1] + edges[1:])
    half = 0.5 * (edges[1:] - edges[:-1])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def gauss_jacobi_01(n: int, beta: float):
    """Nodes/weights for int_0^1 t^beta f(t) dt with beta > -1.

    Returned weights absorb the t^beta factor, so sum(w * f(x)) is the
    weighted integral of smooth f.
    """
    # roots_jacobi integrates (1-x)^alpha (1+x)^beta on [-1,1]
    x, w = roots_jacobi(n, 0.0, beta)
    t = 0.5 * (x + 1.0)
    wt = w * 0.5 ** (beta + 1.0)
    return t, wt
