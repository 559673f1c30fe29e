"""Generating weights of the discrete integral fractional Laplacian.

The operator at an interior node is a lattice sum

    op(u)_i = -c_ns * ( a0 * u_i + sum_{offsets o != 0} a_|o| * u_{i+o} )

with offsets reaching N cells per axis, plus a far-field forcing term
handled separately.  The weights come from kernel-split quadratures: the
kernel r^{-(dim+2s)} is written as r^{gamma-dim-2s} * r^{-gamma} with the
splitting parameter gamma in (2s, 2]; the smooth power is integrated
exactly over lattice cells while r^{-gamma} is frozen at the cell's node.
The diagonal weight closes the row sum against the analytic kernel tail
outside the 2L-square, so the scheme annihilates constants up to that
tail.
"""

from __future__ import annotations

import io
import json
import math
import threading
from dataclasses import dataclass

import numpy as np
from scipy.special import gamma as gamma_fn

from .quadrature import RectPowerIntegrator, tail_integral_2d

__all__ = [
    "c_ns",
    "sigma",
    "cbar",
    "tail_1d",
    "tail_integral_2d",
    "weight_2d",
    "a00_2d",
    "StencilSymbol",
    "build_symbol",
    "weights_1d",
    "weights_2d",
    "dump_symbol",
    "load_symbol",
]

DEFAULT_QUAD_TOL = 1e-10


def c_ns(n: int, s: float) -> float:
    """Normalization constant of the singular-integral fractional Laplacian."""
    if n not in (1, 2):
        raise ValueError(f"dimension must be 1 or 2, got {n}")
    if not 0.0 < s < 1.0:
        raise ValueError(f"s must lie in (0,1), got {s}")
    return (2.0 ** (2 * s) * s * gamma_fn(n / 2.0 + s)
            / (math.pi ** (n / 2.0) * gamma_fn(1.0 - s)))


def sigma(m: int, n: int) -> int:
    """Number of zero entries among (m, n)."""
    if m < 0 or n < 0:
        raise ValueError("indices must be non-negative")
    return int(m == 0) + int(n == 0)


def cbar(m: int, n: int) -> int:
    """Sign of the near-origin correction cell attached to weight (m, n)."""
    if m < 0 or n < 0:
        raise ValueError("indices must be non-negative")
    if (m, n) in ((0, 1), (1, 0)):
        return 1
    if (m, n) == (1, 1):
        return -1
    return 0


def tail_1d(L: float, s: float) -> float:
    """Integral of xi^{-1-2s} over (2L, inf)."""
    return (2.0 * L) ** (-2.0 * s) / (2.0 * s)


@dataclass(frozen=True)
class StencilSymbol:
    """Weights of the discrete operator on one grid.

    ``a`` holds a_m for 0 <= m <= N in 1D (a[0] is the diagonal weight) or
    a_{mn} for 0 <= m, n <= N in 2D (a[0,0] diagonal).  ``cns`` is the
    kernel constant, ``tail`` the analytic kernel mass outside the
    2L-square (per quadrant in 2D, per side in 1D).  Immutable and safe to
    share across threads once built.
    """

    dim: int
    s: float
    gamma: float
    h: float
    L: float
    R: float
    N: int
    a: np.ndarray
    cns: float
    tail: float
    quad_tol: float

    def __post_init__(self):
        arr = np.asarray(self.a, dtype=float)
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "a", arr)

    @property
    def a00(self) -> float:
        return float(self.a[0] if self.dim == 1 else self.a[0, 0])

    def kernel(self) -> np.ndarray:
        """Symmetric offset kernel K[o] = a_|o| over offsets |o| <= N."""
        N = self.N
        if self.dim == 1:
            k = np.empty(2 * N + 1)
            k[N:] = self.a
            k[:N] = self.a[:0:-1]
            return k
        k = np.empty((2 * N + 1, 2 * N + 1))
        k[N:, N:] = self.a
        k[N:, :N] = self.a[:, :0:-1]
        k[:N, :] = k[N + 1:, :][::-1, :]
        return k


def _check_params(s: float, gamma: float) -> None:
    if not 0.0 < s < 1.0:
        raise ValueError(f"s must lie in (0,1), got {s}")
    if not (2.0 * s < gamma <= 2.0):
        raise ValueError(f"splitting parameter must lie in (2s, 2], got {gamma}")


def weight_2d(m: int, n: int, s: float, gamma: float, h: float, L: float,
              quad_tol: float = DEFAULT_QUAD_TOL,
              _integ: RectPowerIntegrator | None = None) -> float:
    """Single 2D weight a_{mn}, m + n != 0."""
    _check_params(s, gamma)
    if m + n == 0:
        raise ValueError("diagonal weight is assembled from the row sum")
    N = int(round(2 * L / h))
    if not (0 <= m <= N and 0 <= n <= N):
        raise ValueError(f"offsets must lie in [0, N]={N}, got ({m}, {n})")
    p = (gamma - 2.0 - 2.0 * s) / 2.0
    integ = _integ if _integ is not None else RectPowerIntegrator(p, tol=quad_tol)
    two_l = 2.0 * L
    a_ = max((m - 1) * h, 0.0)
    b_ = min((m + 1) * h, two_l)
    c_ = max((n - 1) * h, 0.0)
    d_ = min((n + 1) * h, two_l)
    val = integ.rect(a_, b_, c_, d_)
    corr = cbar(m, n)
    if corr != 0 and int(gamma // 2) == 1:
        val += corr * integ.rect(0.0, h, 0.0, h)
    denom = 4.0 * ((m * h) ** 2 + (n * h) ** 2) ** (gamma / 2.0)
    return 2.0 ** sigma(m, n) / denom * val


def a00_2d(a: np.ndarray, L: float, s: float,
           quad_tol: float = DEFAULT_QUAD_TOL) -> float:
    """Diagonal 2D weight closing the row sum against the kernel tail."""
    N = a.shape[0] - 1
    t_ext = tail_integral_2d(L, s, tol=quad_tol)
    return (-2.0 * float(np.sum(a[1:, 0]) + np.sum(a[0, 1:]))
            - 4.0 * float(np.sum(a[1:, 1:]))
            - 4.0 * t_ext)


def weights_1d(s: float, gamma: float, h: float, L: float,
               quad_tol: float = DEFAULT_QUAD_TOL) -> np.ndarray:
    """1D weights a_m, m = 0..N, with a_0 the row-sum-closing diagonal.

    All cell integrals of xi^{gamma-1-2s} are analytic; the m = 1 weight
    carries the near-origin correction cell that restores second-order
    accuracy of the singular cell for gamma = 2.
    """
    _check_params(s, gamma)
    N = int(round(2 * L / h))
    two_l = 2.0 * L
    e = gamma - 2.0 * s  # cell-integral exponent, > 0

    def cell(a: float, b: float) -> float:
        return (b**e - a**e) / e

    m = np.arange(1, N + 1, dtype=float)
    lo = np.maximum((m - 1) * h, 0.0)
    hi = np.minimum((m + 1) * h, two_l)
    vals = (hi**e - lo**e) / e
    if int(gamma // 2) == 1:
        vals[0] += cell(0.0, h)  # cbar_1 = 1 analogue
    a = np.empty(N + 1)
    a[1:] = vals / (2.0 * (m * h) ** gamma)
    a[0] = -2.0 * np.sum(a[1:]) - 2.0 * tail_1d(L, s)
    return a


def weights_2d(s: float, gamma: float, h: float, L: float,
               quad_tol: float = DEFAULT_QUAD_TOL) -> np.ndarray:
    """2D weight table a_{mn}, 0 <= m, n <= N, a[0,0] diagonal."""
    _check_params(s, gamma)
    N = int(round(2 * L / h))
    p = (gamma - 2.0 - 2.0 * s) / 2.0
    integ = RectPowerIntegrator(p, tol=quad_tol)
    a = np.zeros((N + 1, N + 1))
    for m in range(N + 1):
        for n in range(m, N + 1):
            if m + n == 0:
                continue
            val = weight_2d(m, n, s, gamma, h, L, quad_tol, _integ=integ)
            a[m, n] = val
            a[n, m] = val  # same cell geometry and kernel, exact symmetry
    a[0, 0] = a00_2d(a, L, s, quad_tol=quad_tol)
    return a


_symbol_cache: dict[tuple, StencilSymbol] = {}
_symbol_lock = threading.Lock()


def build_symbol(dim: int, s: float, gamma: float, L: float, R: float, N: int,
                 quad_tol: float = DEFAULT_QUAD_TOL,
                 use_cache: bool = True) -> StencilSymbol:
    """Build (or fetch memoized) stencil weights for a grid.

    The weights do not depend on R (the tail integral runs over the whole
    kernel exterior), but R is recorded for provenance and dump headers.
    """
    h = 2.0 * L / N
    key = (dim, float(s), float(gamma), float(L), int(N), float(quad_tol))
    if use_cache:
        with _symbol_lock:
            hit = _symbol_cache.get(key)
        if hit is not None:
            return hit
    if dim == 1:
        a = weights_1d(s, gamma, h, L, quad_tol)
        tail = tail_1d(L, s)
    elif dim == 2:
        a = weights_2d(s, gamma, h, L, quad_tol)
        tail = tail_integral_2d(L, s, tol=quad_tol)
    else:
        raise ValueError(f"dim must be 1 or 2, got {dim}")
    sym = StencilSymbol(dim=dim, s=float(s), gamma=float(gamma), h=h,
                        L=float(L), R=float(R), N=int(N), a=a,
                        cns=c_ns(dim, s), tail=tail, quad_tol=float(quad_tol))
    if use_cache:
        with _symbol_lock:
            _symbol_cache[key] = sym
    return sym


def dump_symbol(sym: StencilSymbol, path: str) -> None:
    """Write a symbol to disk; round-trips exactly."""
    header = {"dim": sym.dim, "s": sym.s, "gamma": sym.gamma, "h": sym.h,
              "L": sym.L, "R": sym.R, "N": sym.N, "quad_tol": sym.quad_tol}
    with open(path, "wb") as fh:
        np.savez(fh, header=json.dumps(header),
                 a=np.asarray(sym.a), cns=sym.cns, tail=sym.tail)


def load_symbol(path: str) -> StencilSymbol:
    with open(path, "rb") as fh:
        data = np.load(io.BytesIO(fh.read()), allow_pickle=False)
    header = json.loads(str(data["header"]))
    return StencilSymbol(a=data["a"], cns=float(data["cns"]),
                         tail=float(data["tail"]), **header)
