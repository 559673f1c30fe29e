"""Problem specifications: potentials, exterior data, measurement windows.

Functions are named records (kind + parameters) so that problem setups
hash, serialize, and rebuild identically across processes; the actual
callables come from a small registry.  Measurement windows are rasterized
onto the grid lattice.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .grids import Field, Grid

__all__ = [
    "FuncSpec",
    "smooth_step",
    "mollified_interval_ring",
    "mollified_square_ring",
    "RingWindow",
    "ProblemSpec",
    "Observation",
    "parse_config_text",
    "format_config_text",
]


def smooth_step(t: np.ndarray) -> np.ndarray:
    """C-infinity transition: 0 for t <= 0, 1 for t >= 1, exp(-1/t) based."""
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    out[t >= 1.0] = 1.0
    mid = (t > 0.0) & (t < 1.0)
    tm = t[mid]
    a = np.exp(-1.0 / tm)
    b = np.exp(-1.0 / (1.0 - tm))
    out[mid] = a / (a + b)
    return out


def _bump_profile(r, lo, hi, w):
    """1 on [lo+w, hi-w], 0 outside (lo, hi), smooth in between."""
    r = np.asarray(r, dtype=float)
    return smooth_step((r - lo) / w) * smooth_step((hi - r) / w)


def mollified_interval_ring(inner: float, outer: float, width: float):
    """Smooth indicator of (-outer,-inner) u (inner,outer) on the line."""
    if width <= 0 or 2 * width >= outer - inner:
        raise ValueError("smoothing width too large for the window thickness")

    def f(x):
        return _bump_profile(np.abs(np.asarray(x, dtype=float)), inner, outer, width)

    return f


def mollified_square_ring(inner: float, outer: float, width: float):
    """Smooth indicator of (-outer,outer)^2 \\ [-inner,inner]^2.

    Built from 1D profiles so the result is genuinely smooth (a sup-norm
    radial profile would kink on the diagonals): equals 1 once the larger
    coordinate clears inner+width and both stay below outer-width.
    """
    if width <= 0 or 2 * width >= outer - inner:
        raise ValueError("smoothing width too large for the window thickness")

    def outer_bump(t):
        return _bump_profile(np.abs(t), -outer, outer, width)

    def inner_plateau(t):
        # 1 on [-inner, inner], 0 beyond inner+width
        return smooth_step((inner + width - np.abs(np.asarray(t, dtype=float))) / width)

    def f(x, y):
        return outer_bump(x) * outer_bump(y) * (1.0 - inner_plateau(x) * inner_plateau(y))

    return f


@dataclass(frozen=True)
class FuncSpec:
    """Named, parameterized scalar function on the domain.

    Hashable and JSON-friendly; ``build(dim)`` returns a vectorized
    callable taking dim coordinate arrays.
    """

    kind: str
    params: tuple = ()

    def build(self, dim: int):
        k, p = self.kind, self.params
        if k == "zero":
            return lambda *xs: np.zeros(np.broadcast(*xs).shape) if dim > 1 \
                else np.zeros_like(np.asarray(xs[0], dtype=float))
        if k == "constant":
            (c,) = p
            return lambda *xs: np.full(np.broadcast(*xs).shape, float(c))
        if k == "sin_pi":
            return lambda x: np.sin(math.pi * np.asarray(x, dtype=float))
        if k == "quadratic_plus":
            amp, c = p
            return lambda x: amp * np.maximum(c - np.asarray(x, dtype=float), 0.0) ** 2
        if k == "step":
            lo, hi, val = p
            return lambda x: np.where(
                (np.asarray(x, dtype=float) > lo) & (np.asarray(x, dtype=float) < hi),
                float(val), 0.0)
        if k == "poly_bump_2d":
            amp, r = p
            def qb(x, y):
                x = np.asarray(x, dtype=float)
                y = np.asarray(y, dtype=float)
                return amp * np.maximum((r**2 - x**2) ** 3 * (r**2 - y**2) ** 3, 0.0) \
                    * ((np.abs(x) < r) & (np.abs(y) < r))
            return qb
        if k == "gaussian":
            w = p[0]
            amp = p[1] if len(p) > 1 else 1.0
            if dim == 1:
                return lambda x: amp * np.exp(
                    -np.asarray(x, dtype=float) ** 2 / (2 * w * w))
            return lambda x, y: amp * np.exp(
                -(np.asarray(x, dtype=float) ** 2
                  + np.asarray(y, dtype=float) ** 2) / (2 * w * w))
        if k == "poly_bump":
            (pw,) = p
            def ub(x):
                x = np.asarray(x, dtype=float)
                return np.where(np.abs(x) < 1.0,
                                (1.0 - np.minimum(x * x, 1.0)) ** pw, 0.0)
            return ub
        if k == "mollified_ring":
            inner, outer, width = p
            if dim == 1:
                return mollified_interval_ring(inner, outer, width)
            return mollified_square_ring(inner, outer, width)
        raise ValueError(f"unknown function kind {k!r}")

    def sample(self, grid: Grid, where: str = "full") -> np.ndarray:
        fn = self.build(grid.dim)
        x = grid.axis_coords() if where == "full" else grid.interior_coords()
        if grid.dim == 1:
            return np.asarray(fn(x), dtype=float)
        return np.asarray(fn(x[:, None], x[None, :]), dtype=float)


@dataclass(frozen=True)
class RingWindow:
    """Open window inner < |x|_sup < outer, rasterized on grid lattices."""

    inner: float
    outer: float

    def contains(self, pts: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        supn = np.max(np.abs(pts), axis=1)
        return (supn > self.inner) & (supn < self.outer)

    def lattice_points(self, grid: Grid) -> np.ndarray:
        """Window nodes as (k, dim) coordinates; strict interior of the window.

        Only nodes strictly inside (-R, R)^dim qualify (beyond, the field
        is identically zero by truncation).
        """
        x = grid.axis_coords()
        if grid.dim == 1:
            sel = (np.abs(x) < grid.R - 1e-12) & (np.abs(x) > self.inner) \
                & (np.abs(x) < self.outer)
            return x[sel][:, None]
        X, Y = np.meshgrid(x, x, indexing="ij")
        supn = np.maximum(np.abs(X), np.abs(Y))
        sel = (np.abs(X) < grid.R - 1e-12) & (np.abs(Y) < grid.R - 1e-12) \
            & (supn > self.inner) & (supn < self.outer)
        return np.stack([X[sel], Y[sel]], axis=1)


@dataclass(frozen=True)
class ProblemSpec:
    """Everything needed to pose forward/adjoint/sensitivity solves."""

    s: float
    gamma: float
    grid: Grid
    q: Field  # potential; ring entries must vanish
    f: FuncSpec  # exterior datum
    g: FuncSpec  # interior source
    W1: RingWindow
    W2: RingWindow
    eps_gap: float = 0.0  # 0 means: one grid cell

    def __post_init__(self):
        if not 0.0 < self.s < 1.0:
            raise ValueError(f"s must lie in (0,1), got {self.s}")
        if not (2.0 * self.s < self.gamma <= 2.0):
            raise ValueError(
                f"splitting parameter must lie in (2s, 2], got {self.gamma}")
        if self.q.grid != self.grid:
            raise ValueError("potential lives on a different grid")
        ring = self.q.values[self.grid.ring_mask_axis()] if self.grid.dim == 1 \
            else self.q.values[~self._interior_mask_2d()]
        if np.any(ring != 0.0):
            raise ValueError("potential must vanish outside the interior")
        gap = self.eps_gap if self.eps_gap > 0 else self.grid.h
        for name, win in (("W1", self.W1), ("W2", self.W2)):
            if win.inner < self.grid.L + gap - 1e-12:
                raise ValueError(
                    f"{name} must stay strictly outside the domain plus the "
                    f"configured gap ({self.grid.L + gap})")

    def _interior_mask_2d(self) -> np.ndarray:
        m = np.zeros(self.grid.full_shape(), dtype=bool)
        s_ = self.grid.interior_slice
        m[s_, s_] = True
        return m

    @property
    def dim(self) -> int:
        return self.grid.dim

    def q_interior(self) -> np.ndarray:
        return self.q.interior()

    def with_potential(self, q_interior: np.ndarray) -> "ProblemSpec":
        return ProblemSpec(s=self.s, gamma=self.gamma, grid=self.grid,
                           q=Field.from_interior(self.grid, q_interior),
                           f=self.f, g=self.g, W1=self.W1, W2=self.W2,
                           eps_gap=self.eps_gap)


@dataclass(frozen=True)
class Observation:
    """Exterior measurement: window points, values, noise metadata."""

    points: np.ndarray
    values: np.ndarray
    delta: float
    seed: int | None = None

    def __post_init__(self):
        pts = np.atleast_2d(np.asarray(self.points, dtype=float))
        vals = np.asarray(self.values, dtype=float)
        if pts.shape[0] != vals.shape[0]:
            raise ValueError("points and values length mismatch")
        if self.delta < 0:
            raise ValueError("noise level must be non-negative")
        pts = pts.copy(); pts.setflags(write=False)
        vals = vals.copy(); vals.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "values", vals)

    def validate_window(self, win: RingWindow) -> None:
        if not np.all(win.contains(self.points)):
            raise ValueError("observation points fall outside the window")


def parse_config_text(text: str) -> dict[str, str]:
    """Parse a key=value config (``#`` comments, blank lines ignored)."""
    out: dict[str, str] = {}
    for ln, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {ln}: expected key=value, got {raw!r}")
        key, val = line.split("=", 1)
        out[key.strip()] = val.strip()
    return out


def format_config_text(cfg: dict) -> str:
    return "".join(f"{k}={v}\n" for k, v in cfg.items())
