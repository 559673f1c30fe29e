"""Uniform lattices on truncated domains, and fields living on them.

The computational domain is the square (-L, L)^dim surrounded by an
exterior ring extending to the truncation radius R.  All nodes live on one
uniform lattice x_i = -L + i*h with h = 2L/N; the ring holds the exterior
datum, everything beyond R is an implicit zero.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = ["Grid", "Field", "make_grid", "discrete_norm"]


@dataclass(frozen=True)
class Grid:
    """Uniform mesh over [-R, R]^dim aligned with the interior square.

    Attributes:
        dim: spatial dimension, 1 or 2.
        L: half-width of the interior square.
        R: truncation radius, R > L.
        N: number of interior subdivisions (even, >= 4); h = 2L/N.
        M: number of ring nodes per side, floor((R - L)/h) + 1.  The ring
           includes the nodes at +-L, so the full lattice per axis has
           N + 2M - 1 nodes.
    """

    dim: int
    L: float
    R: float
    N: int

    @property
    def h(self) -> float:
        return 2.0 * self.L / self.N

    @property
    def M(self) -> int:
        return int(np.floor((self.R - self.L) / self.h + 1e-12)) + 1

    @property
    def n_axis(self) -> int:
        """Full lattice size per axis (ring + interior endpoints + ring)."""
        return self.N + 2 * self.M - 1

    @property
    def n_interior_axis(self) -> int:
        return self.N - 1

    @property
    def interior_slice(self) -> slice:
        """Slice of strictly interior nodes within the full axis."""
        return slice(self.M, self.M + self.N - 1)

    def axis_coords(self) -> np.ndarray:
        """Coordinates of the full lattice along one axis.

        Index k corresponds to lattice index i = k - (M - 1), so that
        i = 0 lands exactly on -L and i = N on +L.
        """
        i = np.arange(-(self.M - 1), self.N + self.M)
        x = -self.L + i * self.h
        # pin the interior endpoints to avoid fp drift in node tests
        x[self.M - 1] = -self.L
        x[self.M - 1 + self.N] = self.L
        return x

    def interior_coords(self) -> np.ndarray:
        return self.axis_coords()[self.interior_slice]

    def ring_mask_axis(self) -> np.ndarray:
        """Boolean mask of exterior-ring nodes along one axis (1D sense)."""
        m = np.ones(self.n_axis, dtype=bool)
        m[self.interior_slice] = False
        return m

    def n_interior(self) -> int:
        return self.n_interior_axis**self.dim

    def full_shape(self) -> tuple[int, ...]:
        return (self.n_axis,) * self.dim


def make_grid(dim: int, L: float, R: float, N: int) -> Grid:
    """Build a grid, validating the admissibility constraints."""
    if dim not in (1, 2):
        raise ValueError(f"dim must be 1 or 2, got {dim}")
    if not L > 0:
        raise ValueError(f"L must be positive, got {L}")
    if not R > L:
        raise ValueError(f"truncation radius must exceed L: R={R}, L={L}")
    if N < 4 or N % 2 != 0:
        raise ValueError(f"N must be even and >= 4, got {N}")
    return Grid(dim=dim, L=float(L), R=float(R), N=int(N))


@dataclass(frozen=True)
class Field:
    """Values on the full lattice of a grid (interior plus exterior ring).

    Nodes beyond R are implicit zeros and never stored.  Instances are
    immutable value objects: the array is marked read-only so a field can
    be shared across threads.
    """

    grid: Grid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != self.grid.full_shape():
            raise ValueError(
                f"field shape {v.shape} does not match grid {self.grid.full_shape()}"
            )
        if not np.all(np.isfinite(v)):
            raise ValueError("field contains non-finite values")
        v = v.copy()
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def interior(self) -> np.ndarray:
        s = self.grid.interior_slice
        return self.values[s] if self.grid.dim == 1 else self.values[s, s]

    @staticmethod
    def zeros(grid: Grid) -> "Field":
        return Field(grid, np.zeros(grid.full_shape()))

    @staticmethod
    def from_interior(grid: Grid, interior: np.ndarray) -> "Field":
        """Embed interior values into a full-lattice field, ring = 0."""
        full = np.zeros(grid.full_shape())
        s = grid.interior_slice
        if grid.dim == 1:
            full[s] = interior
        else:
            full[s, s] = interior.reshape((grid.n_interior_axis,) * 2)
        return Field(grid, full)


def discrete_norm(values: np.ndarray, order: str, h: float, dim: int = 1) -> float:
    """Discrete surrogate of the L2 / Linf norm on a node subset.

    L2 uses the uniform lattice quadrature weight h^dim per node;
    Linf is the plain max of absolute values.
    """
    v = np.asarray(values, dtype=float).ravel()
    if v.size == 0:
        raise ValueError("discrete_norm of an empty node set")
    if order == "L2":
        return float(np.sqrt(h**dim * np.sum(v * v)))
    if order == "Linf":
        return float(np.max(np.abs(v)))
    raise ValueError(f"unknown norm order {order!r}")
