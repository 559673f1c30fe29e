"""Matrix-free application of the discrete operator and Krylov solvers.

The interior block of the discrete operator is Toeplitz (1D) or
block-Toeplitz with Toeplitz blocks (2D), so applying it is a convolution
with the symmetric weight kernel.  We zero-pad to a fast FFT length and
cache the kernel transform; one apply costs two FFTs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.fft as sfft
import scipy.sparse.linalg as spla

from .grids import Grid
from .stencil import StencilSymbol

__all__ = [
    "LatticeConvolver",
    "FastOperator",
    "build_fast_operator",
    "dense_operator",
    "KrylovReport",
    "krylov_solve",
    "cg_solve",
]


class LatticeConvolver:
    """Cached-FFT correlation of fields with a symmetric offset kernel.

    out[i] = sum_o kernel[o] * x[i + o]  (offsets o, |o| <= reach), which
    equals a convolution because the kernel is symmetric.  Instances are
    reusable across many applies; the kernel FFT is computed once.
    """

    def __init__(self, kernel: np.ndarray):
        kernel = np.asarray(kernel, dtype=float)
        self.dim = kernel.ndim
        if any(s % 2 == 0 for s in kernel.shape):
            raise ValueError("kernel must have odd extent per axis")
        self.reach = tuple((s - 1) // 2 for s in kernel.shape)
        self.kernel_shape = kernel.shape
        self._kernel = kernel
        self._hat: dict[tuple, np.ndarray] = {}
        self.fft_count = 0

    def _plan(self, in_shape: tuple) -> tuple:
        pad = tuple(sfft.next_fast_len(n + k - 1)
                    for n, k in zip(in_shape, self.kernel_shape))
        if pad not in self._hat:
            self._hat[pad] = sfft.rfftn(self._kernel, s=pad)
        return pad

    def correlate(self, x: np.ndarray) -> np.ndarray:
        """Full linear correlation; output has shape of x."""
        in_shape = x.shape
        pad = self._plan(in_shape)
        xh = sfft.rfftn(x, s=pad)
        y = sfft.irfftn(xh * self._hat[pad], s=pad)
        self.fft_count += 2
        sl = tuple(slice(r, r + n) for r, n in zip(self.reach, in_shape))
        return y[sl]


@dataclass
class KrylovReport:
    iterations: int
    final_residual: float
    converged: bool
    method: str
    # monotone decrease trace of the CG quadratic 0.5 x'Ax - b'x  (per iter)
    phi_trace: np.ndarray | None = None


class FastOperator:
    """Interior-to-interior action of the discrete operator plus diag(q).

    apply(x) = -c_ns * conv(kernel, embed(x)) |_interior + q * x

    where the kernel holds the stencil weights (diagonal included at
    offset 0) and embed() zero-pads x so that exterior contributions stay
    out (they belong to the right-hand side).  Immutable after build;
    concurrent applies are safe because each call works on fresh arrays.
    """

    def __init__(self, symbol: StencilSymbol, grid: Grid, q_interior: np.ndarray):
        if grid.dim != symbol.dim or grid.N != symbol.N or abs(grid.h - symbol.h) > 1e-14:
            raise ValueError("stencil symbol and grid do not match")
        n = grid.n_interior_axis
        q = np.asarray(q_interior, dtype=float)
        expected = (n,) if grid.dim == 1 else (n, n)
        if q.shape != expected:
            q = q.reshape(expected)
        self.symbol = symbol
        self.grid = grid
        self.q = q
        self.shape = expected
        self.size = int(np.prod(expected))
        self._conv = LatticeConvolver(symbol.kernel())
        self.apply_count = 0

    @property
    def fft_count(self) -> int:
        return self._conv.fft_count

    def apply(self, x: np.ndarray) -> np.ndarray:
        flat = x.ndim == 1 and self.grid.dim == 2
        xs = x.reshape(self.shape)
        y = -self.symbol.cns * self._conv.correlate(xs) + self.q * xs
        self.apply_count += 1
        return y.ravel() if flat else y

    def __call__(self, x: np.ndarray) -> np.ndarray:
        return self.apply(x)

    def diag_shift(self, q_interior: np.ndarray) -> "FastOperator":
        """Cheap variant with a different potential, sharing the kernel FFT."""
        op = FastOperator.__new__(FastOperator)
        op.symbol = self.symbol
        op.grid = self.grid
        q = np.asarray(q_interior, dtype=float).reshape(self.shape)
        op.q = q
        op.shape = self.shape
        op.size = self.size
        op._conv = self._conv
        op.apply_count = 0
        return op


def build_fast_operator(symbol: StencilSymbol, grid: Grid,
                        q_interior: np.ndarray) -> FastOperator:
    return FastOperator(symbol, grid, q_interior)


def dense_operator(symbol: StencilSymbol, grid: Grid,
                   q_interior: np.ndarray) -> np.ndarray:
    """Dense assembly of the interior operator, for oracle tests."""
    n = grid.n_interior_axis
    c = symbol.cns
    a = np.asarray(symbol.a)
    if grid.dim == 1:
        A = np.empty((n, n))
        for i in range(n):
            A[i, :] = -c * a[np.abs(i - np.arange(n))]
        A[np.arange(n), np.arange(n)] += np.asarray(q_interior).ravel()
        return A
    size = n * n
    A = np.empty((size, size))
    idx = np.arange(n)
    for i in range(n):
        for j in range(n):
            row = -c * a[np.abs(i - idx)[:, None], np.abs(j - idx)[None, :]]
            A[i * n + j, :] = row.ravel()
    A[np.arange(size), np.arange(size)] += np.asarray(q_interior).ravel()
    return A


def cg_solve(op, b: np.ndarray, rtol: float = 1e-10, max_iter: int = 1000,
             x0: np.ndarray | None = None):
    """Conjugate gradients on a symmetric positive definite apply.

    Tracks the quadratic phi(x) = 0.5 x'Ax - b'x through its per-step
    decrease 0.5 * alpha * r'r, which is monotone for exact CG and serves
    as the convergence-sanity trace.
    """
    b = np.asarray(b, dtype=float).ravel()
    bnorm = float(np.linalg.norm(b))
    if bnorm == 0.0:
        return np.zeros_like(b), KrylovReport(0, 0.0, True, "CG",
                                              np.zeros(0))
    x = np.zeros_like(b) if x0 is None else np.asarray(x0, dtype=float).ravel().copy()
    r = b - op(x).ravel() if x0 is not None else b.copy()
    p = r.copy()
    rs = float(r @ r)
    phi = []
    phi_val = 0.0
    it = 0
    while it < max_iter and np.sqrt(rs) > rtol * bnorm:
        Ap = op(p).ravel()
        pAp = float(p @ Ap)
        if pAp <= 0:
            # not positive definite along p; bail out, caller may retry
            return x, KrylovReport(it, np.sqrt(rs) / bnorm, False, "CG",
                                   np.asarray(phi))
        alpha = rs / pAp
        x += alpha * p
        r -= alpha * Ap
        phi_val -= 0.5 * alpha * rs
        phi.append(phi_val)
        rs_new = float(r @ r)
        p = r + (rs_new / rs) * p
        rs = rs_new
        it += 1
    res = np.sqrt(rs) / bnorm
    return x, KrylovReport(it, res, res <= rtol, "CG", np.asarray(phi))


def _lanczos_min_ritz(op, n: int, steps: int = 20, seed: int = 0) -> float:
    """Smallest Ritz value of the operator after a few Lanczos steps."""
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(n)
    v /= np.linalg.norm(v)
    V = [v]
    alphas, betas = [], []
    beta = 0.0
    v_prev = np.zeros(n)
    for _ in range(min(steps, n)):
        w = op(v).ravel()
        alpha = float(v @ w)
        w = w - alpha * v - beta * v_prev
        # full reorthogonalization; cheap at this size
        for u in V:
            w -= (u @ w) * u
        alphas.append(alpha)
        beta = float(np.linalg.norm(w))
        if beta < 1e-14:
            break
        v_prev = v
        v = w / beta
        V.append(v)
        betas.append(beta)
    T = np.diag(alphas)
    for i, bt in enumerate(betas[:len(alphas) - 1]):
        T[i, i + 1] = T[i + 1, i] = bt
    return float(np.linalg.eigvalsh(T).min())


def krylov_solve(op: FastOperator, rhs: np.ndarray, rtol: float = 1e-10,
                 max_iter: int | None = None,
                 x0: np.ndarray | None = None):
    """Solve op(x) = rhs, choosing CG when positive definiteness is plausible.

    The check is a heuristic: q >= 0 guarantees it (the kernel part is
    diagonally dominant with positive diagonal); otherwise the smallest
    Ritz value after 20 Lanczos steps must be positive.  Indefinite cases
    fall back to BiCGStab.
    """
    rhs = np.asarray(rhs, dtype=float).ravel()
    if not np.all(np.isfinite(rhs)):
        raise ValueError("right-hand side contains non-finite entries")
    if not 0.0 < rtol < 1.0:
        raise ValueError(f"rtol must lie in (0,1), got {rtol}")
    if max_iter is None:
        max_iter = 10 * op.grid.N * op.grid.dim
    if np.linalg.norm(rhs) == 0.0:
        return np.zeros_like(rhs), KrylovReport(0, 0.0, True, "CG", np.zeros(0))

    use_cg = bool(np.min(op.q) >= 0.0)
    if not use_cg:
        use_cg = _lanczos_min_ritz(op, op.size) > 0.0
    if use_cg:
        x, rep = cg_solve(op, rhs, rtol=rtol, max_iter=max_iter, x0=x0)
        if rep.converged or rep.iterations >= max_iter:
            return x, rep
        # pAp <= 0 encountered: the PD heuristic was wrong, fall through

    lin = spla.LinearOperator((op.size, op.size),
                              matvec=lambda v: op(v).ravel(), dtype=float)
    count = {"n": 0}

    def cb(_):
        count["n"] += 1

    try:
        x, info = spla.bicgstab(lin, rhs, rtol=rtol, atol=0.0,
                                maxiter=max_iter, x0=x0, callback=cb)
    except TypeError:  # older scipy spells rtol as tol
        x, info = spla.bicgstab(lin, rhs, tol=rtol, atol=0.0,
                                maxiter=max_iter, x0=x0, callback=cb)
    res = float(np.linalg.norm(rhs - op(x).ravel()) / np.linalg.norm(rhs))
    return x, KrylovReport(count["n"], res, info == 0 and res <= rtol * 10,
                           "BiCGStab", None)
