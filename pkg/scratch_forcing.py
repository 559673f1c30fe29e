import sys
sys.path.insert(0, "src")
import numpy as np
from scipy.special import roots_legendre
from fracpot.grids import make_grid
from fracpot.problem import FuncSpec
from fracpot.forcing import _forcing_2d, _forcing_1d, _masked_datum, boundary_forcing

def brute_2d(fn, grid, s, order):
    L, R, h, N = grid.L, grid.R, grid.h, grid.N
    span = R + L
    n_cells = int(np.floor(span / h + 1e-12))
    gx, gw = roots_legendre(order)
    off = 0.5 * h * (gx + 1.0)
    wts = 0.5 * h * gw
    xi = grid.interior_coords()
    n_int = N - 1
    out = np.zeros((n_int, n_int))
    for ci in range(n_cells):
        for cj in range(n_cells):
            if ci < N and cj < N:
                continue
            for ia in range(order):
                for ib in range(order):
                    xx = ci * h + off[ia]
                    yy = cj * h + off[ib]
                    k = wts[ia] * wts[ib] * (xx**2 + yy**2) ** (-(1 + s))
                    for a in range(n_int):
                        for b in range(n_int):
                            tot = (fn(xi[a] + xx, xi[b] + yy) + fn(xi[a] - xx, xi[b] + yy)
                                   + fn(xi[a] + xx, xi[b] - yy) + fn(xi[a] - xx, xi[b] - yy))
                            out[a, b] += k * tot
    return out.ravel()

grid = make_grid(2, 1.0, 2.0, 6)   # h=1/3, n_cells = 9
s = 0.45
fsp = FuncSpec("gaussian", (0.8,))
fn = _masked_datum(fsp.build(2), grid)
fast = _forcing_2d(fn, grid, s, 3)
slow = brute_2d(fn, grid, s, 3)
print("2D forcing max diff:", np.max(np.abs(fast - slow)), " scale:", np.max(np.abs(slow)))

# non-commensurate R: partial strip path
grid2 = make_grid(2, 1.0, 2.15, 6)
fn2 = _masked_datum(fsp.build(2), grid2)
fast2 = _forcing_2d(fn2, grid2, s, 3)
slow2 = brute_2d(fn2, grid2, s, 3)  # brute misses partial strip too...
# brute with partial strip: integrate [n_cells*h, span) x [0, span) and sym
def brute_partial(fn, grid, s, order):
    L, R, h, N = grid.L, grid.R, grid.h, grid.N
    span = R + L
    n_cells = int(np.floor(span / h + 1e-12))
    rem = span - n_cells * h
    gx, gw = roots_legendre(order)
    xi = grid.interior_coords()
    n_int = N - 1
    out = np.zeros((n_int, n_int))
    tp = n_cells * h + 0.5 * rem * (gx + 1.0); wp = 0.5 * rem * gw
    tf = []; wf = []
    for c in range(n_cells):
        tf.extend(c * h + 0.5 * h * (gx + 1.0)); wf.extend(0.5 * h * gw)
    tf = np.array(tf); wf = np.array(wf)
    ta = np.concatenate([tf, tp]); wa = np.concatenate([wf, wp])
    def acc(tx, wx, ty, wy):
        r = np.zeros((n_int, n_int))
        for i, (t1, w1) in enumerate(zip(tx, wx)):
            for j, (t2, w2) in enumerate(zip(ty, wy)):
                k = w1 * w2 * (t1**2 + t2**2) ** (-(1 + s))
                for aa in range(n_int):
                    for bb in range(n_int):
                        tot = (fn(xi[aa] + t1, xi[bb] + t2) + fn(xi[aa] - t1, xi[bb] + t2)
                               + fn(xi[aa] + t1, xi[bb] - t2) + fn(xi[aa] - t1, xi[bb] - t2))
                        r[aa, bb] += k * tot
        return r
    out += acc(tp, wp, ta, wa)
    out += acc(tf, wf, tp, wp)
    return out.ravel()

slow2_full = slow2 + brute_partial(fn2, grid2, s, 3)
print("2D forcing (partial) max diff:", np.max(np.abs(fast2 - slow2_full)), " scale:", np.max(np.abs(slow2_full)))

# 1D check
grid1 = make_grid(1, 1.0, 3.0, 8)
f1 = FuncSpec("mollified_ring", (1.1, 3.0, 0.3))
fn1 = _masked_datum(f1.build(1), grid1)
v1 = _forcing_1d(fn1, grid1, 0.4, 8)
# brute
from scipy.integrate import quad
xi = grid1.interior_coords()
brute1 = []
for x in xi:
    val, _ = quad(lambda t: t**(-1.8) * (fn1(np.array([x + t]))[0] + fn1(np.array([x - t]))[0]),
                  2.0, 4.0, epsabs=1e-12, epsrel=1e-12, limit=300)
    brute1.append(val)
print("1D forcing max diff:", np.max(np.abs(v1 - np.array(brute1))))
bf = boundary_forcing(f1, grid1, 0.4)
print("1D eps_r:", bf.eps_r, " zero f:", boundary_forcing(FuncSpec("zero"), grid1, 0.4).values.max())
