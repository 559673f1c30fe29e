import sys
sys.path.insert(0, "src")
import numpy as np
import math
from scipy.integrate import quad
from scipy.special import gamma as G
import mpmath

from fracpot.stencil import weights_1d, weights_2d, tail_1d, tail_integral_2d, c_ns

# ---- 1D row sum
s, gam, L = 0.4, 2.0, 1.0
N = 64
h = 2 * L / N
a = weights_1d(s, gam, h, L)
print("1D rowsum residual:", a[0] + 2 * np.sum(a[1:]) + 2 * tail_1d(L, s))

# ---- spectral oracle for Gaussian
w = L / 8.0

def u(x):
    return np.exp(-x**2 / (2 * w**2))

def frac_lap_gauss(x, s):
    # (-Delta)^s exp(-x^2/(2 w^2)) via Fourier: (1/pi) * int_0^inf xi^{2s} w sqrt(2pi) e^{-w^2 xi^2/2} cos(xi x) dxi / sqrt(2pi) ...
    # derive: u_hat(xi) = w sqrt(2pi) exp(-w^2 xi^2 / 2)
    # (-Delta)^s u(x) = (1/(2pi)) int |xi|^{2s} u_hat e^{i xi x} = (1/pi) int_0^inf xi^{2s} u_hat cos(xi x)
    # int_0^inf xi^{2s} e^{-a xi^2} cos(b xi) dxi = Gamma(s+1/2)/(2 a^{s+1/2}) 1F1(s+1/2; 1/2; -b^2/(4a))
    a_ = w**2 / 2
    val = G(s + 0.5) / (2 * a_**(s + 0.5)) * float(mpmath.hyp1f1(s + 0.5, 0.5, -x**2 / (4 * a_)))
    return (1 / math.pi) * w * math.sqrt(2 * math.pi) * val

def frac_lap_direct(x, s):
    c = c_ns(1, s)
    def dd(xi):
        return (2 * u(x) - u(x + xi) - u(x - xi)) / xi**(1 + 2 * s)
    # split [0, eps] with series-free jacobi handling: integrand ~ -u'' xi^{1-2s}
    v1, _ = quad(lambda t: (2 * u(x) - u(x + t) - u(x - t)) * t**(-1 - 2 * s), 0, 0.1,
                 epsabs=1e-13, epsrel=1e-12, limit=400)
    v2, _ = quad(dd, 0.1, 20, epsabs=1e-13, epsrel=1e-12, limit=400)
    v3 = 2 * u(x) * 20.0**(-2 * s) / (2 * s)  # tail of the 2u(x) part; u(x+-xi)=0 there
    return c * (v1 + v2 + v3)

for x in (0.0, 0.1, 0.3):
    print(f"x={x}: spectral={frac_lap_gauss(x, s):.12g} direct={frac_lap_direct(x, s):.12g}")

# ---- 1D scheme consistency: apply lattice operator to u, compare to spectral
c = c_ns(1, s)
for N in (32, 64, 128, 256):
    h = 2 * L / N
    a = weights_1d(s, gam, h, L)
    # extended lattice: u supported in (-1,1); nodes out to |x|<=3L needed for offsets
    i = np.arange(-2 * N, 3 * N + 1)
    x_all = -L + i * h
    u_all = u(x_all)
    u_all[np.abs(x_all) >= L] = u(x_all[np.abs(x_all) >= L])  # keep gaussian values (tiny) — true u
    errs = []
    for ii in range(1, N):          # interior nodes index i=1..N-1 -> position in x_all: ii+2N
        xi0 = x_all[ii + 2 * N]
        tot = a[0] * u_all[ii + 2 * N]
        mm = np.arange(1, N + 1)
        tot += np.sum(a[mm] * (u_all[ii + 2 * N + mm] + u_all[ii + 2 * N - mm]))
        approx = -c * tot
        exact = frac_lap_gauss(xi0, s)
        errs.append(abs(approx - exact))
    print(f"N={N} h={h:.4f} max consistency err={max(errs):.3e}")

# ---- 2D row sum (small N)
s2 = 0.5
N2 = 8
h2 = 2 * L / N2
a2 = weights_2d(s2, gam, h2, L)
rows = a2[0, 0] + 2 * (np.sum(a2[1:, 0]) + np.sum(a2[0, 1:])) + 4 * np.sum(a2[1:, 1:])
print("2D rowsum residual:", rows + 4 * tail_integral_2d(L, s2))
print("2D symmetry:", np.max(np.abs(a2 - a2.T)))
print("2D positivity off-diag:", np.all(a2[np.unravel_index(np.arange(a2.size), a2.shape)] is not None))
off = a2.copy(); off[0,0] = 1.0
print("min offdiag:", off.min())
