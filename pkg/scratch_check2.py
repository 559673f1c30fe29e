import sys
sys.path.insert(0, "src")
import numpy as np
import math
from scipy.special import gamma as G
import mpmath
from fracpot.stencil import weights_1d, c_ns

s, gam, L = 0.4, 2.0, 1.0
w = L / 8.0

def u(x):
    return np.exp(-x**2 / (2 * w**2))

def frac_lap_gauss(x, s):
    a_ = w**2 / 2
    val = G(s + 0.5) / (2 * a_**(s + 0.5)) * float(mpmath.hyp1f1(s + 0.5, 0.5, -x**2 / (4 * a_)))
    return (1 / math.pi) * w * math.sqrt(2 * math.pi) * val

c = c_ns(1, s)
for N in (32, 64, 128, 256, 512):
    h = 2 * L / N
    a = weights_1d(s, gam, h, L)
    i = np.arange(-2 * N, 3 * N + 1)
    x_all = -L + i * h
    u_all = u(x_all)
    errs = np.zeros(N - 1)
    for k, ii in enumerate(range(1, N)):
        x0 = x_all[ii + 2 * N]
        mm = np.arange(1, N + 1)
        tot = a[0] * u_all[ii + 2 * N] + np.sum(a[mm] * (u_all[ii + 2 * N + mm] + u_all[ii + 2 * N - mm]))
        errs[k] = abs(-c * tot - frac_lap_gauss(x0, s))
    kmax = np.argmax(errs)
    # error at center node and at x ~ 0.5
    icen = N // 2 - 1
    ihalf = int(0.75 * N) - 1
    print(f"N={N}: max={errs.max():.3e} at x={x_all[kmax+1+2*N]:.4f}; e(0)={errs[icen]:.3e} e(0.5)={errs[ihalf]:.3e}")
