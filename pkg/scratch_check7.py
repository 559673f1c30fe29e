import sys
sys.path.insert(0, "src")
import numpy as np
import math
import warnings
from scipy.integrate import quad
from scipy.special import gamma as G
import mpmath
from fracpot.stencil import weights_1d, c_ns

warnings.filterwarnings("ignore")
s, gam, L = 0.4, 2.0, 1.0
c = c_ns(1, s)
w = L / 8

def u(x):
    return np.exp(-x**2 / (2 * w**2))

def flg(x):
    a_ = w**2 / 2
    val = G(s + 0.5) / (2 * a_**(s + 0.5)) * float(mpmath.hyp1f1(s + 0.5, 0.5, -x**2 / (4 * a_)))
    return (1 / math.pi) * w * math.sqrt(2 * math.pi) * val

x0 = 0.125   # fixed evaluation point on all lattices (i = N/16 offset from 0)
exact = flg(x0)
prev = None
for N in (64, 128, 256, 512, 1024, 2048, 4096, 8192):
    h = 2 * L / N
    a = weights_1d(s, gam, h, L)
    # x0 must be a lattice point: x0 = -L + i0*h -> i0 = (x0+L)/h
    i0 = int(round((x0 + L) / h))
    assert abs(-L + i0 * h - x0) < 1e-12
    mm = np.arange(1, N + 1)
    xs_p = x0 + mm * h
    xs_m = x0 - mm * h
    tot = a[0] * u(x0) + np.sum(a[mm] * (u(xs_p) + u(xs_m)))
    approx = -c * tot
    tau = approx - exact
    msg = f"N={N}: tau={tau:+.6e}"
    if prev is not None:
        msg += f"  ratio={prev/tau:+.3f} order={math.log(abs(prev/tau))/math.log(2):.3f}"
    prev = tau
    print(msg)
