import sys
sys.path.insert(0, "src")
import numpy as np
import math
from scipy.integrate import quad
from fracpot.stencil import weights_1d, c_ns

s, gam, L = 0.4, 2.0, 1.0
c = c_ns(1, s)

p = 4
u = lambda x: np.where(np.abs(x) < 1, (1 - np.minimum(x*x, 1.0))**p, 0.0)

def flg(x):
    f1, _ = quad(lambda t: (2*u(x) - u(x+t) - u(x-t)) * t**(-1-2*s), 0, 0.5,
                 epsabs=1e-13, epsrel=1e-13, limit=400)
    f2, _ = quad(lambda t: (2*u(x) - u(x+t) - u(x-t)) * t**(-1-2*s), 0.5, 2 + abs(x),
                 epsabs=1e-13, epsrel=1e-13, limit=400)
    f3 = 2*u(x) * (2+abs(x))**(-2*s) / (2*s)
    return c * (f1 + f2 + f3)

q = lambda x: 1.0 + 0.5*np.cos(math.pi*x)
import warnings
warnings.filterwarnings("ignore")
for N in (32, 64, 128):
    h = 2*L/N
    a = weights_1d(s, gam, h, L)
    n = N-1
    x = -L + np.arange(1, N)*h
    A = np.zeros((n, n))
    for i in range(n):
        m = np.abs(i - np.arange(n))
        A[i, :] = -c * a[m]
    A[np.arange(n), np.arange(n)] += q(x)
    g = np.array([flg(xx) for xx in x]) + q(x)*u(x)
    uh = np.linalg.solve(A, g)
    e = uh - u(x)
    am = np.argmax(np.abs(e))
    # print error at selected stations
    stations = [-0.9375, -0.75, -0.5, -0.25, 0.0, 0.25, 0.5, 0.75, 0.9375]
    vals = []
    for st in stations:
        idx = np.argmin(np.abs(x - st))
        vals.append(f"{e[idx]:+.2e}")
    print(f"N={N}: max|e|={np.abs(e).max():.3e} at x={x[am]:+.4f}; e at {stations}: {vals}")
    # also consistency of the scheme on u* directly (local truncation)
    i_ext = np.arange(-2*N, 3*N+1)
    x_all = -L + i_ext*h
    u_all = u(x_all)
    tau = np.zeros(n)
    for k, ii in enumerate(range(1, N)):
        mm = np.arange(1, N+1)
        tot = a[0]*u_all[ii+2*N] + np.sum(a[mm]*(u_all[ii+2*N+mm] + u_all[ii+2*N-mm]))
        tau[k] = -c*tot + q(x[k])*u(x[k]) - g[k]
    amt = np.argmax(np.abs(tau))
    print(f"      max|tau|={np.abs(tau).max():.3e} at x={x[amt]:+.4f}   tau(0)={tau[n//2]:+.3e} tau(edge)={tau[0]:+.3e}")
