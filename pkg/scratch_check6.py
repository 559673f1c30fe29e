import sys
sys.path.insert(0, "src")
import numpy as np
import math
import warnings
from scipy.integrate import quad
from fracpot.stencil import weights_1d, c_ns

warnings.filterwarnings("ignore")
s, gam, L = 0.4, 2.0, 1.0
c = c_ns(1, s)

def make_oracle(u):
    def flg(x):
        f1, _ = quad(lambda t: (2*u(x) - u(x+t) - u(x-t)) * t**(-1-2*s), 0, 0.3,
                     epsabs=1e-13, epsrel=1e-13, limit=500)
        f2, _ = quad(lambda t: (2*u(x) - u(x+t) - u(x-t)) * t**(-1-2*s), 0.3, 2 + abs(x),
                     epsabs=1e-13, epsrel=1e-13, limit=500)
        f3 = 2*u(x) * (2+abs(x))**(-2*s) / (2*s)
        return c * (f1 + f2 + f3)
    return flg

def conv_run(u, name, Ns=(32, 64, 128, 256)):
    flg = make_oracle(u)
    q = lambda x: 1.0 + 0.5*np.cos(math.pi*x)
    errs, hs = [], []
    for N in Ns:
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
        errs.append(np.abs(uh - u(x)).max()); hs.append(h)
    errs = np.array(errs); hs = np.array(hs)
    sl = np.polyfit(np.log(hs), np.log(errs), 1)[0]
    pw = np.log(errs[:-1]/errs[1:])/np.log(2)
    print(f"{name}: errs={['%.3e'%e for e in errs]} slope={sl:.3f} pw={['%.2f'%p for p in pw]}")

P4 = lambda x: np.where(np.abs(x) < 1, (1 - np.minimum(x*x, 1.0))**4, 0.0)
conv_run(lambda x: P4(x)*np.cos(2*math.pi*x), "(1-x^2)^4 cos(2 pi x)")
conv_run(lambda x: P4(x)*np.cos(math.pi*x), "(1-x^2)^4 cos(pi x)")
conv_run(lambda x: P4(x)*np.sin(math.pi*x)**2, "(1-x^2)^4 sin^2(pi x)")
w = L/8
conv_run(lambda x: np.exp(-x*x/(2*w*w))*np.cos(2*math.pi*x), "gauss cos(2 pi x)")
conv_run(lambda x: np.exp(-(x-0.35)**2/(2*(L/10)**2)) + np.exp(-(x+0.35)**2/(2*(L/10)**2)), "two gauss")
