import sys
sys.path.insert(0, "src")
import numpy as np
import math
from scipy.integrate import quad
from fracpot.stencil import weights_1d, c_ns

s, gam, L = 0.4, 2.0, 1.0
c = c_ns(1, s)

def make_oracle(u):
    def flg(x):
        f1, _ = quad(lambda t: (2*u(x) - u(x+t) - u(x-t)) * t**(-1-2*s), 0, 0.5,
                     epsabs=1e-13, epsrel=1e-13, limit=400)
        f2, _ = quad(lambda t: (2*u(x) - u(x+t) - u(x-t)) * t**(-1-2*s), 0.5, 2 + abs(x),
                     epsabs=1e-13, epsrel=1e-13, limit=400)
        f3 = 2*u(x) * (2+abs(x))**(-2*s) / (2*s)
        return c * (f1 + f2 + f3)
    return flg

def conv_run(u, name):
    flg = make_oracle(u)
    q = lambda x: 1.0 + 0.5*np.cos(math.pi*x)
    errs, hs = [], []
    for N in (32, 64, 128, 256):
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
        e = np.abs(uh - u(x))
        errs.append(e.max()); hs.append(h)
        am = np.argmax(e)
    errs = np.array(errs); hs = np.array(hs)
    sl = np.polyfit(np.log(hs), np.log(errs), 1)[0]
    pw = np.log(errs[:-1]/errs[1:])/np.log(2)
    print(f"{name}: errs={['%.3e'%e for e in errs]} slope={sl:.3f} pw={['%.2f'%p for p in pw]}")

conv_run(lambda x: np.where(np.abs(x) < 1, (1 - np.minimum(x*x, 1.0))**4, 0.0), "(1-x^2)^4")
conv_run(lambda x: np.where(np.abs(x) < 1, (1 - np.minimum(x*x, 1.0))**6, 0.0), "(1-x^2)^6")
conv_run(lambda x: np.where(np.abs(x) < 1, (1 - np.minimum(x*x, 1.0))**8, 0.0), "(1-x^2)^8")
conv_run(lambda x: np.where(np.abs(x) < 0.999999, np.exp(-1.0/np.maximum(1 - x*x, 1e-300)), 0.0), "exp bump")
conv_run(lambda x: np.cos(np.pi*x/2)**6 * (np.abs(x) < 1), "cos^6")
