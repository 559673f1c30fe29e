import sys
sys.path.insert(0, "src")
import numpy as np
import math
from scipy.special import gamma as G
import mpmath
from fracpot.stencil import weights_1d, c_ns

s, gam, L = 0.4, 2.0, 1.0

def run(wfac):
    w = L / wfac
    def u(x):
        return np.exp(-x**2 / (2 * w**2))
    def flg(x):
        a_ = w**2 / 2
        val = G(s + 0.5) / (2 * a_**(s + 0.5)) * float(mpmath.hyp1f1(s + 0.5, 0.5, -x**2 / (4 * a_)))
        return (1 / math.pi) * w * math.sqrt(2 * math.pi) * val
    c = c_ns(1, s)
    q = lambda x: 1.0 + 0.5 * np.cos(math.pi * x)
    errs, hs = [], []
    for N in (32, 64, 128, 256):
        h = 2 * L / N
        a = weights_1d(s, gam, h, L)
        n = N - 1
        x = -L + np.arange(1, N) * h
        # dense assembly
        A = np.zeros((n, n))
        for i in range(n):
            for j in range(n):
                m = abs(i - j)
                A[i, j] = -c * a[m]
        A[np.arange(n), np.arange(n)] += q(x)
        g = np.array([flg(xx) for xx in x]) + q(x) * u(x)
        uh = np.linalg.solve(A, g)
        err = np.max(np.abs(uh - u(x)))
        errs.append(err); hs.append(h)
    errs = np.array(errs); hs = np.array(hs)
    # LSQ slope
    sl = np.polyfit(np.log(hs), np.log(errs), 1)[0]
    print(f"w=L/{wfac}: errs={['%.3e' % e for e in errs]} slope={sl:.3f}",
          "pairwise:", ["%.2f" % s_ for s_ in np.log(errs[:-1]/errs[1:])/np.log(2)])

for wf in (8, 7, 6, 5):
    run(wf)
