"""Reference equilibrium S* for the three-species demo fixture
(scenarios/paper_fig4_demo.json), by a fine uniform scan of
H(S) = sum_i h_i(S) - D (S_in - S) followed by brentq.
"""
import numpy as np
from scipy.optimize import brentq

D, s_in = 1.0, 0.95
species = [  # (mf, Kf, mg, Kg, D0, D1, a, b)
    (2.0, 0.2, 1.0, 0.8, 1.0, 0.5, 4.0, 1.0),
    (2.0, 0.3, 1.0, 1.2, 1.0, 0.5, 3.0, 1.0),
    (2.0, 0.4, 1.0, 1.0, 1.0, 0.5, 5.0, 1.0),
]


def X(sp, s):
    mf, kf, mg, kg, d0, d1, a, b = sp
    lam0 = kf * d0 / (mf - d0)
    if s <= lam0:
        return 0.0
    def r(x):
        p = b / (b + a * x)
        return p * mf * s / (kf + s) + (1 - p) * mg * s / (kg + s) - (p * d0 + (1 - p) * d1)
    hi = 1.0
    while r(hi) > 0:
        hi *= 2
    return brentq(r, 0.0, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps)


def h(sp, s):
    mf, kf, mg, kg, d0, d1, a, b = sp
    x = X(sp, s)
    p = b / (b + a * x)
    return (p * d0 + (1 - p) * d1) * x


H = lambda s: sum(h(sp, s) for sp in species) - D * (s_in - s)
lam0 = [sp[1] * sp[4] / (sp[0] - sp[4]) for sp in species]
lam1 = [sp[3] * sp[5] / (sp[2] - sp[5]) for sp in species]
print("lambda0", lam0, "lambda1", lam1)
l0, l1 = max(lam0), min(lam1)
print("H(lambda0~) =", repr(H(l0)))
grid = np.linspace(l0, l1, 100001)[1:-1]
vals = np.array([H(s) for s in grid])
i = np.nonzero(np.diff(np.sign(vals)))[0]
print("sign changes:", len(i))
s_star = brentq(H, grid[i[0]], grid[i[0] + 1], xtol=1e-15)
print("S* =", repr(s_star), "x* =", [repr(X(sp, s_star)) for sp in species])
