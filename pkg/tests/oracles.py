"""Independent symbolic oracles for the closed-form targets.

Nothing here imports weylcheck.  The Weyl connection is obtained by solving
the linear system "torsion-free and nabla g = theta (x) g" for the Christoffel
symbols with sympy, curvature is differentiated symbolically, and the Chern
mean curvature of conformally flat Hermitian metrics is computed in complex
coordinates.  The resulting numbers are frozen in FROZEN below; a test checks
that the oracles still reproduce them.
"""

from __future__ import annotations

import itertools
from functools import lru_cache

import sympy as sp


def solve_weyl_connection(coords, g, theta):
    """Christoffel symbols G[k][i][j] of the torsion-free connection with nabla_i g_ab = theta_i g_ab."""
    n = len(coords)
    unknowns = {}
    for k in range(n):
        for i in range(n):
            for j in range(i, n):
                unknowns[k, i, j] = sp.Symbol(f"G_{k}_{i}_{j}")

    def gam(k, i, j):
        return unknowns[k, min(i, j), max(i, j)]

    eqs = []
    for i, a, b in itertools.product(range(n), repeat=3):
        if a > b:
            continue
        lhs = sp.diff(g[a, b], coords[i]) - sum(gam(l, i, a) * g[l, b] + gam(l, i, b) * g[a, l] for l in range(n))
        eqs.append(lhs - theta[i] * g[a, b])
    sol = sp.solve(eqs, list(unknowns.values()), dict=True)[0]
    return [[[sp.simplify(sol[gam(k, i, j)]) for j in range(n)] for i in range(n)] for k in range(n)]


def ricci_of(coords, G):
    """Ric[a][b] = tr(Z -> R(Z, d_a) d_b) with R(X, Y) = [nabla_X, nabla_Y] - nabla_[X,Y]."""
    n = len(coords)

    def riem(l, k, i, j):  # component l of R(d_i, d_j) d_k
        val = sp.diff(G[l][j][k], coords[i]) - sp.diff(G[l][i][k], coords[j])
        val += sum(G[l][i][m] * G[m][j][k] - G[l][j][m] * G[m][i][k] for m in range(n))
        return val

    return sp.Matrix(n, n, lambda a, b: sp.simplify(sum(riem(l, b, l, a) for l in range(n))))


def weyl_ricci_summary(coords, g, theta, at):
    """(eigenvalues of sym Ric^W relative to g, trace_g Ric^W) at the point ``at``."""
    G = solve_weyl_connection(coords, g, theta)
    ric = ricci_of(coords, G)
    sym = (ric + ric.T) / 2
    ginv = g.inv()
    k = sp.simplify(sum(ginv[a, b] * sym[a, b] for a in range(len(coords)) for b in range(len(coords))))
    subs = dict(zip(coords, at))
    gm = g.subs(subs)
    rel = (gm.inv() * sym.subs(subs)).applyfunc(sp.nsimplify)
    eig = sorted(float(v) for v, mult in rel.eigenvals().items() for _ in range(mult))
    return eig, k


@lru_cache(maxsize=None)
def torus4_targets():
    x = sp.symbols("x0:4", real=True)
    g = sp.eye(4)
    theta = [1, 0, 0, 0]
    return weyl_ricci_summary(x, g, theta, (0.3, 0.2, 0.1, 0.4))


@lru_cache(maxsize=None)
def hopf_s3_targets():
    t, a, b, c, lam = sp.symbols("t chi1 chi2 phi lambda", real=True)
    coords = (t, a, b, c)
    g = sp.diag(1, 1, sp.sin(a) ** 2, sp.sin(a) ** 2 * sp.sin(b) ** 2)
    theta = [lam, 0, 0, 0]
    G = solve_weyl_connection(coords, g, theta)
    ric = ricci_of(coords, G)
    sym = (ric + ric.T) / 2
    ginv = g.inv()
    k = sp.simplify(sum(ginv[i, j] * sym[i, j] for i in range(4) for j in range(4)))
    rel = sp.simplify(ginv * sym)
    return k, rel, lam


@lru_cache(maxsize=None)
def hopf_complex2_ricci_weyl():
    """Symmetric Ric^W of (|x|^{-2} delta, -2x/|x|^2) on R^4 \\ 0 (expected to vanish)."""
    x = sp.symbols("x0:4", real=True)
    r2 = sum(v**2 for v in x)
    g = sp.eye(4) / r2
    theta = [-2 * v / r2 for v in x]
    ric = ricci_of(x, solve_weyl_connection(x, g, theta))
    return sp.simplify((ric + ric.T) / 2)


def chern_mean_curvature_conformally_flat(m: int):
    """Eigenvalue of k^C for the Hermitian metric |z|^{-2} |dz|^2 on C^m \\ 0.

    For h = e^phi delta the Chern connection form is d'phi Id, so the curvature
    is d''d'phi Id and its trace against the Kaehler form in a real unitary
    frame is -(1/2) e^{-phi} (flat Laplacian of phi) Id; the normalization is
    the Gauss curvature of a conformal metric on a surface (m = 1).
    """
    x = sp.symbols(f"x0:{2 * m}", real=True)
    r2 = sum(v**2 for v in x)
    phi = -sp.log(r2)
    lap = sum(sp.diff(phi, v, 2) for v in x)
    return sp.simplify(-sp.Rational(1, 2) * sp.exp(-phi) * lap)


def gauss_curvature_round_sphere():
    """Sanity anchor for the normalization: unit sphere via stereographic chart, K = 1."""
    x, y = sp.symbols("x y", real=True)
    phi = sp.log(4 / (1 + x**2 + y**2) ** 2)
    lap = sp.diff(phi, x, 2) + sp.diff(phi, y, 2)
    return sp.simplify(-sp.Rational(1, 2) * sp.exp(-phi) * lap)


FROZEN = {
    "torus4_k": -1.5,
    "torus4_ric_w_spectrum": [-0.5, -0.5, -0.5, 0.0],
    "torus4_margin": -0.5,
    "hopf3_k": lambda lam: 6 - 1.5 * lam**2,
    "hopf3_lambda1_spectrum": [0.0, 1.5, 1.5, 1.5],
    "hopf3_lambda1_margin": 0.0,
    "hopf_complex_ric_w": 0.0,
    "kc_min_eig_computed": {2: 2.0, 3: 4.0},
    "kc_min_eig_formula": {2: 4.0, 3: 8.0},
}
