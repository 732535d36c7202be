"""Quadrature rules on the reference triangle and interval.

Reference triangle: vertices (0,0), (1,0), (0,1); weights sum to its
area 1/2. Points are returned as barycentric coordinates (n, 3).
"""

from functools import lru_cache

import numpy as np
from scipy.special import roots_jacobi


def _orbit3(a, w):
    b = 1.0 - 2.0 * a
    return [(b, a, a), (a, b, a), (a, a, b)], [w] * 3


def _orbit1(w):
    return [(1 / 3, 1 / 3, 1 / 3)], [w]


# symmetric rules (Dunavant); weights normalised to 1 over the triangle
_SYMMETRIC = {
    1: [_orbit1(1.0)],
    2: [_orbit3(1 / 6, 1 / 3)],
    4: [
        _orbit3(0.445948490915965, 0.223381589678011),
        _orbit3(0.091576213509771, 0.109951743655322),
    ],
    5: [
        _orbit1(0.225),
        _orbit3(0.470142064105115, 0.132394152788506),
        _orbit3(0.101286507323456, 0.125939180544827),
    ],
}


@lru_cache(maxsize=None)
def collapsed_gauss_rule(degree):
    """Conical product Gauss-Jacobi rule exact for polynomials of ``degree``."""
    n = degree // 2 + 1
    xg, wg = np.polynomial.legendre.leggauss(n)
    xj, wj = roots_jacobi(n, 1.0, 0.0)
    # Duffy map: s in (0,1) along the collapsed direction
    s = 0.5 * (xj + 1.0)
    ws = 0.25 * wj  # includes the Jacobian (1 - s) through alpha=1
    r = 0.5 * (xg + 1.0)
    wr = 0.5 * wg
    S, R = np.meshgrid(s, r, indexing="ij")
    x = R * (1.0 - S)
    y = S
    w = np.outer(ws, wr).ravel()
    bary = np.column_stack([1.0 - x.ravel() - y.ravel(), x.ravel(), y.ravel()])
    return bary, w


@lru_cache(maxsize=None)
def triangle_rule(degree):
    """Triangle rule exact to ``degree``.

    Symmetric rules are used up to degree 5; above that a collapsed
    Gauss-Jacobi product rule.
    """
    degree = max(int(degree), 1)
    for d in sorted(_SYMMETRIC):
        if d >= degree:
            pts, ws = [], []
            for p, w in _SYMMETRIC[d]:
                pts += p
                ws += w
            return np.array(pts), 0.5 * np.array(ws)
    return collapsed_gauss_rule(degree)


@lru_cache(maxsize=None)
def line_rule(degree):
    """Gauss-Legendre on (0, 1): points s and weights summing to 1."""
    n = max(int(degree), 1) // 2 + 1
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (x + 1.0), 0.5 * w
