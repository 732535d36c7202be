"""Sparse direct factorization and matrix-free GMRES."""

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla


class SingularOperatorError(RuntimeError):
    pass


class Factorization:
    """Reusable sparse LU factors (SuperLU) of a square operator.

    A pivot smaller than ``rel_pivot_tol`` times the largest one is taken
    as numerical singularity (e.g. an undetermined pressure constant).
    """

    def __init__(self, op, name="operator", rel_pivot_tol=1e-13):
        A = sp.csc_matrix(op)
        if A.shape[0] != A.shape[1]:
            raise ValueError(f"{name}: operator is not square {A.shape}")
        self.name = name
        self.shape = A.shape
        try:
            self._lu = spla.splu(A)
        except RuntimeError as exc:
            raise SingularOperatorError(f"{name}: {exc}") from exc
        diag = np.abs(self._lu.U.diagonal())
        self.min_pivot = float(diag.min()) if len(diag) else 0.0
        if not np.all(np.isfinite(diag)) or self.min_pivot == 0.0:
            raise SingularOperatorError(f"{name}: zero pivot in LU factorization")
        if self.min_pivot < rel_pivot_tol * diag.max():
            raise SingularOperatorError(
                f"{name}: numerically singular (pivot ratio {self.min_pivot / diag.max():.1e})"
            )

    def solve(self, b):
        return self._lu.solve(np.asarray(b, dtype=float))


def factorize(op, name="operator", rel_pivot_tol=1e-13):
    return Factorization(op, name, rel_pivot_tol)


@dataclass
class KrylovReport:
    iterations: int = 0
    residuals: list = field(default_factory=list)
    converged: bool = False
    breakdown: bool = False  # operator singular on the Krylov space


def gmres(apply, rhs, tol=1e-7, maxit=500, callback=None):
    """Full (unrestarted) GMRES from a zero initial guess.

    Arnoldi uses modified Gram-Schmidt with one reorthogonalization pass.
    Stops once ``||r_k|| <= tol * ||r_0||``. ``residuals`` holds the
    relative residual history, starting with 1.0.

    An invariant Krylov space on which the operator is singular stops the
    iteration with ``report.breakdown`` set and ``converged`` false; the
    returned iterate is the least-squares one from the previous step.

    Returns
    -------
    x : ndarray
    report : KrylovReport
    """
    b = np.asarray(rhs, dtype=float)
    n = b.size
    report = KrylovReport(residuals=[1.0])
    beta = np.linalg.norm(b)
    if beta == 0.0:
        report.converged = True
        report.residuals = [0.0]
        return np.zeros(n), report
    if not np.isfinite(beta):
        raise ValueError("right-hand side is not finite")

    m = min(maxit, n + 2)
    V = [b / beta]
    H = np.zeros((m + 1, m))
    cs = np.zeros(m)
    sn = np.zeros(m)
    g = np.zeros(m + 1)
    g[0] = beta
    k = 0
    for j in range(m):
        w = np.asarray(apply(V[j]), dtype=float).copy()
        col_norm = np.linalg.norm(w)
        for _ in range(2):
            for i in range(j + 1):
                h = V[i] @ w
                H[i, j] += h
                w -= h * V[i]
        H[j + 1, j] = np.linalg.norm(w)
        for i in range(j):
            a, c = H[i, j], H[i + 1, j]
            H[i, j] = cs[i] * a + sn[i] * c
            H[i + 1, j] = -sn[i] * a + cs[i] * c
        hn = np.hypot(H[j, j], H[j + 1, j])
        breakdown = H[j + 1, j] <= 1e-14 * hn if hn > 0 else True
        if breakdown and hn <= 1e-12 * col_norm:
            report.breakdown = True
            break
        if hn > 0:
            cs[j], sn[j] = H[j, j] / hn, H[j + 1, j] / hn
        else:
            cs[j], sn[j] = 1.0, 0.0
        hnext = H[j + 1, j]
        H[j, j] = cs[j] * H[j, j] + sn[j] * H[j + 1, j]
        H[j + 1, j] = 0.0
        g[j + 1] = -sn[j] * g[j]
        g[j] = cs[j] * g[j]
        k = j + 1
        rel = abs(g[j + 1]) / beta
        report.residuals.append(float(rel))
        if callback is not None:
            callback(k, rel)
        if rel <= tol or breakdown:
            break
        V.append(w / hnext)
    y = np.linalg.solve(np.triu(H[:k, :k]), g[:k]) if k else np.zeros(0)
    x = np.zeros(n)
    for i in range(k):
        x += y[i] * V[i]
    report.iterations = k
    report.converged = report.residuals[-1] <= tol
    return x, report
