"""Time partitions, piecewise-constant interface series and the L2
projections that exchange them between nonconforming grids."""

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp


@dataclass(frozen=True, eq=False)
class TimeGrid:
    """Partition ``0 = t0 < t1 < ... < tM = T`` with slabs ``(t_{m-1}, t_m]``."""

    times: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        if t.ndim != 1 or len(t) < 2:
            raise ValueError("a time grid needs at least two points")
        if t[0] != 0.0:
            raise ValueError("time grids start at 0")
        if np.any(np.diff(t) <= 0.0):
            raise ValueError("time points must be strictly increasing")
        object.__setattr__(self, "times", t)

    @property
    def T(self):
        return float(self.times[-1])

    @property
    def n_slabs(self):
        return len(self.times) - 1

    @property
    def steps(self):
        return np.diff(self.times)

    def slab(self, m):
        """Endpoints of slab ``m`` (0-based)."""
        return float(self.times[m]), float(self.times[m + 1])

    def same_as(self, other):
        return self.n_slabs == other.n_slabs and np.array_equal(self.times, other.times)

    def __repr__(self):
        return f"TimeGrid(T={self.T:g}, M={self.n_slabs})"


def make_uniform_grid(T, M):
    if not T > 0:
        raise ValueError("T must be positive")
    if int(M) < 1:
        raise ValueError("need at least one slab")
    M = int(M)
    times = T * np.arange(M + 1) / M
    times[-1] = T
    return TimeGrid(times)


def grid_from_step(T, dt):
    """Uniform grid whose step is ``dt``; ``dt`` must divide ``T``."""
    M = int(round(T / dt))
    if M < 1 or abs(M * dt - T) > 1e-9 * T:
        raise ValueError(f"time step {dt} does not divide T={T}")
    return make_uniform_grid(T, M)


def overlap(a, b):
    """Length of the intersection of two slabs ``(a0, a1]`` and ``(b0, b1]``."""
    return max(0.0, min(a[1], b[1]) - max(a[0], b[0]))


def projection_matrix(source, target):
    """Sparse matrix P with ``P[n, l] = |J_target^n cap J_source^l| / |J_target^n|``."""
    if abs(source.T - target.T) > 1e-12 * max(source.T, target.T):
        raise ValueError(f"grids cover different windows ({source.T} vs {target.T})")
    ts, tt = source.times, target.times
    rows, cols, vals = [], [], []
    i = j = 0
    while i < source.n_slabs and j < target.n_slabs:
        w = overlap((ts[i], ts[i + 1]), (tt[j], tt[j + 1]))
        if w > 0.0:
            rows.append(j)
            cols.append(i)
            vals.append(w / (tt[j + 1] - tt[j]))
        if ts[i + 1] < tt[j + 1]:
            i += 1
        elif tt[j + 1] < ts[i + 1]:
            j += 1
        else:
            i += 1
            j += 1
    return sp.csr_matrix((vals, (rows, cols)), shape=(target.n_slabs, source.n_slabs))


@dataclass(frozen=True, eq=False)
class TraceSeries:
    """Interface data constant on each slab: ``values[m]`` on slab ``m``."""

    grid: TimeGrid
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 2 or v.shape[0] != self.grid.n_slabs:
            raise ValueError(
                f"series needs shape (n_slabs={self.grid.n_slabs}, ndofs), got {v.shape}"
            )
        object.__setattr__(self, "values", v)

    @property
    def ndofs(self):
        return self.values.shape[1]

    @classmethod
    def zeros(cls, grid, ndofs):
        return cls(grid, np.zeros((grid.n_slabs, ndofs)))

    def integral(self):
        """Time integral per dof."""
        return self.grid.steps @ self.values

    def norm(self, space_gram=None):
        """L2(0,T; W) norm, with W's inner product given by ``space_gram``."""
        v = self.values
        if space_gram is None:
            sq = np.sum(v * v, axis=1)
        else:
            sq = np.einsum("mi,mi->m", v, (space_gram @ v.T).T)
        return float(np.sqrt(self.grid.steps @ sq))

    def __add__(self, other):
        _check_same(self, other)
        return TraceSeries(self.grid, self.values + other.values)

    def __sub__(self, other):
        _check_same(self, other)
        return TraceSeries(self.grid, self.values - other.values)

    def __mul__(self, a):
        return TraceSeries(self.grid, a * self.values)

    __rmul__ = __mul__


def _check_same(a, b):
    if not a.grid.same_as(b.grid):
        raise ValueError("series live on different time grids")


def project(series, target):
    """L2 projection of a piecewise-constant series onto ``target``'s slabs."""
    if series.grid.same_as(target):
        return TraceSeries(target, series.values.copy())
    P = projection_matrix(series.grid, target)
    return TraceSeries(target, P @ series.values)
