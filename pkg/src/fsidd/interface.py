"""Space-time interface problems: the Steklov-Poincare (SP) equation in the
common normal stress ``g`` and the two-sided Robin system in ``(g_f, g_s)``.

Both are exposed as matrix-free linear operators on flattened vectors
(slab-major, interface-dof minor, fluid block first) and solved with GMRES;
the Robin system can also be iterated directly as Schwarz waveform
relaxation (SWR).
"""

import time
from dataclasses import dataclass, field

import numpy as np

from .linsolve import KrylovReport, gmres
from .subdomain import InterfaceData
from .timegrid import TraceSeries, projection_matrix

METHODS = ("sp", "robin_gmres", "robin_swr")


@dataclass
class SwrReport:
    updates: list = field(default_factory=list)
    energies: list = field(default_factory=list)  # B^0, B^1, ...
    iterations: int = 0
    converged: bool = False


@dataclass
class CoupledSolution:
    fluid: object  # FluidHistory
    structure: object  # StructureHistory
    trace_u: TraceSeries
    trace_etadot: TraceSeries
    iface_error: float
    iface_error_projected: float


class CoupledProblem:
    """Fluid and structure solvers sharing the interface, each on its own grid.

    Interface unknowns live on the trace dofs that are not constrained by
    Dirichlet conditions on both sides at once (e.g. corners where both
    subdomains clamp the velocity).

    The SP stress lives on the coarser of the two time grids (the fluid grid
    on ties). On the finer grid, a normal stress constant in space whose
    average vanishes on every coarse slab would be seen by the fluid only as
    a pressure shift and not seen at all by the structure, so the SP
    operator would be singular.
    """

    def __init__(self, fluid, structure, grid_f, grid_s):
        if abs(grid_f.T - grid_s.T) > 1e-12 * grid_f.T:
            raise ValueError("fluid and structure grids cover different windows")
        xf = fluid.V.trace_coords()
        xs = structure.S.trace_coords()
        if xf.shape != xs.shape or not np.allclose(xf, xs, atol=1e-12 * fluid.V.mesh.diameter):
            raise ValueError("fluid and structure interface traces do not match node by node")
        self.fluid, self.structure = fluid, structure
        self.grid_f, self.grid_s = grid_f, grid_s
        self.params = fluid.params
        both = fluid.trace_constrained & structure.trace_constrained
        self.I = np.flatnonzero(~both)
        fluid.set_robin_exclusions(np.flatnonzero(both))
        structure.set_robin_exclusions(np.flatnonzero(both))
        self.nI = len(self.I)
        self.n_trace = fluid.n_trace
        self.P_fs = projection_matrix(grid_s, grid_f)  # structure grid -> fluid grid
        self.P_sf = projection_matrix(grid_f, grid_s)
        self.gram = fluid.Mg_trace[np.ix_(self.I, self.I)]
        self.sp_on_fluid = grid_f.n_slabs <= grid_s.n_slabs
        self.grid_sp = grid_f if self.sp_on_fluid else grid_s
        self.n_apply = 0

    # -- vector plumbing -------------------------------------------------
    @property
    def robin_size(self):
        return (self.grid_f.n_slabs + self.grid_s.n_slabs) * self.nI

    @property
    def sp_size(self):
        return self.grid_sp.n_slabs * self.nI

    def split_robin(self, z):
        z = np.asarray(z, dtype=float)
        if z.shape != (self.robin_size,):
            raise ValueError(f"Robin vector must have length {self.robin_size}, got {z.shape}")
        nf = self.grid_f.n_slabs * self.nI
        return z[:nf].reshape(-1, self.nI), z[nf:].reshape(-1, self.nI)

    @staticmethod
    def join(*blocks):
        return np.concatenate([np.asarray(b).ravel() for b in blocks])

    def embed(self, grid, vals):
        full = np.zeros((grid.n_slabs, self.n_trace))
        full[:, self.I] = vals
        return TraceSeries(grid, full)

    # -- Robin ------------------------------------------------------------
    def _robin_sweeps(self, gf, gs, homogeneous, recover=False, keep_history=False):
        out_s = self.structure.sweep(
            self.grid_s, InterfaceData("robin", self.embed(self.grid_s, gs)),
            homogeneous=homogeneous, keep_history=keep_history, recover=recover,
        )
        out_f = self.fluid.sweep(
            self.grid_f, InterfaceData("robin", self.embed(self.grid_f, gf)),
            homogeneous=homogeneous, keep_history=keep_history, recover=recover,
        )
        return out_f, out_s

    def robin_exchange(self, gf, gs, vel_f, vel_s):
        """New Robin data from the traces produced with data ``(gf, gs)``."""
        a = self.params.alpha_f + self.params.alpha_s
        new_f = self.P_fs @ (gs + a * vel_s)
        new_s = self.P_sf @ (gf - a * vel_f)
        return new_f, new_s

    def apply_robin(self, z):
        """``S_R z = z - R_0 z`` with zero forcing and initial data."""
        gf, gs = self.split_robin(z)
        (_, uf, _), (_, vs, _) = self._robin_sweeps(gf, gs, homogeneous=True)
        rf, rs = self.robin_exchange(gf, gs, uf.values[:, self.I], vs.values[:, self.I])
        self.n_apply += 1
        return self.join(gf - rf, gs - rs)

    def robin_rhs(self):
        zf = np.zeros((self.grid_f.n_slabs, self.nI))
        zs = np.zeros((self.grid_s.n_slabs, self.nI))
        (_, uf, _), (_, vs, _) = self._robin_sweeps(zf, zs, homogeneous=False)
        a = self.params.alpha_f + self.params.alpha_s
        return self.join(
            a * (self.P_fs @ vs.values[:, self.I]),
            -a * (self.P_sf @ uf.values[:, self.I]),
        )

    # -- Steklov-Poincare -------------------------------------------------
    def _sp_sweeps(self, g, homogeneous, keep_history=False):
        g = np.asarray(g, dtype=float).reshape(self.grid_sp.n_slabs, self.nI)
        gf, gs = (g, self.P_sf @ g) if self.sp_on_fluid else (self.P_fs @ g, g)
        out_f = self.fluid.sweep(
            self.grid_f, InterfaceData("neumann", self.embed(self.grid_f, gf)),
            homogeneous=homogeneous, keep_history=keep_history, recover=keep_history,
        )
        out_s = self.structure.sweep(
            self.grid_s, InterfaceData("neumann", self.embed(self.grid_s, gs)),
            homogeneous=homogeneous, keep_history=keep_history, recover=keep_history,
        )
        return out_f, out_s

    def sp_jump(self, uf, vs):
        """Velocity jump on the SP grid."""
        u, v = uf.values[:, self.I], vs.values[:, self.I]
        if self.sp_on_fluid:
            return u - self.P_fs @ v
        return self.P_sf @ u - v

    def apply_sp(self, g):
        """Velocity jump ``u(g) - etadot(g)`` on the interface, projected onto
        the SP grid, for zero forcing and initial data."""
        (_, uf, _), (_, vs, _) = self._sp_sweeps(g, homogeneous=True)
        self.n_apply += 1
        return self.sp_jump(uf, vs).ravel()

    def sp_rhs(self):
        (_, uf, _), (_, vs, _) = self._sp_sweeps(np.zeros(self.sp_size), homogeneous=False)
        return -self.sp_jump(uf, vs).ravel()

    # -- drivers ----------------------------------------------------------
    def solve_interface(self, method="sp", tol=1e-7, maxit=500):
        """GMRES on the SP or Robin interface system.

        Returns
        -------
        z : ndarray
            Flattened interface vector.
        report : KrylovReport
        """
        if method == "sp":
            return gmres(self.apply_sp, self.sp_rhs(), tol=tol, maxit=maxit)
        if method == "robin_gmres":
            return gmres(self.apply_robin, self.robin_rhs(), tol=tol, maxit=maxit)
        raise ValueError(f"method {method!r} is not a GMRES method")

    def robin_energy(self, gf, gs, vel_f, vel_s, sig_f, sig_s):
        """``B = (|sigma_f - alpha_s u|^2 + |-sigma_s + alpha_f etadot|^2) / (2(alpha_f + alpha_s))``,
        each term an L2(0,T; L2(Gamma)) norm on its own grid."""
        af, as_ = self.params.alpha_f, self.params.alpha_s
        ef = sig_f - as_ * vel_f
        es = -sig_s + af * vel_s
        nf = self.grid_f.steps @ np.einsum("mi,ij,mj->m", ef, self.gram, ef)
        ns = self.grid_s.steps @ np.einsum("mi,ij,mj->m", es, self.gram, es)
        return float((nf + ns) / (2.0 * (af + as_)))

    def data_energy(self, gf, gs):
        a = self.params.alpha_f + self.params.alpha_s
        nf = self.grid_f.steps @ np.einsum("mi,ij,mj->m", gf, self.gram, gf)
        ns = self.grid_s.steps @ np.einsum("mi,ij,mj->m", gs, self.gram, gs)
        return float((nf + ns) / (2.0 * a))

    def swr_solve(self, tol=1e-7, maxit=200, z0=None, homogeneous=False, callback=None):
        """Jacobi Schwarz waveform relaxation on the Robin data.

        Both subdomains use the previous iterate's data. Stops once
        ``||z^k - z^{k-1}|| <= tol * max(||z^k||, ||z^0||)`` (absolute ``tol``
        if both vanish), so runs whose limit is zero still terminate.
        ``report.energies[k]`` is ``B^k``; ``B^0`` is the data energy of ``z0``.
        """
        z = np.zeros(self.robin_size) if z0 is None else np.array(z0, dtype=float)
        gf, gs = self.split_robin(z)
        norm0 = np.linalg.norm(z)
        report = SwrReport(energies=[self.data_energy(gf, gs)])
        for k in range(1, maxit + 1):
            (_, uf, sf), (_, vs, ss) = self._robin_sweeps(gf, gs, homogeneous, recover=True)
            vel_f, vel_s = uf.values[:, self.I], vs.values[:, self.I]
            report.energies.append(
                self.robin_energy(gf, gs, vel_f, vel_s, sf.values[:, self.I], ss.values[:, self.I])
            )
            nf, ns = self.robin_exchange(gf, gs, vel_f, vel_s)
            z_new = self.join(nf, ns)
            upd = np.linalg.norm(z_new - z)
            scale = max(np.linalg.norm(z_new), norm0)
            rel = upd / scale if scale > 0 else upd
            report.updates.append(float(rel))
            report.iterations = k
            if callback is not None:
                callback(k, rel)
            z = z_new
            gf, gs = nf, ns
            if rel <= tol:
                report.converged = True
                break
        return z, report

    # -- finalization -----------------------------------------------------
    def finalize(self, z, method):
        """Full-data sweeps with the solved interface data."""
        if method == "sp":
            (hf, uf, _), (hs, vs, _) = self._sp_sweeps(z, homogeneous=False, keep_history=True)
        else:
            gf, gs = self.split_robin(z)
            (hf, uf, _), (hs, vs, _) = self._robin_sweeps(
                gf, gs, homogeneous=False, recover=True, keep_history=True
            )
        return CoupledSolution(
            hf, hs, uf, vs,
            self.interface_error(uf, vs),
            self.interface_error(uf, vs, projected=True),
        )

    def interface_error(self, trace_u, trace_v, projected=False):
        """``1/2 ||u - etadot||^2_Gamma`` at the final time, over the coupled
        trace dofs (nodes clamped on both sides carry no coupling).

        By default the last fluid and structure states are compared. With
        ``projected=True`` the structure trace is first projected onto the
        fluid grid and the last fluid slab is used.
        """
        if projected:
            v = (self.P_fs @ trace_v.values[:, self.I])[-1]
        else:
            v = trace_v.values[-1, self.I]
        d = trace_u.values[-1, self.I] - v
        return float(0.5 * d @ self.gram @ d)

    def solve(self, method="sp", tol=1e-7, maxit=500):
        """Solve the coupled problem; returns (CoupledSolution, report, wall seconds)."""
        if method not in METHODS:
            raise ValueError(f"unknown method {method!r}")
        t0 = time.perf_counter()
        if method == "robin_swr":
            z, report = self.swr_solve(tol=tol, maxit=maxit)
        else:
            z, report = self.solve_interface(method, tol=tol, maxit=maxit)
        sol = self.finalize(z, method)
        return sol, report, time.perf_counter() - t0, z


def iterations_of(report):
    return report.iterations


__all__ = ["CoupledProblem", "CoupledSolution", "KrylovReport", "SwrReport", "METHODS"]
