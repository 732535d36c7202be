"""Backward-Euler sweeps over a whole time window for the fluid (Stokes)
and structure (linear elastodynamics) subproblems.

Each sweep takes interface data as a piecewise-constant series on its own
time grid, either as a normal stress (``neumann``) or as Robin data
``alpha * velocity + sigma n`` (``robin``), and returns the interface
velocity trace and the recovered normal stress, both as series.
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as la
import scipy.sparse as sp

from .fem import (
    apply_essential_bc,
    assemble_boundary_load,
    assemble_form,
    assemble_load,
    interpolate,
)
from .linsolve import factorize
from .timegrid import TraceSeries


@dataclass(frozen=True)
class MaterialParams:
    rho_f: float = 1.0
    nu_f: float = 1.0
    rho_s: float = 1.0
    nu_s: float = 1.0
    lam: float = 1.0
    alpha_f: float = 1.0
    alpha_s: float = 1.0

    def __post_init__(self):
        for name in ("rho_f", "nu_f", "rho_s", "nu_s", "lam"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.alpha_f < 0 or self.alpha_s < 0:
            raise ValueError("Robin parameters must be nonnegative")


@dataclass
class InterfaceData:
    """Interface data for one sweep, on the sweeping subdomain's grid."""

    mode: str
    series: TraceSeries

    def __post_init__(self):
        if self.mode not in ("neumann", "robin"):
            raise ValueError(f"unknown interface mode {self.mode!r}")


@dataclass
class SubdomainData:
    """Forcing, boundary and initial data. Any entry may be None (zero).

    Callables take ``(x, y, t)`` and return arrays of shape ``x.shape + (2,)``.
    """

    forcing: object = None
    dirichlet: object = None
    neumann: dict = field(default_factory=dict)
    initial: object = None
    initial_rate: object = None


@dataclass
class FluidHistory:
    grid: object
    u: np.ndarray  # (M + 1, nV), row 0 is the initial state
    p: np.ndarray  # (M, nQ)


@dataclass
class StructureHistory:
    grid: object
    eta: np.ndarray  # (M + 1, nS)
    etadot: np.ndarray  # (M + 1, nS)


class _Subdomain:
    """Shared interface bookkeeping for both subdomain solvers."""

    # sign of the interface data in sigma n: fluid +data, structure -data
    data_sign = 1.0

    def _setup_trace(self, space, dirichlet_tags):
        self.trace = space.trace_dofs()
        self.n_trace = len(self.trace)
        Mg = assemble_form(space, space, "iface_mass", tag=space.interface_tag).tocsr()
        self.Mg = Mg
        self.Mg_cols = Mg[:, self.trace].tocsr()
        self.Mg_trace = Mg[self.trace][:, self.trace].toarray()
        dir_dofs = set(space.boundary_dofs(dirichlet_tags).tolist())
        self.trace_constrained = np.array([d in dir_dofs for d in self.trace])
        F = ~self.trace_constrained
        self._F = np.flatnonzero(F)
        self._C = np.flatnonzero(self.trace_constrained)
        self._MFF = la.cho_factor(self.Mg_trace[np.ix_(self._F, self._F)])
        self._MFC = self.Mg_trace[np.ix_(self._F, self._C)]
        self.set_robin_exclusions([])

    def set_robin_exclusions(self, positions):
        """Drop trace positions from the Robin boundary mass.

        Used for nodes clamped on both sides of the interface: they carry
        no interface data, and keeping their (prescribed) velocity in the
        Robin term would make the Robin and SP formulations differ there.
        """
        keep = np.ones(self.space.ndofs)
        keep[self.trace[np.asarray(positions, dtype=int)]] = 0.0
        D = sp.diags(keep)
        self.Mg_robin = (D @ self.Mg @ D).tocsr()
        self._alpha_mask = keep[self.trace]
        self._systems = {}

    def recover_from_residual(self, residual_trace, data, velocity_trace, alpha):
        """Consistent normal stress on the interface.

        On trace nodes that are free for this subdomain, ``M_Gamma sigma``
        equals the interior weak-form residual. On nodes carrying a
        Dirichlet condition the residual is not an equation, and sigma is
        closed by the interface condition itself.
        """
        sigma = np.empty(self.n_trace)
        C, F = self._C, self._F
        sigma[C] = self.data_sign * data[C] - alpha * self._alpha_mask[C] * velocity_trace[C]
        sigma[F] = la.cho_solve(self._MFF, residual_trace[F] - self._MFC @ sigma[C])
        return sigma


class FluidSolver(_Subdomain):
    """Stokes on a fixed mesh with Taylor-Hood or MINI velocity/pressure pair.

    The slab system ``[rho/dt M + K + alpha M_Gamma, -B^T; -B, 0]`` is
    factorized once per distinct step size and reused for every slab
    and every sweep.
    """

    data_sign = 1.0

    def __init__(self, V, Q, params, dirichlet_tags, data=None):
        self.V, self.Q = V, Q
        self.params = params
        self.data = data or SubdomainData()
        self.dirichlet_tags = tuple(dirichlet_tags)
        self.M = assemble_form(V, V, "mass", params.rho_f).tocsr()
        self.K = assemble_form(V, V, "strain", 2.0 * params.nu_f).tocsr()
        self.B = assemble_form(V, Q, "div").tocsr()
        self.nV, self.nQ = V.ndofs, Q.ndofs
        self.dir_dofs = V.boundary_dofs(self.dirichlet_tags)
        self.space = V
        self._setup_trace(V, self.dirichlet_tags)
        self._trace_rows = (
            self.M[self.trace].tocsr(),
            self.K[self.trace].tocsr(),
            self.B.T.tocsr()[self.trace].tocsr(),
        )
        self._systems = {}

    def system(self, dt, alpha):
        key = (round(dt, 15), float(alpha))
        if key not in self._systems:
            A = sp.bmat(
                [[self.M / dt + self.K + alpha * self.Mg_robin, -self.B.T], [-self.B, None]],
                format="csr",
            )
            Ac, _ = apply_essential_bc(A, np.zeros(A.shape[0]), self.dir_dofs, 0.0)
            fac = factorize(Ac, name=f"fluid slab matrix (dt={dt:g}, alpha={alpha:g})")
            self._systems[key] = (fac, A[:, self.dir_dofs].tocsc())
        return self._systems[key]

    def initial_state(self, homogeneous=False):
        if homogeneous or self.data.initial is None:
            return np.zeros(self.nV)
        return interpolate(self.V, self.data.initial, 0.0)

    def _loads(self, t):
        f = np.zeros(self.nV)
        if self.data.forcing is not None:
            f += assemble_load(self.V, self.data.forcing, t)
        for tag, g in self.data.neumann.items():
            f += assemble_boundary_load(self.V, tag, g, t)
        return f

    def dirichlet_values(self, t):
        if self.data.dirichlet is None:
            return np.zeros(len(self.dir_dofs))
        return interpolate(self.V, self.data.dirichlet, t)[self.dir_dofs]

    def sweep(self, grid, idata=None, homogeneous=False, keep_history=True, recover=True):
        """Solve all slabs of ``grid``.

        Parameters
        ----------
        idata : InterfaceData or None
            None means zero Neumann data on the interface.
        homogeneous : bool
            Drop forcing, boundary and initial data (operator mode).

        Returns
        -------
        history : FluidHistory or None
        trace_u : TraceSeries
        trace_stress : TraceSeries or None
        """
        alpha = self.params.alpha_f if (idata is not None and idata.mode == "robin") else 0.0
        if idata is not None and not idata.series.grid.same_as(grid):
            raise ValueError("interface data is not on the sweep grid")
        M_ = grid.n_slabs
        u = self.initial_state(homogeneous)
        us = [u] if keep_history else None
        ps = [] if keep_history else None
        tr_u = np.zeros((M_, self.n_trace))
        tr_s = np.zeros((M_, self.n_trace)) if recover else None
        Mtr, Ktr, BTtr = self._trace_rows
        for m in range(M_):
            dt = grid.steps[m]
            t = grid.times[m + 1]
            fac, A_fd = self.system(dt, alpha)
            rhs = np.zeros(self.nV + self.nQ)
            rhs[: self.nV] = self.M @ u / dt
            loads = None
            if not homogeneous:
                loads = self._loads(t)
                rhs[: self.nV] += loads
            d = np.zeros(self.n_trace) if idata is None else idata.series.values[m]
            if idata is not None:
                rhs[: self.nV] += self.Mg_cols @ d
            if not homogeneous and self.data.dirichlet is not None:
                gD = self.dirichlet_values(t)
                rhs -= A_fd @ gD
                rhs[self.dir_dofs] = gD
            else:
                rhs[self.dir_dofs] = 0.0
            x = fac.solve(rhs)
            u_new, p = x[: self.nV], x[self.nV:]
            tr_u[m] = u_new[self.trace]
            if recover:
                res = Mtr @ (u_new - u) / dt + Ktr @ u_new - BTtr @ p
                if loads is not None:
                    res -= loads[self.trace]
                tr_s[m] = self.recover_from_residual(res, d, tr_u[m], alpha)
            u = u_new
            if keep_history:
                us.append(u)
                ps.append(p)
        hist = FluidHistory(grid, np.array(us), np.array(ps)) if keep_history else None
        return hist, TraceSeries(grid, tr_u), (TraceSeries(grid, tr_s) if recover else None)

    def kinetic_energy(self, u):
        return float(u @ (self.M @ u))


class StructureSolver(_Subdomain):
    """Linear elastodynamics with the velocity as auxiliary unknown.

    The displacement is eliminated through ``eta^n = eta^{n-1} + dt etadot^n``,
    leaving the SPD slab system ``rho_s/dt M + dt K_s + alpha M_Gamma`` in
    the velocity.
    """

    data_sign = -1.0

    def __init__(self, S, params, dirichlet_tags, data=None):
        self.S = S
        self.params = params
        self.data = data or SubdomainData()
        self.dirichlet_tags = tuple(dirichlet_tags)
        self.M = assemble_form(S, S, "mass", params.rho_s).tocsr()
        self.K = (
            assemble_form(S, S, "strain", 2.0 * params.nu_s)
            + assemble_form(S, S, "divdiv", params.lam)
        ).tocsr()
        self.n = S.ndofs
        self.dir_dofs = S.boundary_dofs(self.dirichlet_tags)
        self.space = S
        self._setup_trace(S, self.dirichlet_tags)
        self._trace_rows = (self.M[self.trace].tocsr(), self.K[self.trace].tocsr())
        self._systems = {}

    def system(self, dt, alpha):
        key = (round(dt, 15), float(alpha))
        if key not in self._systems:
            A = (self.M / dt + dt * self.K + alpha * self.Mg_robin).tocsr()
            Ac, _ = apply_essential_bc(A, np.zeros(self.n), self.dir_dofs, 0.0)
            fac = factorize(Ac, name=f"structure slab matrix (dt={dt:g}, alpha={alpha:g})")
            self._systems[key] = (fac, A[:, self.dir_dofs].tocsc())
        return self._systems[key]

    def initial_state(self, homogeneous=False):
        eta = np.zeros(self.n)
        etadot = np.zeros(self.n)
        if not homogeneous:
            if self.data.initial is not None:
                eta = interpolate(self.S, self.data.initial, 0.0)
            if self.data.initial_rate is not None:
                etadot = interpolate(self.S, self.data.initial_rate, 0.0)
        return eta, etadot

    def _loads(self, t):
        f = np.zeros(self.n)
        if self.data.forcing is not None:
            f += assemble_load(self.S, self.data.forcing, t)
        for tag, g in self.data.neumann.items():
            f += assemble_boundary_load(self.S, tag, g, t)
        return f

    def dirichlet_displacement(self, t):
        if self.data.dirichlet is None:
            return np.zeros(len(self.dir_dofs))
        return interpolate(self.S, self.data.dirichlet, t)[self.dir_dofs]

    def sweep(self, grid, idata=None, homogeneous=False, keep_history=True, recover=True):
        """Solve all slabs of ``grid``; see :meth:`FluidSolver.sweep`.

        ``idata`` carries ``g`` with ``sigma_s n_s = -g`` (neumann) or
        ``-alpha_s etadot - sigma_s n_s = g`` (robin).
        """
        alpha = self.params.alpha_s if (idata is not None and idata.mode == "robin") else 0.0
        if idata is not None and not idata.series.grid.same_as(grid):
            raise ValueError("interface data is not on the sweep grid")
        M_ = grid.n_slabs
        eta, etadot = self.initial_state(homogeneous)
        etas = [eta] if keep_history else None
        rates = [etadot] if keep_history else None
        tr_v = np.zeros((M_, self.n_trace))
        tr_s = np.zeros((M_, self.n_trace)) if recover else None
        Mtr, Ktr = self._trace_rows
        for n in range(M_):
            dt = grid.steps[n]
            t = grid.times[n + 1]
            fac, A_fd = self.system(dt, alpha)
            rhs = self.M @ etadot / dt - self.K @ eta
            loads = None
            if not homogeneous:
                loads = self._loads(t)
                rhs += loads
            d = np.zeros(self.n_trace) if idata is None else idata.series.values[n]
            if idata is not None:
                rhs -= self.Mg_cols @ d
            if not homogeneous and self.data.dirichlet is not None:
                gD = (self.dirichlet_displacement(t) - eta[self.dir_dofs]) / dt
                rhs -= A_fd @ gD
                rhs[self.dir_dofs] = gD
            else:
                rhs[self.dir_dofs] = 0.0
            v_new = fac.solve(rhs)
            eta_new = eta + dt * v_new
            tr_v[n] = v_new[self.trace]
            if recover:
                res = Mtr @ (v_new - etadot) / dt + Ktr @ eta_new
                if loads is not None:
                    res -= loads[self.trace]
                tr_s[n] = self.recover_from_residual(res, d, tr_v[n], alpha)
            eta, etadot = eta_new, v_new
            if keep_history:
                etas.append(eta)
                rates.append(etadot)
        hist = StructureHistory(grid, np.array(etas), np.array(rates)) if keep_history else None
        return hist, TraceSeries(grid, tr_v), (TraceSeries(grid, tr_s) if recover else None)

    def energy(self, eta, etadot):
        """``rho_s |etadot|^2 + 2 nu_s |D eta|^2 + lam |div eta|^2``."""
        return float(etadot @ (self.M @ etadot) + eta @ (self.K @ eta))


def fluid_sweep(solver, grid, idata=None, homogeneous=False):
    return solver.sweep(grid, idata, homogeneous)


def structure_sweep(solver, grid, idata=None, homogeneous=False):
    return solver.sweep(grid, idata, homogeneous)
