"""The two experiments (manufactured solution and a 2D hemodynamics
channel) and convergence studies built on them."""

import math
from dataclasses import dataclass, field

import numpy as np

from ..fem import FeSpace, error_norms
from ..interface import CoupledProblem
from ..mesh import build_structured_mesh
from ..subdomain import FluidSolver, MaterialParams, StructureSolver, SubdomainData
from ..timegrid import grid_from_step
from .mms import MmsExact

IFACE = "Gamma_interface"
ELEMENT_KINDS = {
    # (fluid velocity, fluid pressure, structure)
    "taylor_hood_p2": ("P2", "P1", "P2"),
    "mini_p1": ("P1_bubble", "P1", "P1"),
}
HEMO_MONITORS = (1.5, 3.0, 4.5)


@dataclass
class ErrorReport:
    """Errors at the final time plus solver effort.

    Error entries are NaN for cases without an exact solution.
    """

    h: float
    dt_f: float
    dt_s: float
    method: str
    alpha_f: float
    alpha_s: float
    err_u_L2: float = math.nan
    err_u_H1: float = math.nan
    err_p_L2: float = math.nan
    err_eta_L2: float = math.nan
    err_eta_H1: float = math.nan
    iters: int = 0
    wall_s: float = 0.0
    iface_err: float = math.nan
    iface_err_projected: float = math.nan
    converged: bool = True
    residuals: list = field(default_factory=list, repr=False)

    CSV_FIELDS = (
        "h", "dt_f", "dt_s", "method", "alpha_f", "alpha_s", "err_u_L2", "err_u_H1",
        "err_p_L2", "err_eta_L2", "err_eta_H1", "iters", "wall_s", "iface_err",
    )

    def row(self):
        return {k: getattr(self, k) for k in self.CSV_FIELDS}


def _n_cells(length, h):
    n = length / h
    if abs(n - round(n)) > 1e-8 * n or round(n) < 1:
        raise ValueError(f"mesh size {h} does not divide length {length}")
    return int(round(n))


def _spaces(element, mesh_f, mesh_s):
    kv, kp, ks = ELEMENT_KINDS[element]
    return FeSpace(mesh_f, kv, 2), FeSpace(mesh_f, kp, 1), FeSpace(mesh_s, ks, 2)


def build_mms_problem(config, params=None):
    """Coupled manufactured-solution problem for ``config``.

    Returns
    -------
    problem : CoupledProblem
    exact : MmsExact
    """
    params = params or MaterialParams(alpha_f=config.alpha_f, alpha_s=config.alpha_s)
    exact = MmsExact.from_params(params)
    n = _n_cells(1.0, config.h)
    mesh_f = build_structured_mesh((0, 0, 1, 1), n, n, {"top": IFACE})
    mesh_s = build_structured_mesh((0, 1, 1, 2), n, n, {"bottom": IFACE})
    V, Q, S = _spaces(config.element, mesh_f, mesh_s)
    fdata = SubdomainData(forcing=exact.f_f, dirichlet=exact.u, initial=exact.u)
    sdata = SubdomainData(
        forcing=exact.f_s, dirichlet=exact.eta, initial=exact.eta, initial_rate=exact.etadot
    )
    fluid = FluidSolver(V, Q, params, ("left", "right", "bottom"), fdata)
    structure = StructureSolver(S, params, ("left", "right", "top"), sdata)
    grid_f = grid_from_step(config.T, config.dt_f)
    grid_s = grid_from_step(config.T, config.dt_s)
    return CoupledProblem(fluid, structure, grid_f, grid_s), exact


def mms_errors(problem, solution, exact):
    T = problem.grid_f.T
    V, Q, S = problem.fluid.V, problem.fluid.Q, problem.structure.S
    u = solution.fluid.u[-1]
    p = solution.fluid.p[-1]
    eta = solution.structure.eta[-1]
    return {
        "err_u_L2": error_norms(V, u, exact.u, "L2", T),
        "err_u_H1": error_norms(V, u, exact.grad_u, "H1_semi", T),
        "err_p_L2": error_norms(Q, p, exact.p, "L2", T),
        "err_eta_L2": error_norms(S, eta, exact.eta, "L2", T),
        "err_eta_H1": error_norms(S, eta, exact.grad_eta, "H1_semi", T),
    }


def _report(config, sol, report, wall):
    if hasattr(report, "residuals") and report.residuals:
        hist = list(report.residuals)
    else:
        hist = list(getattr(report, "updates", []))
    return ErrorReport(
        h=config.h, dt_f=config.dt_f, dt_s=config.dt_s, method=config.method,
        alpha_f=config.alpha_f, alpha_s=config.alpha_s,
        iters=report.iterations, wall_s=wall,
        iface_err=sol.iface_error, iface_err_projected=sol.iface_error_projected,
        converged=report.converged, residuals=hist,
    )


def run_mms(config, return_solution=False):
    """Run the manufactured-solution case; returns an ErrorReport."""
    if config.case != "mms":
        raise ValueError("run_mms needs case='mms'")
    problem, exact = build_mms_problem(config)
    sol, report, wall, _ = problem.solve(config.method, tol=config.tol, maxit=config.maxit)
    rep = _report(config, sol, report, wall)
    for k, v in mms_errors(problem, sol, exact).items():
        setattr(rep, k, v)
    if return_solution:
        return rep, problem, sol
    return rep


# -- hemodynamics ---------------------------------------------------------

HEMO_PARAMS = dict(rho_f=1.0, nu_f=0.035, rho_s=1.1, E=3e6, poisson=0.3)


def lame_from_young(E, poisson):
    """``(nu_s, lam)`` from Young's modulus and Poisson ratio."""
    lam = poisson * E / ((1 - 2 * poisson) * (1 + poisson))
    mu = E / (2 * (1 + poisson))
    return mu, lam


def inlet_stress(t, amplitude=1e3, period=0.025):
    """Prescribed inlet traction ``(-A (1 - cos(2 pi t / period)), 0)`` for
    ``t <= period``, zero afterwards."""
    return np.array([-amplitude * (1 - math.cos(2 * math.pi * t / period)) if t <= period else 0.0, 0.0])


def hemo_params(config):
    mu, lam = lame_from_young(HEMO_PARAMS["E"], HEMO_PARAMS["poisson"])
    return MaterialParams(
        rho_f=HEMO_PARAMS["rho_f"], nu_f=HEMO_PARAMS["nu_f"], rho_s=HEMO_PARAMS["rho_s"],
        nu_s=mu, lam=lam, alpha_f=config.alpha_f, alpha_s=config.alpha_s,
    )


def build_hemo_problem(config):
    """Channel ``(0,6) x (0,1)`` under a thin wall ``(0,6) x (1,1.1)``."""
    params = hemo_params(config)
    nx = _n_cells(6.0, config.hx)
    ny_f = _n_cells(1.0, config.h)
    ny_s = _n_cells(0.1, config.h)
    mesh_f = build_structured_mesh(
        (0, 0, 6, 1), nx, ny_f, {"top": IFACE, "left": "inlet", "right": "outlet"}
    )
    mesh_s = build_structured_mesh((0, 1, 6, 1.1), nx, ny_s, {"bottom": IFACE})
    V, Q, S = _spaces(config.element, mesh_f, mesh_s)

    def b(x, y, t):
        v = inlet_stress(t)
        return np.broadcast_to(v, np.shape(x) + (2,))

    fluid = FluidSolver(V, Q, params, ("bottom",), SubdomainData(neumann={"inlet": b}))
    structure = StructureSolver(S, params, ("left", "right"), SubdomainData())
    grid_f = grid_from_step(config.T, config.dt_f)
    grid_s = grid_from_step(config.T, config.dt_s)
    return CoupledProblem(fluid, structure, grid_f, grid_s)


def monitor_dofs(space, xs, y=1.0):
    """Vertical-component dofs of the nodes at ``(x, y)`` for each ``x``."""
    out = []
    for x in xs:
        d = np.hypot(space.dof_coords[:, 0] - x, space.dof_coords[:, 1] - y)
        k = int(np.argmin(d))
        if d[k] > 1e-9:
            raise ValueError(f"no mesh node at ({x}, {y})")
        out.append(space.n_scalar + k)
    return np.array(out)


def run_hemodynamics(config):
    """Run the channel case.

    Returns
    -------
    times : ndarray (M_s + 1,)
    displacement : ndarray (M_s + 1, 3)
        Vertical displacement at the monitor points on the interface.
    report : ErrorReport
    """
    if config.case != "hemo":
        raise ValueError("run_hemodynamics needs case='hemo'")
    problem = build_hemo_problem(config)
    sol, report, wall, _ = problem.solve(config.method, tol=config.tol, maxit=config.maxit)
    dofs = monitor_dofs(problem.structure.S, HEMO_MONITORS)
    disp = sol.structure.eta[:, dofs]
    return problem.grid_s.times, disp, _report(config, sol, report, wall)


# -- convergence studies --------------------------------------------------

ERROR_KEYS = ("err_u_L2", "err_u_H1", "err_p_L2", "err_eta_L2", "err_eta_H1")


def rates(values):
    """``log2(e_{k-1} / e_k)`` for consecutive levels."""
    v = np.asarray(values, dtype=float)
    return np.log2(v[:-1] / v[1:])


def run_convergence_study(config, axis="space", levels=3, runner=run_mms):
    """Refine ``h`` (space) or the time steps (time) ``levels`` times.

    For the time axis every level runs three grid pairs built from
    ``dt = config.dt_f / 2**k``: coarse conforming ``(dt, dt)``, fine
    conforming ``(dt/2, dt/2)`` and nonconforming ``(dt, dt/2)``.

    Returns
    -------
    dict
        ``space``: {"reports": [...], "rates": {key: array}}.
        ``time``: one such entry per grid type.
    """
    if levels < 2:
        raise ValueError("a convergence study needs at least two levels")
    if axis == "space":
        reps = [runner(config.with_(h=config.h / 2**k)) for k in range(levels)]
        return {"reports": reps, "rates": {k: rates([getattr(r, k) for r in reps]) for k in ERROR_KEYS}}
    if axis != "time":
        raise ValueError(f"axis must be 'space' or 'time', got {axis!r}")
    kinds = {
        "coarse": lambda dt: (dt, dt),
        "fine": lambda dt: (dt / 2, dt / 2),
        "nonconforming": lambda dt: (dt, dt / 2),
    }
    out = {}
    for name, steps in kinds.items():
        reps = []
        for k in range(levels):
            dt_f, dt_s = steps(config.dt_f / 2**k)
            reps.append(runner(config.with_(dt_f=dt_f, dt_s=dt_s)))
        out[name] = {
            "reports": reps,
            "rates": {key: rates([getattr(r, key) for r in reps]) for key in ERROR_KEYS},
        }
    return out
