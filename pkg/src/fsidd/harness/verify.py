"""Self-checks: dense operator equivalence, projection properties, SWR
energy decay and manufactured-solution identities."""

from dataclasses import dataclass, field

import numpy as np

from ..timegrid import TraceSeries, make_uniform_grid, project, projection_matrix
from . import oracle
from .cases import build_mms_problem
from .config import RunConfig
from .mms import MmsExact


@dataclass
class CheckResult:
    name: str
    passed: bool
    value: float
    limit: float
    detail: str = ""


@dataclass
class VerificationReport:
    checks: list = field(default_factory=list)

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    @property
    def failures(self):
        return [c for c in self.checks if not c.passed]

    def add(self, name, value, limit, detail=""):
        self.checks.append(CheckResult(name, bool(value <= limit), float(value), float(limit), detail))


def inject_fault(problem, delta=1e-3):
    """Perturb one diagonal entry (at a free dof) of the fluid stiffness
    used by the sweeps; the dense oracle re-assembles its own copy."""
    fl = problem.fluid
    free = np.setdiff1d(np.arange(fl.nV), fl.dir_dofs)
    K = fl.K.tolil(copy=True)
    i = free[len(free) // 2]
    K[i, i] += delta
    fl.K = K.tocsr()
    problem.fluid._systems = {}
    return problem


def check_dense_operators(report, h_values=(0.5, 0.25), slab_pairs=((1, 1), (1, 2), (2, 3)),
                          element="taylor_hood_p2", fault=False, T=0.06):
    worst = 0.0
    for h in h_values:
        for mf, ms in slab_pairs:
            cfg = RunConfig(h=h, dt_f=T / mf, dt_s=T / ms, T=T, element=element)
            pb, _ = build_mms_problem(cfg)
            if fault:
                inject_fault(pb)
            d_sp = oracle.relative_deviation(oracle.probe(pb.apply_sp, pb.sp_size),
                                             oracle.dense_sp_operator(pb))
            d_r = oracle.relative_deviation(oracle.probe(pb.apply_robin, pb.robin_size),
                                            oracle.dense_robin_operator(pb))
            worst = max(worst, d_sp, d_r)
    report.add(f"dense operator equivalence ({element})", worst, 1e-10)
    return worst


def check_linearity(report, seed=0):
    rng = np.random.default_rng(seed)
    cfg = RunConfig(h=0.25, dt_f=0.02, dt_s=0.01, T=0.06)
    pb, _ = build_mms_problem(cfg)
    worst = 0.0
    for apply, n in ((pb.apply_sp, pb.sp_size), (pb.apply_robin, pb.robin_size)):
        z1, z2 = rng.standard_normal(n), rng.standard_normal(n)
        a, b = rng.standard_normal(2)
        lhs = apply(a * z1 + b * z2)
        rhs = a * apply(z1) + b * apply(z2)
        worst = max(worst, np.linalg.norm(lhs - rhs) / np.linalg.norm(rhs))
        worst = max(worst, np.linalg.norm(apply(np.zeros(n))))
    report.add("operator linearity", worst, 1e-11)
    return worst


def check_projections(report, n_series=100, seed=1):
    rng = np.random.default_rng(seed)
    ident, integ, expand = 0.0, 0.0, 0.0
    for _ in range(n_series):
        T = rng.uniform(0.1, 2.0)
        g1 = make_uniform_grid(T, int(rng.integers(1, 12)))
        g2 = make_uniform_grid(T, int(rng.integers(1, 12)))
        s = TraceSeries(g1, rng.standard_normal((g1.n_slabs, 3)))
        ident = max(ident, float(np.max(np.abs(project(s, g1).values - s.values))))
        ident = max(ident, float(abs(projection_matrix(g1, g1) - np.eye(g1.n_slabs)).max()))
        p = project(s, g2)
        scale = max(np.abs(s.integral()).max(), 1.0)
        integ = max(integ, float(np.abs(p.integral() - s.integral()).max() / scale))
        expand = max(expand, p.norm() - s.norm())
    report.add("projection identity on conforming grids", ident, 0.0)
    report.add("projection integral preservation", integ, 1e-13)
    report.add("projection non-expansiveness", expand, 1e-12)


def check_swr_decay(report, alpha=10.0, h=0.25, slabs=(4, 8), T=0.2, seed=2, tol=1e-7):
    cfg = RunConfig(h=h, dt_f=T / slabs[0], dt_s=T / slabs[1], T=T, alpha_f=alpha, alpha_s=alpha)
    pb, _ = build_mms_problem(cfg)
    z0 = np.random.default_rng(seed).standard_normal(pb.robin_size)
    _, rep = pb.swr_solve(tol=tol, maxit=2000, z0=z0, homogeneous=True)
    B = np.asarray(rep.energies)
    growth = float(np.max(np.diff(B) / B[:-1])) if len(B) > 1 else 0.0
    report.add(f"SWR energy nonincreasing (alpha={alpha:g})", max(growth, 0.0), 0.0,
               f"{rep.iterations} iterations, converged={rep.converged}")
    return rep


def check_mms_identities(report, n_points=20, seed=3):
    rng = np.random.default_rng(seed)
    e = MmsExact()
    x, y, t = rng.uniform(0, 1, n_points), rng.uniform(0, 2, n_points), rng.uniform(0, 1, n_points)
    g = e.grad_u(x, y, t)
    report.add("exact velocity divergence-free", float(np.abs(g[:, 0, 0] + g[:, 1, 1]).max()), 1e-12)
    ge = e.grad_eta(x, y, t)
    report.add("exact displacement divergence-free", float(np.abs(ge[:, 0, 0] + ge[:, 1, 1]).max()), 1e-12)
    one = np.ones_like(x)
    d = 1e-6
    deta = (e.eta(x, one, t + d) - e.eta(x, one, t - d)) / (2 * d)
    kin = np.abs(e.etadot(x, one, t) - e.u(x, one, t)).max()
    report.add("exact interface kinematics", float(kin), 1e-12)
    report.add("displacement rate matches finite difference", float(np.abs(deta - e.u(x, one, t)).max()), 1e-6)
    ff, fs = fd_forcings(e, x, y, t)
    report.add("fluid forcing vs finite differences", float(np.abs(ff - e.f_f(x, y, t)).max()), 1e-6)
    report.add("structure forcing vs finite differences", float(np.abs(fs - e.f_s(x, y, t)).max()), 1e-6)


def fd_forcings(e, x, y, t, d=1e-4):
    """Forcings from the exact fields by central differences only
    (second derivatives through nested first differences)."""

    def dx(f, k):
        def g(x, y, t):
            s = [np.zeros_like(x)] * 3
            s = list(s)
            s[k] = np.full_like(x, d)
            return (f(x + s[0], y + s[1], t + s[2]) - f(x - s[0], y - s[1], t - s[2])) / (2 * d)
        return g

    # fluid: rho u_t - div(2 nu D u) + grad p
    ut = dx(e.u, 2)(x, y, t)
    uxx, uyy = dx(dx(e.u, 0), 0)(x, y, t), dx(dx(e.u, 1), 1)(x, y, t)
    uxy = dx(dx(e.u, 0), 1)(x, y, t)
    # div(2 D u)_i = lap u_i + d_i div u
    div_D_u = np.stack([uxx[:, 0] + uyy[:, 0] + uxx[:, 0] + uxy[:, 1],
                        uxx[:, 1] + uyy[:, 1] + uxy[:, 0] + uyy[:, 1]], axis=-1)
    gp = np.stack([dx(e.p, 0)(x, y, t), dx(e.p, 1)(x, y, t)], axis=-1)
    ff = e.rho_f * ut - e.nu_f * div_D_u + gp
    ett = dx(dx(e.eta, 2), 2)(x, y, t)
    exx, eyy = dx(dx(e.eta, 0), 0)(x, y, t), dx(dx(e.eta, 1), 1)(x, y, t)
    exy = dx(dx(e.eta, 0), 1)(x, y, t)
    div_D_e = np.stack([exx[:, 0] + eyy[:, 0] + exx[:, 0] + exy[:, 1],
                        exx[:, 1] + eyy[:, 1] + exy[:, 0] + eyy[:, 1]], axis=-1)
    grad_div = np.stack([exx[:, 0] + exy[:, 1], exy[:, 0] + eyy[:, 1]], axis=-1)
    fs = e.rho_s * ett - e.nu_s * div_D_e - e.lam * grad_div
    return ff, fs


def run_verification(config=None, fault=False):
    """Run every self-check; ``fault=True`` perturbs the sweep matrices
    first so the dense-equivalence check must fail."""
    report = VerificationReport()
    check_mms_identities(report)
    check_projections(report)
    check_dense_operators(report, fault=fault)
    check_dense_operators(report, element="mini_p1", fault=fault)
    check_linearity(report)
    check_swr_decay(report, alpha=10.0)
    return report
