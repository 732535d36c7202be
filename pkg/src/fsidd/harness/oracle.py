"""Dense reference assembly of the interface operators.

The sweeps are replaced by one monolithic space-time solve per subdomain
(all slabs at once, structure kept in displacement/velocity form, Dirichlet
dofs removed rather than eliminated in place) and the time projections are
rebuilt from a common refinement of the two grids. Only meant for tiny
problems.
"""

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from ..fem import assemble_form


def refinement_projection(source, target):
    """Dense ``P[n, l] = |J_target^n cap J_source^l| / |J_target^n|`` via the
    merged breakpoint set."""
    pts = np.union1d(source.times, target.times)
    P = np.zeros((target.n_slabs, source.n_slabs))
    for a, b in zip(pts[:-1], pts[1:]):
        if b - a <= 1e-14 * target.T:
            continue
        mid = 0.5 * (a + b)
        n = np.searchsorted(target.times, mid) - 1
        l_ = np.searchsorted(source.times, mid) - 1
        P[n, l_] += b - a
    return P / target.steps[:, None]


def _free(space, dirichlet_tags):
    mask = np.ones(space.ndofs, dtype=bool)
    mask[space.boundary_dofs(dirichlet_tags)] = False
    return np.flatnonzero(mask)


def fluid_trace_map(solver, grid, I, alpha):
    """Dense map from interface data (slab-major over ``I``) to the fluid
    velocity trace on ``I``, with zero forcing and initial data."""
    V, Q, par = solver.V, solver.Q, solver.params
    M = assemble_form(V, V, "mass", par.rho_f)
    K = assemble_form(V, V, "strain", 2 * par.nu_f)
    B = assemble_form(V, Q, "div")
    Mg = assemble_form(V, V, "iface_mass", tag=V.interface_tag)
    fr = _free(V, solver.dirichlet_tags)
    tr = V.trace_dofs()
    excl = np.setdiff1d(np.arange(len(tr)), I)
    keep = np.ones(V.ndofs)
    keep[tr[excl]] = 0.0
    Mg_r = sp.diags(keep) @ Mg @ sp.diags(keep)
    nf, nq = len(fr), Q.ndofs
    N = nf + nq
    Ms = grid.n_slabs
    Mff = M[fr][:, fr]
    blocks = [[None] * Ms for _ in range(Ms)]
    for m, dt in enumerate(grid.steps):
        A = (M / dt + K + alpha * Mg_r)[fr][:, fr]
        blocks[m][m] = sp.bmat([[A, -B[:, fr].T], [-B[:, fr], None]])
        if m:
            blocks[m][m - 1] = sp.bmat([[-Mff / dt, None], [None, sp.csr_matrix((nq, nq))]])
    big = sp.bmat(blocks, format="csc")
    load = Mg[fr][:, tr[I]].toarray()  # (nf, nI)
    nI = len(I)
    R = np.zeros((Ms * N, Ms * nI))
    for m in range(Ms):
        R[m * N:m * N + nf, m * nI:(m + 1) * nI] = load
    X = spla.spsolve(big, R) if Ms * nI > 1 else spla.spsolve(big, R).reshape(-1, 1)
    X = np.asarray(X).reshape(Ms * N, Ms * nI)
    pos = {d: k for k, d in enumerate(fr)}
    rows = [pos.get(d) for d in tr[I]]
    G = np.zeros((Ms * nI, Ms * nI))
    for m in range(Ms):
        for k, r in enumerate(rows):
            if r is not None:
                G[m * nI + k] = X[m * N + r]
    return G


def structure_trace_map(solver, grid, I, alpha):
    """Dense map from structure interface data ``g`` (entering as
    ``-(g, xi)_Gamma``) to the velocity trace on ``I``."""
    S, par = solver.S, solver.params
    M = assemble_form(S, S, "mass", par.rho_s)
    K = assemble_form(S, S, "strain", 2 * par.nu_s) + assemble_form(S, S, "divdiv", par.lam)
    Mg = assemble_form(S, S, "iface_mass", tag=S.interface_tag)
    fr = _free(S, solver.dirichlet_tags)
    tr = S.trace_dofs()
    excl = np.setdiff1d(np.arange(len(tr)), I)
    keep = np.ones(S.ndofs)
    keep[tr[excl]] = 0.0
    Mg_r = sp.diags(keep) @ Mg @ sp.diags(keep)
    n = len(fr)
    Mff, Kff = M[fr][:, fr], K[fr][:, fr]
    Id = sp.identity(n)
    Ms = grid.n_slabs
    blocks = [[None] * Ms for _ in range(Ms)]
    for m, dt in enumerate(grid.steps):
        # unknowns (eta, etadot): momentum row, kinematic row
        blocks[m][m] = sp.bmat([[Kff, Mff / dt + alpha * Mg_r[fr][:, fr]], [Id, -dt * Id]])
        if m:
            blocks[m][m - 1] = sp.bmat([[None, -Mff / dt], [-Id, None]])
    big = sp.bmat(blocks, format="csc")
    load = -Mg[fr][:, tr[I]].toarray()
    nI = len(I)
    R = np.zeros((Ms * 2 * n, Ms * nI))
    for m in range(Ms):
        R[m * 2 * n:m * 2 * n + n, m * nI:(m + 1) * nI] = load
    X = np.asarray(spla.spsolve(big, R)).reshape(Ms * 2 * n, Ms * nI)
    pos = {d: k for k, d in enumerate(fr)}
    rows = [pos.get(d) for d in tr[I]]
    G = np.zeros((Ms * nI, Ms * nI))
    for m in range(Ms):
        for k, r in enumerate(rows):
            if r is not None:
                G[m * nI + k] = X[m * 2 * n + n + r]
    return G


def dense_sp_operator(problem):
    I, nI = problem.I, problem.nI
    Gf = fluid_trace_map(problem.fluid, problem.grid_f, I, 0.0)
    Gs = structure_trace_map(problem.structure, problem.grid_s, I, 0.0)
    Pfs = np.kron(refinement_projection(problem.grid_s, problem.grid_f), np.eye(nI))
    Psf = np.kron(refinement_projection(problem.grid_f, problem.grid_s), np.eye(nI))
    if problem.sp_on_fluid:
        return Gf - Pfs @ Gs @ Psf
    return Psf @ Gf @ Pfs - Gs


def dense_robin_operator(problem):
    I, nI = problem.I, problem.nI
    par = problem.params
    a = par.alpha_f + par.alpha_s
    Gf = fluid_trace_map(problem.fluid, problem.grid_f, I, par.alpha_f)
    Gs = structure_trace_map(problem.structure, problem.grid_s, I, par.alpha_s)
    Pfs = np.kron(refinement_projection(problem.grid_s, problem.grid_f), np.eye(nI))
    Psf = np.kron(refinement_projection(problem.grid_f, problem.grid_s), np.eye(nI))
    nf, ns = Gf.shape[0], Gs.shape[0]
    return np.block(
        [
            [np.eye(nf), -Pfs @ (np.eye(ns) + a * Gs)],
            [-Psf @ (np.eye(nf) - a * Gf), np.eye(ns)],
        ]
    )


def probe(apply, n):
    """Matrix of a linear map by applying it to unit vectors."""
    cols = []
    e = np.zeros(n)
    for j in range(n):
        e[j] = 1.0
        cols.append(np.asarray(apply(e)).copy())
        e[j] = 0.0
    return np.column_stack(cols)


def relative_deviation(A, B):
    return float(np.max(np.abs(A - B)) / max(np.max(np.abs(B)), 1e-300))
