"""Assembly of bilinear forms, loads, interpolation and essential conditions."""

import numpy as np
import scipy.sparse as sp

from .elements import local_edge_points, shape_functions
from .quadrature import line_rule, triangle_rule
from .space import INTERFACE_TAG

FORMS = ("mass", "strain", "div", "divdiv", "grad", "iface_mass")


def _vector_basis(space, bary):
    """Values (nq, nl, vdim) and gradients (nt, nq, nl, vdim, 2) of the
    vector basis, local index ``c * n_local + a``."""
    phi, grads = space.tabulate(bary)
    nq, nloc = phi.shape
    nt = grads.shape[0]
    vd = space.vdim
    val = np.zeros((nq, vd * nloc, vd))
    grd = np.zeros((nt, nq, vd * nloc, vd, 2))
    for c in range(vd):
        val[:, c * nloc:(c + 1) * nloc, c] = phi
        grd[:, :, c * nloc:(c + 1) * nloc, c, :] = grads
    return val, grd


def _scatter(rows, cols, local, shape):
    nt, a, b = local.shape
    r = np.broadcast_to(rows[:, :, None], (nt, a, b)).ravel()
    c = np.broadcast_to(cols[:, None, :], (nt, a, b)).ravel()
    return sp.coo_matrix((local.ravel(), (r, c)), shape=shape).tocsr()


def assemble_form(trial, test, form, coeff=1.0, tag=INTERFACE_TAG):
    """Assemble ``coeff * form(trial, test)`` as a sparse (test x trial) matrix.

    Forms
    -----
    mass        (u, v)
    strain      (D(u), D(v))
    div         (q, div u)       trial: vector velocity, test: scalar q
    divdiv      (div u, div v)
    grad        (grad u, grad v)
    iface_mass  (u, v) on edges tagged ``tag``
    """
    if form not in FORMS:
        raise ValueError(f"unknown form {form!r}")
    if trial.mesh is not test.mesh:
        raise ValueError("trial and test spaces live on different meshes")
    if not np.isfinite(coeff):
        raise ValueError("coefficient must be finite")
    shape = (test.ndofs, trial.ndofs)
    if form == "iface_mass":
        return coeff * _assemble_edge_mass(trial, test, tag)
    if form == "div":
        if trial.vdim != 2 or test.vdim != 1:
            raise ValueError("div form needs vector trial and scalar test spaces")
    elif trial.vdim != test.vdim:
        raise ValueError("trial and test spaces have different vector dimensions")

    bary, w = triangle_rule(trial.degree + test.degree)
    _, area = trial.geometry()
    wt = area[:, None] * w[None, :] * 2.0  # rule weights sum to 1/2
    vt, gt = _vector_basis(trial, bary)
    vs, gs = _vector_basis(test, bary)

    if form == "mass":
        local = np.einsum("tq,qic,qjc->tij", wt, vs, vt)
    elif form == "grad":
        local = np.einsum("tq,tqicd,tqjcd->tij", wt, gs, gt)
    elif form == "strain":
        Ds = 0.5 * (gs + np.swapaxes(gs, -1, -2))
        Dt = 0.5 * (gt + np.swapaxes(gt, -1, -2))
        local = np.einsum("tq,tqicd,tqjcd->tij", wt, Ds, Dt)
    elif form == "divdiv":
        ds = np.einsum("tqicc->tqi", gs)
        dt = np.einsum("tqjcc->tqj", gt)
        local = np.einsum("tq,tqi,tqj->tij", wt, ds, dt)
    else:  # div
        dt = np.einsum("tqjcc->tqj", gt)
        local = np.einsum("tq,qi,tqj->tij", wt, vs[:, :, 0], dt)
    A = _scatter(test.cell_vector_dofs(), trial.cell_vector_dofs(), coeff * local, shape)
    A.eliminate_zeros()
    return A


def _edge_tabulation(space, tag, degree):
    """Values of the vector basis at quadrature points of tagged edges.

    Returns (dofs (ne, nl), values (ne, nq, nl, vdim), weights (ne, nq),
    points (ne, nq, 2)).
    """
    mesh = space.mesh
    tri, loc = mesh.boundary_edge_owners(tag)
    s, w = line_rule(degree)
    ne = len(tri)
    nl = space.vdim * space.n_local
    vals = np.zeros((ne, len(s), nl, space.vdim))
    pts = np.zeros((ne, len(s), 2))
    for k in range(3):
        sel = loc == k
        if not np.any(sel):
            continue
        L = local_edge_points(k, s)
        phi, _ = shape_functions(space.kind, L)
        for c in range(space.vdim):
            vals[sel, :, c * space.n_local:(c + 1) * space.n_local, c] = phi
        P = mesh.vertices[mesh.triangles[tri[sel]]]
        pts[sel] = np.einsum("qk,eki->eqi", L, P)
    t = mesh.triangles[tri]
    a = mesh.vertices[t[np.arange(ne), loc]]
    b = mesh.vertices[t[np.arange(ne), (loc + 1) % 3]]
    length = np.linalg.norm(b - a, axis=1)
    dofs = space.cell_vector_dofs()[tri]
    return dofs, vals, length[:, None] * w[None, :], pts


def _assemble_edge_mass(trial, test, tag):
    deg = trial.degree + test.degree
    dt, vt, w, _ = _edge_tabulation(trial, tag, deg)
    ds, vs, _, _ = _edge_tabulation(test, tag, deg)
    local = np.einsum("eq,eqic,eqjc->eij", w, vs, vt)
    A = _scatter(ds, dt, local, (test.ndofs, trial.ndofs))
    A.eliminate_zeros()
    return A


def _as_components(values, vdim, lead_shape):
    v = np.asarray(values, dtype=float)
    if vdim == 1:
        return np.broadcast_to(v, lead_shape)[..., None]
    return np.broadcast_to(v, lead_shape + (vdim,))


def assemble_load(space, f, t=0.0, degree=5):
    """Load vector ``(f, v)``. ``f(x, y, t)`` returns an array of shape
    ``x.shape`` (scalar) or ``x.shape + (vdim,)`` (vector)."""
    bary, w = triangle_rule(max(degree, 5))
    _, area = space.geometry()
    wt = area[:, None] * w[None, :] * 2.0
    X = space.map_points(bary)
    fv = _as_components(f(X[..., 0], X[..., 1], t), space.vdim, X.shape[:2])
    vals, _ = _vector_basis(space, bary)
    local = np.einsum("tq,tqc,qic->ti", wt, fv, vals)
    b = np.zeros(space.ndofs)
    np.add.at(b, space.cell_vector_dofs().ravel(), local.ravel())
    return b


def assemble_boundary_load(space, tag, g, t=0.0, degree=5):
    """Load vector ``(g, v)`` on boundary edges with tag ``tag``."""
    dofs, vals, w, pts = _edge_tabulation(space, tag, max(degree, space.degree + 2))
    b = np.zeros(space.ndofs)
    if len(dofs) == 0:
        return b
    gv = _as_components(g(pts[..., 0], pts[..., 1], t), space.vdim, pts.shape[:2])
    local = np.einsum("eq,eqc,eqic->ei", w, gv, vals)
    np.add.at(b, dofs.ravel(), local.ravel())
    return b


def assemble_interface_load(space, trace_values, iface_mass=None):
    """``(g, v)_Gamma`` for ``g`` given by nodal trace coefficients.

    ``trace_values`` is component-blocked over ``space.trace_scalar_dofs()``.
    """
    tr = space.trace_dofs()
    trace_values = np.asarray(trace_values, dtype=float)
    if trace_values.shape[-1] != len(tr):
        raise ValueError(
            f"trace vector has {trace_values.shape[-1]} entries, space trace has {len(tr)}"
        )
    if iface_mass is None:
        iface_mass = assemble_form(space, space, "iface_mass", tag=space.interface_tag)
    return iface_mass[:, tr] @ trace_values


def interpolate(space, f, t=0.0):
    """Nodal interpolant; bubble coefficients match ``f`` at centroids."""
    X = space.dof_coords
    v = _as_components(f(X[:, 0], X[:, 1], t), space.vdim, (len(X),))
    coeffs = np.array(v, dtype=float)
    if space.kind == "P1_bubble":
        nv = space.mesh.n_vertices
        tri = space.mesh.triangles
        coeffs[nv:] -= coeffs[tri].mean(axis=1)
    return coeffs.T.ravel()


def apply_essential_bc(A, rhs, dofs, values):
    """Symmetric elimination of the constrained ``dofs``.

    Rows and columns of ``dofs`` are zeroed, their diagonal set to one, and
    the right side lifted so the solution reproduces ``values`` there.
    """
    A = sp.csr_matrix(A)
    dofs = np.asarray(dofs, dtype=int)
    values = np.broadcast_to(np.asarray(values, dtype=float), dofs.shape)
    b = np.array(rhs, dtype=float)
    if len(dofs):
        b -= A[:, dofs] @ values
        b[dofs] = values
    mask = np.ones(A.shape[0])
    mask[dofs] = 0.0
    D = sp.diags(mask)
    Ac = (D @ A @ D).tocsr()
    Ac = Ac + sp.diags(1.0 - mask)
    Ac.eliminate_zeros()
    return Ac.tocsr(), b
