"""Error norms and point evaluation of finite-element functions."""

import numpy as np

from .assembly import _vector_basis
from .quadrature import triangle_rule


def _fe_at_quadrature(space, coeffs, bary):
    vals, grads = _vector_basis(space, bary)
    c = np.asarray(coeffs)[space.cell_vector_dofs()]  # (nt, nl)
    u = np.einsum("ti,qic->tqc", c, vals)
    du = np.einsum("ti,tqicd->tqcd", c, grads)
    return u, du


def error_norms(space, coeffs, exact, norm="L2", t=0.0, degree=None):
    """``||exact - u_h||`` in L2 or the H1 seminorm.

    ``exact(x, y, t)`` returns values of shape ``x.shape`` or
    ``x.shape + (vdim,)``; for ``H1_semi`` it must return the gradient,
    shape ``x.shape + (vdim, 2)`` (``x.shape + (2,)`` for scalars).
    """
    if degree is None:
        degree = 2 * space.degree + 3
    bary, w = triangle_rule(degree)
    _, area = space.geometry()
    wt = 2.0 * area[:, None] * w[None, :]
    X = space.map_points(bary)
    uh, duh = _fe_at_quadrature(space, coeffs, bary)
    ex = np.asarray(exact(X[..., 0], X[..., 1], t), dtype=float)
    if norm == "L2":
        ex = ex.reshape(uh.shape)
        err = np.sum((ex - uh) ** 2, axis=-1)
    elif norm == "H1_semi":
        ex = ex.reshape(duh.shape)
        err = np.sum((ex - duh) ** 2, axis=(-1, -2))
    else:
        raise ValueError(f"unknown norm {norm!r}")
    return float(np.sqrt(np.sum(wt * err)))


def point_values(space, coeffs, points):
    """Evaluate an FE function at arbitrary points (vdim columns)."""
    from .elements import shape_functions

    mesh = space.mesh
    points = np.atleast_2d(np.asarray(points, dtype=float))
    P = mesh.vertices[mesh.triangles]
    glam, _ = space.geometry()
    out = np.zeros((len(points), space.vdim))
    cdofs = space.cell_vector_dofs()
    coeffs = np.asarray(coeffs)
    for k, x in enumerate(points):
        lam = np.empty((len(P), 3))
        lam[:, 1:] = np.einsum("tki,ti->tk", glam[:, 1:], x - P[:, 0])
        lam[:, 0] = 1.0 - lam[:, 1] - lam[:, 2]
        t = int(np.argmax(lam.min(axis=1)))
        phi, _ = shape_functions(space.kind, lam[t:t + 1])
        c = coeffs[cdofs[t]].reshape(space.vdim, -1)
        out[k] = c @ phi[0]
    return out
