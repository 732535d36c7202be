"""Lagrange-type shape functions on triangles, written in barycentric coordinates."""

import numpy as np

KINDS = ("P0", "P1", "P2", "P1_bubble")

# local P2 edge k joins local vertices (k, k+1 mod 3), same as Mesh.edges
_EDGE = ((0, 1), (1, 2), (2, 0))

DEGREE = {"P0": 0, "P1": 1, "P2": 2, "P1_bubble": 3}


def n_local(kind):
    return {"P0": 1, "P1": 3, "P2": 6, "P1_bubble": 4}[kind]


def shape_functions(kind, bary):
    """Values and barycentric derivatives at points ``bary`` (nq, 3).

    Returns
    -------
    phi : (nq, nloc)
    dphi : (nq, nloc, 3), derivative w.r.t. each barycentric coordinate
    """
    L = np.asarray(bary, dtype=float)
    nq = len(L)
    if kind == "P0":
        return np.ones((nq, 1)), np.zeros((nq, 1, 3))
    if kind == "P1":
        d = np.broadcast_to(np.eye(3), (nq, 3, 3)).copy()
        return L.copy(), d
    if kind == "P1_bubble":
        phi = np.empty((nq, 4))
        d = np.zeros((nq, 4, 3))
        phi[:, :3] = L
        d[:, :3, :] = np.eye(3)
        phi[:, 3] = 27.0 * L[:, 0] * L[:, 1] * L[:, 2]
        d[:, 3, 0] = 27.0 * L[:, 1] * L[:, 2]
        d[:, 3, 1] = 27.0 * L[:, 0] * L[:, 2]
        d[:, 3, 2] = 27.0 * L[:, 0] * L[:, 1]
        return phi, d
    if kind == "P2":
        phi = np.empty((nq, 6))
        d = np.zeros((nq, 6, 3))
        for i in range(3):
            phi[:, i] = L[:, i] * (2.0 * L[:, i] - 1.0)
            d[:, i, i] = 4.0 * L[:, i] - 1.0
        for k, (i, j) in enumerate(_EDGE):
            phi[:, 3 + k] = 4.0 * L[:, i] * L[:, j]
            d[:, 3 + k, i] = 4.0 * L[:, j]
            d[:, 3 + k, j] = 4.0 * L[:, i]
        return phi, d
    raise ValueError(f"unknown element kind {kind!r}")


def local_edge_points(k, s):
    """Barycentric coordinates of points at parameter ``s`` on local edge k."""
    i, j = _EDGE[k]
    L = np.zeros((len(s), 3))
    L[:, i] = 1.0 - s
    L[:, j] = s
    return L
