"""Finite-element spaces on a :class:`~fsidd.mesh.Mesh`."""

import numpy as np

from ..mesh import polyline_order
from .elements import DEGREE, KINDS, n_local, shape_functions

INTERFACE_TAG = "Gamma_interface"


class FeSpace:
    """Scalar or vector Lagrange space (P0, P1, P2, or P1 plus cubic bubble).

    Vector coefficients are stored component-blocked: the global index of
    scalar dof ``s`` in component ``c`` is ``c * n_scalar + s``.
    """

    def __init__(self, mesh, kind, vdim=1, interface_tag=INTERFACE_TAG):
        if kind not in KINDS:
            raise ValueError(f"unsupported element kind {kind!r}")
        if vdim not in (1, 2):
            raise ValueError("vdim must be 1 or 2")
        self.mesh = mesh
        self.kind = kind
        self.vdim = vdim
        self.degree = DEGREE[kind]
        self.n_local = n_local(kind)
        self.interface_tag = interface_tag

        nv, nt = mesh.n_vertices, mesh.n_triangles
        tri = mesh.triangles
        if kind == "P0":
            self.cell_dofs = np.arange(nt)[:, None]
            coords = mesh.vertices[tri].mean(axis=1)
        elif kind == "P1":
            self.cell_dofs = tri.copy()
            coords = mesh.vertices
        elif kind == "P1_bubble":
            self.cell_dofs = np.column_stack([tri, nv + np.arange(nt)])
            coords = np.vstack([mesh.vertices, mesh.vertices[tri].mean(axis=1)])
        else:
            edges, tri_edges = mesh.edges()
            self.cell_dofs = np.column_stack([tri, nv + tri_edges])
            coords = np.vstack([mesh.vertices, mesh.vertices[edges].mean(axis=1)])
        self.dof_coords = coords
        self.n_scalar = len(coords)
        self.ndofs = vdim * self.n_scalar
        self._trace = None

    def __repr__(self):
        return f"FeSpace({self.kind}, vdim={self.vdim}, ndofs={self.ndofs})"

    def vector_dofs(self, scalar_dofs):
        """Global indices of all components of the given scalar dofs,
        component-blocked."""
        s = np.asarray(scalar_dofs, dtype=int)
        return np.concatenate([c * self.n_scalar + s for c in range(self.vdim)])

    def cell_vector_dofs(self):
        """(nt, vdim * n_local) global dofs, local index ``c * n_local + a``."""
        return np.hstack([c * self.n_scalar + self.cell_dofs for c in range(self.vdim)])

    def boundary_scalar_dofs(self, tags):
        """Scalar dofs lying on boundary edges with the given tags."""
        if self.kind == "P0":
            return np.zeros(0, dtype=int)
        edges = self.mesh.tagged_edges(tags)
        if len(edges) == 0:
            return np.zeros(0, dtype=int)
        dofs = [np.unique(edges)]
        if self.kind == "P2":
            all_edges, _ = self.mesh.edges()
            lookup = {tuple(e): i for i, e in enumerate(all_edges)}
            ids = [lookup[tuple(sorted(e))] for e in edges]
            dofs.append(self.mesh.n_vertices + np.array(ids, dtype=int))
        return np.unique(np.concatenate(dofs))

    def boundary_dofs(self, tags):
        """Global dofs (all components) on the tagged boundary."""
        return self.vector_dofs(self.boundary_scalar_dofs(tags))

    def trace_scalar_dofs(self):
        """Scalar dofs on the interface, ordered by arclength."""
        if self._trace is None:
            mesh = self.mesh
            edges = mesh.tagged_edges(self.interface_tag)
            if len(edges) == 0:
                raise ValueError(f"mesh has no edges tagged {self.interface_tag!r}")
            order, arc = polyline_order(mesh.vertices, edges)
            pos = dict(zip(order.tolist(), arc.tolist()))
            dofs = list(order)
            s = list(arc)
            if self.kind == "P2":
                all_edges, _ = mesh.edges()
                lookup = {tuple(e): i for i, e in enumerate(all_edges)}
                for a, b in edges:
                    dofs.append(mesh.n_vertices + lookup[tuple(sorted((a, b)))])
                    s.append(0.5 * (pos[a] + pos[b]))
            dofs = np.array(dofs, dtype=int)
            s = np.array(s)
            perm = np.argsort(s, kind="stable")
            self._trace = (dofs[perm], s[perm])
        return self._trace[0]

    def trace_arclength(self):
        self.trace_scalar_dofs()
        return self._trace[1]

    def trace_coords(self):
        return self.dof_coords[self.trace_scalar_dofs()]

    def trace_dofs(self):
        """Global trace dofs, component-blocked (all x first, then all y)."""
        return self.vector_dofs(self.trace_scalar_dofs())

    # -- geometry -------------------------------------------------------

    def geometry(self):
        """Barycentric gradients (nt, 3, 2) and areas (nt,)."""
        mesh = self.mesh
        key = "geometry"
        if key not in mesh._cache:
            p = mesh.vertices[mesh.triangles]
            J = np.stack([p[:, 1] - p[:, 0], p[:, 2] - p[:, 0]], axis=2)  # (nt, 2, 2)
            det = J[:, 0, 0] * J[:, 1, 1] - J[:, 0, 1] * J[:, 1, 0]
            Jinv = np.empty_like(J)
            Jinv[:, 0, 0] = J[:, 1, 1] / det
            Jinv[:, 1, 1] = J[:, 0, 0] / det
            Jinv[:, 0, 1] = -J[:, 0, 1] / det
            Jinv[:, 1, 0] = -J[:, 1, 0] / det
            ref = np.array([[-1.0, -1.0], [1.0, 0.0], [0.0, 1.0]])
            # grad(lambda_k) = J^{-T} ref_k
            glam = np.einsum("tij,kj->tki", np.transpose(Jinv, (0, 2, 1)), ref)
            mesh._cache[key] = (glam, 0.5 * det)
        return mesh._cache[key]

    def tabulate(self, bary):
        """Shape values (nq, nloc) and physical gradients (nt, nq, nloc, 2)."""
        phi, dphi = shape_functions(self.kind, bary)
        glam, _ = self.geometry()
        grads = np.einsum("qak,tki->tqai", dphi, glam)
        return phi, grads

    def map_points(self, bary):
        """Physical coordinates (nt, nq, 2) of barycentric points."""
        p = self.mesh.vertices[self.mesh.triangles]
        return np.einsum("qk,tki->tqi", bary, p)


def build_space(mesh, kind, vdim=1):
    return FeSpace(mesh, kind, vdim)
