"""Structured triangulations of rectangles and fluid/structure interface maps."""

from dataclasses import dataclass, field

import numpy as np

SIDES = ("bottom", "right", "top", "left")


class MeshError(ValueError):
    pass


@dataclass(frozen=True)
class Mesh:
    """Conforming triangle mesh with tagged boundary edges.

    Attributes
    ----------
    vertices : (nv, 2) float array
    triangles : (nt, 3) int array, counterclockwise
    boundary_edges : (nb, 2) int array of vertex pairs
    boundary_tags : (nb,) array of str
    rect : (x0, y0, x1, y1)
    """

    vertices: np.ndarray
    triangles: np.ndarray
    boundary_edges: np.ndarray
    boundary_tags: np.ndarray
    rect: tuple
    shape: tuple = (1, 1)
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def n_vertices(self):
        return len(self.vertices)

    @property
    def n_triangles(self):
        return len(self.triangles)

    @property
    def diameter(self):
        x0, y0, x1, y1 = self.rect
        return float(np.hypot(x1 - x0, y1 - y0))

    def signed_areas(self):
        p = self.vertices[self.triangles]
        d1 = p[:, 1] - p[:, 0]
        d2 = p[:, 2] - p[:, 0]
        return 0.5 * (d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0])

    def edges(self):
        """Unique edges and the triangle-to-edge map.

        Local edge k of a triangle joins local vertices (k, k+1 mod 3).

        Returns
        -------
        edges : (ne, 2) int array, sorted vertex pairs
        tri_edges : (nt, 3) int array
        """
        if "edges" not in self._cache:
            t = self.triangles
            loc = np.stack([t[:, [0, 1]], t[:, [1, 2]], t[:, [2, 0]]], axis=1)
            pairs = np.sort(loc.reshape(-1, 2), axis=1)
            edges, inv = np.unique(pairs, axis=0, return_inverse=True)
            self._cache["edges"] = (edges, inv.reshape(-1, 3))
        return self._cache["edges"]

    def tagged_edges(self, tags):
        """Boundary edges (vertex pairs) whose tag is in ``tags``."""
        if isinstance(tags, str):
            tags = (tags,)
        mask = np.isin(self.boundary_tags, list(tags))
        return self.boundary_edges[mask]

    def boundary_edge_owners(self, tags):
        """Owning triangle and local edge index for each tagged boundary edge."""
        edges, tri_edges = self.edges()
        bnd = np.sort(self.tagged_edges(tags), axis=1)
        if len(bnd) == 0:
            return np.zeros(0, int), np.zeros(0, int)
        lookup = {tuple(e): i for i, e in enumerate(edges)}
        ids = np.array([lookup[tuple(e)] for e in bnd])
        where = {}
        for tri, row in enumerate(tri_edges):
            for k, e in enumerate(row):
                where.setdefault(e, []).append((tri, k))
        owners = [where[i] for i in ids]
        if any(len(o) != 1 for o in owners):
            raise MeshError("boundary edge shared by more than one triangle")
        tri = np.array([o[0][0] for o in owners])
        loc = np.array([o[0][1] for o in owners])
        return tri, loc

    def outward_normals(self, tags):
        """Outward unit normals of the tagged boundary edges, in edge order."""
        tri, loc = self.boundary_edge_owners(tags)
        t = self.triangles[tri]
        a = self.vertices[t[np.arange(len(t)), loc]]
        b = self.vertices[t[np.arange(len(t)), (loc + 1) % 3]]
        d = b - a
        # counterclockwise triangles: the interior lies to the left of a->b
        n = np.stack([d[:, 1], -d[:, 0]], axis=1)
        return n / np.linalg.norm(n, axis=1)[:, None]


def build_structured_mesh(rect, nx, ny, boundary_spec=None):
    """Uniform ``nx`` x ``ny`` grid of a rectangle, each cell split along
    its lower-left to upper-right diagonal.

    Parameters
    ----------
    rect : (x0, y0, x1, y1)
    nx, ny : int
        Cells per direction.
    boundary_spec : dict, optional
        Maps side name (bottom/right/top/left) to a tag. Untagged sides
        keep their side name as tag.
    """
    x0, y0, x1, y1 = map(float, rect)
    if not (x1 > x0 and y1 > y0):
        raise MeshError(f"degenerate rectangle {rect!r}")
    if int(nx) < 1 or int(ny) < 1:
        raise MeshError(f"need nx, ny >= 1, got nx={nx}, ny={ny}")
    nx, ny = int(nx), int(ny)
    spec = {s: s for s in SIDES}
    spec.update(boundary_spec or {})
    unknown = set(spec) - set(SIDES)
    if unknown:
        raise MeshError(f"unknown sides {sorted(unknown)}")

    xs = np.linspace(x0, x1, nx + 1)
    ys = np.linspace(y0, y1, ny + 1)
    X, Y = np.meshgrid(xs, ys)
    vertices = np.column_stack([X.ravel(), Y.ravel()])

    def vid(i, j):
        return j * (nx + 1) + i

    i, j = np.meshgrid(np.arange(nx), np.arange(ny))
    i, j = i.ravel(), j.ravel()
    v00, v10, v01, v11 = vid(i, j), vid(i + 1, j), vid(i, j + 1), vid(i + 1, j + 1)
    lower = np.column_stack([v00, v10, v11])
    upper = np.column_stack([v00, v11, v01])
    triangles = np.empty((2 * len(i), 3), dtype=int)
    triangles[0::2] = lower
    triangles[1::2] = upper

    ii = np.arange(nx)
    jj = np.arange(ny)
    sides = {
        "bottom": np.column_stack([vid(ii, 0), vid(ii + 1, 0)]),
        "right": np.column_stack([vid(nx, jj), vid(nx, jj + 1)]),
        "top": np.column_stack([vid(ii + 1, ny), vid(ii, ny)]),
        "left": np.column_stack([vid(0, jj + 1), vid(0, jj)]),
    }
    edges = np.concatenate([sides[s] for s in SIDES])
    tags = np.concatenate([np.full(len(sides[s]), spec[s], dtype=object) for s in SIDES])
    return Mesh(vertices, triangles, edges, tags, (x0, y0, x1, y1), (nx, ny))


@dataclass(frozen=True)
class InterfaceMap:
    """Node pairing between two meshes along their common interface.

    ``pairs[k] = (fluid_vertex, structure_vertex)``, ordered by arclength.
    """

    pairs: np.ndarray
    arclength: np.ndarray
    edges_f: np.ndarray
    edges_s: np.ndarray

    @property
    def n_nodes(self):
        return len(self.pairs)

    def inverse(self):
        return InterfaceMap(self.pairs[:, ::-1].copy(), self.arclength, self.edges_s, self.edges_f)


def polyline_order(vertices, edges):
    """Order the vertices of a simple open polyline given as an edge list.

    Returns vertex ids from one end to the other, starting at the end with
    the smallest (x, y) lexicographic coordinate, and their arclength.
    """
    adj = {}
    for a, b in edges:
        adj.setdefault(a, []).append(b)
        adj.setdefault(b, []).append(a)
    ends = [v for v, nb in adj.items() if len(nb) == 1]
    if len(ends) != 2 or any(len(nb) > 2 for nb in adj.values()):
        raise MeshError("interface edges do not form a simple open polyline")
    start = min(ends, key=lambda v: tuple(vertices[v]))
    order = [start]
    prev = None
    while len(order) < len(adj):
        cur = order[-1]
        nxt = [v for v in adj[cur] if v != prev]
        prev = cur
        order.append(nxt[0])
    order = np.array(order)
    seg = np.linalg.norm(np.diff(vertices[order], axis=0), axis=1)
    return order, np.concatenate([[0.0], np.cumsum(seg)])


def build_interface_map(mesh_f, mesh_s, tag="Gamma_interface"):
    """Pair the interface vertices of two matching meshes."""
    ef = mesh_f.tagged_edges(tag)
    es = mesh_s.tagged_edges(tag)
    if len(ef) == 0 or len(es) == 0:
        raise MeshError(f"both meshes need edges tagged {tag!r}")
    of, arc = polyline_order(mesh_f.vertices, ef)
    os_, _ = polyline_order(mesh_s.vertices, es)
    if len(of) != len(os_):
        raise MeshError(
            f"interface node counts differ ({len(of)} vs {len(os_)}); "
            "nonmatching interfaces are not supported"
        )
    tol = 1e-12 * max(mesh_f.diameter, mesh_s.diameter)
    pf, ps = mesh_f.vertices[of], mesh_s.vertices[os_]
    if np.max(np.abs(pf - ps)) > tol:
        # the two polylines may have been walked from opposite ends
        os_ = os_[::-1]
        ps = mesh_s.vertices[os_]
        if np.max(np.abs(pf - ps)) > tol:
            raise MeshError("interface nodes do not coincide")
    return InterfaceMap(np.column_stack([of, os_]), arc, ef, es)
