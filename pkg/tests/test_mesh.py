import numpy as np
import pytest

from fsidd.mesh import MeshError, build_interface_map, build_structured_mesh

IFACE = "Gamma_interface"


def test_smallest_mesh():
    m = build_structured_mesh((0, 0, 1, 1), 1, 1)
    assert (m.n_vertices, m.n_triangles, len(m.boundary_edges)) == (4, 2, 4)


def test_area_and_orientation():
    m = build_structured_mesh((0, 0, 1, 1), 4, 4)
    assert (m.n_vertices, m.n_triangles) == (25, 32)
    a = m.signed_areas()
    assert np.all(a > 0)
    assert abs(a.sum() - 1.0) < 1e-14


def test_channel_vertex_count():
    m = build_structured_mesh((0, 0, 6, 1), 60, 10)
    assert m.n_vertices == 61 * 11
    assert abs(m.signed_areas().sum() - 6.0) < 1e-13 * 6


def test_boundary_edges_cover_rectangle_once():
    m = build_structured_mesh((0, 0, 2, 1), 3, 5, {"top": IFACE})
    tri, _ = m.boundary_edge_owners(np.unique(m.boundary_tags).tolist())
    assert len(tri) == len(m.boundary_edges) == 2 * (3 + 5)
    lengths = np.linalg.norm(np.diff(m.vertices[m.boundary_edges], axis=1)[:, 0], axis=1)
    assert abs(lengths.sum() - 6.0) < 1e-13
    assert set(m.boundary_tags) == {"bottom", "right", "left", IFACE}


@pytest.mark.parametrize("rect,nx,ny", [((0, 0, 0, 1), 2, 2), ((0, 0, 1, 1), 0, 2), ((0, 1, 1, 0), 2, 2)])
def test_rejects_bad_input(rect, nx, ny):
    with pytest.raises(MeshError):
        build_structured_mesh(rect, nx, ny)


def _stacked(nf, ns):
    mf = build_structured_mesh((0, 0, 1, 1), nf, nf, {"top": IFACE})
    ms = build_structured_mesh((0, 1, 1, 2), ns, ns, {"bottom": IFACE})
    return mf, ms


def test_interface_map_pairs_nodes():
    mf, ms = _stacked(4, 4)
    imap = build_interface_map(mf, ms)
    assert imap.n_nodes == 5
    assert np.allclose(mf.vertices[imap.pairs[:, 0]], ms.vertices[imap.pairs[:, 1]], atol=1e-15)
    assert np.all(np.diff(imap.arclength) > 0)


def test_interface_map_channel():
    mf = build_structured_mesh((0, 0, 6, 1), 60, 10, {"top": IFACE})
    ms = build_structured_mesh((0, 1, 6, 1.1), 60, 1, {"bottom": IFACE})
    assert build_interface_map(mf, ms).n_nodes == 61


def test_interface_map_mismatch():
    mf, ms = _stacked(4, 5)
    with pytest.raises(MeshError):
        build_interface_map(mf, ms)


def test_interface_map_swap_is_inverse():
    mf, ms = _stacked(3, 3)
    a = build_interface_map(mf, ms)
    b = build_interface_map(ms, mf)
    assert np.array_equal(a.inverse().pairs, b.pairs)


def test_interface_normals_opposite():
    mf, ms = _stacked(4, 4)
    nf = mf.outward_normals(IFACE)
    ns = ms.outward_normals(IFACE)
    assert np.allclose(nf, [0, 1]) and np.allclose(ns, [0, -1])
