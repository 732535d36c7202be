import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fsidd.timegrid import (
    TimeGrid,
    TraceSeries,
    grid_from_step,
    make_uniform_grid,
    overlap,
    project,
    projection_matrix,
)


def test_uniform_grids():
    g = make_uniform_grid(1.0, 1)
    assert g.n_slabs == 1 and g.slab(0) == (0.0, 1.0)
    assert np.allclose(make_uniform_grid(0.2, 8).steps, 0.025)
    assert grid_from_step(0.1, 2e-4).n_slabs == 500
    assert grid_from_step(0.1, 2e-4).times[-1] == 0.1


@pytest.mark.parametrize("times", [[0.0], [0.1, 0.2], [0.0, 0.5, 0.5, 1.0]])
def test_invalid_grids(times):
    with pytest.raises(ValueError):
        TimeGrid(np.array(times))


def test_step_must_divide():
    with pytest.raises(ValueError):
        grid_from_step(1.0, 0.3)


def test_overlap():
    assert overlap((0, 1), (0, 1)) == 1
    assert overlap((0, 0.5), (0.25, 0.75)) == 0.25
    assert overlap((0, 0.5), (0.5, 1)) == 0


def test_hand_projection():
    s = TraceSeries(make_uniform_grid(1, 2), np.array([[1.0], [5.0]]))
    assert project(s, make_uniform_grid(1, 1)).values[0, 0] == pytest.approx(3.0)
    assert np.allclose(project(s, make_uniform_grid(1, 3)).values.ravel(), [1.0, 3.0, 5.0])


def test_identity_and_constants():
    g = make_uniform_grid(0.7, 5)
    s = TraceSeries(g, np.random.default_rng(0).standard_normal((5, 4)))
    assert np.array_equal(project(s, g).values, s.values)
    c = TraceSeries(g, np.tile([1.5, -2.0], (5, 1)))
    assert np.allclose(project(c, make_uniform_grid(0.7, 3)).values, [1.5, -2.0])


def test_different_windows_rejected():
    with pytest.raises(ValueError):
        projection_matrix(make_uniform_grid(1, 2), make_uniform_grid(2, 2))


def riemann_projection(series, target, n=20000):
    """Slab averages of the source function by midpoint sampling."""
    t = (np.arange(n) + 0.5) * target.T / n
    idx = np.clip(np.searchsorted(series.grid.times, t, side="left") - 1, 0, series.grid.n_slabs - 1)
    f = series.values[idx]
    tgt = np.clip(np.searchsorted(target.times, t, side="left") - 1, 0, target.n_slabs - 1)
    out = np.zeros((target.n_slabs, series.ndofs))
    np.add.at(out, tgt, f)
    return out / np.bincount(tgt, minlength=target.n_slabs)[:, None]


def random_grid(rng, T, M):
    cuts = np.sort(rng.uniform(0, T, M - 1))
    times = np.concatenate([[0.0], cuts, [T]])
    if np.any(np.diff(times) < 1e-3 * T):
        return make_uniform_grid(T, M)
    return TimeGrid(times)


def test_riemann_oracle():
    rng = np.random.default_rng(3)
    for _ in range(5):
        a, b = random_grid(rng, 1.0, 4), random_grid(rng, 1.0, 6)
        s = TraceSeries(a, rng.standard_normal((4, 2)))
        assert np.abs(project(s, b).values - riemann_projection(s, b)).max() < 5e-3


def test_round_trip_composition():
    rng = np.random.default_rng(4)
    fine, coarse = make_uniform_grid(1.0, 6), make_uniform_grid(1.0, 4)
    s = TraceSeries(fine, rng.standard_normal((6, 3)))
    avg = project(s, coarse)
    rt = project(avg, fine)
    assert np.abs(rt.values - riemann_projection(avg, fine, 240000)).max() < 1e-3


@settings(max_examples=100, deadline=None)
@given(
    st.integers(1, 15), st.integers(1, 15), st.integers(1, 4),
    st.floats(0.01, 10.0), st.integers(0, 2**31 - 1),
)
def test_projection_properties(m1, m2, ndofs, T, seed):
    rng = np.random.default_rng(seed)
    g1, g2 = random_grid(rng, T, m1), random_grid(rng, T, m2)
    s = TraceSeries(g1, rng.standard_normal((m1, ndofs)))
    p = project(s, g2)
    scale = max(np.abs(s.integral()).max(), 1.0) * T
    assert np.abs(p.integral() - s.integral()).max() <= 1e-13 * scale
    assert p.norm() <= s.norm() * (1 + 1e-12) + 1e-300
    P = projection_matrix(g1, g2).toarray()
    assert np.allclose(P.sum(axis=1), 1.0, atol=1e-14)


def test_series_norm_with_gram():
    g = make_uniform_grid(1.0, 2)
    s = TraceSeries(g, np.array([[1.0, 0.0], [0.0, 2.0]]))
    assert s.norm() == pytest.approx(np.sqrt(0.5 * 1 + 0.5 * 4))
    assert s.norm(np.diag([2.0, 1.0])) == pytest.approx(np.sqrt(0.5 * 2 + 0.5 * 4))
    assert np.allclose((s + s - s * 2).values, 0.0)
