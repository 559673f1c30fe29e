import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fracpot.grids import Field, discrete_norm, make_grid


def test_make_grid_basic_1d():
    g = make_grid(1, L=1.0, R=3.0, N=4)
    assert g.h == 0.5
    assert g.M == 5
    assert g.n_axis == 4 + 2 * 5 - 1


def test_make_grid_basic_2d():
    g = make_grid(2, L=1.0, R=1.5, N=8)
    assert g.h == 0.25
    assert g.M == 3


@pytest.mark.parametrize("bad", [
    dict(dim=1, L=1.0, R=1.0, N=8),    # R <= L
    dict(dim=1, L=1.0, R=0.5, N=8),
    dict(dim=1, L=1.0, R=3.0, N=7),    # odd
    dict(dim=1, L=1.0, R=3.0, N=2),    # tiny
    dict(dim=3, L=1.0, R=3.0, N=8),    # unsupported dim
    dict(dim=1, L=-1.0, R=3.0, N=8),
])
def test_make_grid_rejects(bad):
    with pytest.raises(ValueError):
        make_grid(**bad)


@given(N=st.integers(2, 128).map(lambda k: 2 * k),
       L=st.floats(0.1, 10.0, allow_nan=False),
       Rfac=st.floats(1.1, 5.0, allow_nan=False))
@settings(max_examples=60, deadline=None)
def test_node_coordinates_exact_at_landmarks(N, L, Rfac):
    g = make_grid(1, L, Rfac * L, N)
    x = g.axis_coords()
    i0 = g.M - 1
    assert x[i0] == -g.L
    assert x[i0 + g.N] == g.L
    assert abs(x[i0 + g.N // 2]) < 1e-12 * max(1.0, L)


def test_interior_slice_and_ring_mask():
    g = make_grid(1, 1.0, 3.0, 8)
    x = g.axis_coords()
    inner = x[g.interior_slice]
    assert inner[0] == pytest.approx(-1.0 + g.h)
    assert inner[-1] == pytest.approx(1.0 - g.h)
    ring = x[g.ring_mask_axis()]
    assert np.all((np.abs(ring) >= 1.0 - 1e-12))
    assert len(inner) + len(ring) == g.n_axis


def test_field_validation():
    g = make_grid(1, 1.0, 3.0, 8)
    with pytest.raises(ValueError):
        Field(g, np.zeros(3))
    bad = np.zeros(g.full_shape())
    bad[0] = np.inf
    with pytest.raises(ValueError):
        Field(g, bad)
    f = Field.zeros(g)
    with pytest.raises(ValueError):
        f.values[0] = 1.0  # frozen storage


def test_field_from_interior_round_trip(rng):
    g = make_grid(2, 1.0, 2.0, 8)
    q = rng.standard_normal((7, 7))
    f = Field.from_interior(g, q)
    assert np.array_equal(f.interior(), q)
    ring_vals = f.values[~np.isin(np.arange(g.n_axis), range(g.M, g.M + 7))][:]
    assert f.values.sum() == pytest.approx(q.sum())


def test_discrete_norm_examples():
    assert discrete_norm(np.array([3.0]), "L2", 0.5, 1) == pytest.approx(
        3.0 * np.sqrt(0.5), abs=1e-12)
    assert discrete_norm(np.array([1.0, -2.0, 1.0]), "Linf", 0.1) == 2.0
    assert discrete_norm(np.zeros(5), "L2", 0.3) == 0.0
    with pytest.raises(ValueError):
        discrete_norm(np.array([]), "L2", 0.5)
    with pytest.raises(ValueError):
        discrete_norm(np.ones(3), "L3", 0.5)


@given(st.lists(st.floats(-1e6, 1e6), min_size=1, max_size=40),
       st.floats(1e-3, 10.0), st.floats(-100.0, 100.0))
@settings(max_examples=100, deadline=None)
def test_discrete_norm_homogeneous(vals, h, c):
    v = np.asarray(vals)
    n1 = discrete_norm(c * v, "L2", h)
    assert n1 == pytest.approx(abs(c) * discrete_norm(v, "L2", h),
                               rel=1e-10, abs=1e-9)


@given(st.integers(1, 30), st.floats(1e-3, 10.0), st.integers(0, 2**31))
@settings(max_examples=100, deadline=None)
def test_discrete_norm_triangle(n, h, seed):
    r = np.random.default_rng(seed)
    a, b = r.standard_normal(n), r.standard_normal(n)
    lhs = discrete_norm(a + b, "L2", h)
    assert lhs <= discrete_norm(a, "L2", h) + discrete_norm(b, "L2", h) + 1e-12
