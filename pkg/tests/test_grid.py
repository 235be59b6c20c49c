import numpy as np
import pytest
from hypothesis import given, strategies as st

from cc4oc.grid import (BoundarySpec, Dirichlet, PERIODIC, SamplingError, ScalarField,
                        UniformGrid2D, make_grid, sample)


def test_unit_square_spacing():
    g = make_grid(11, 11, 0, 0, 1, 1)
    assert g.h == pytest.approx(0.1) and g.k == pytest.approx(0.1)


def test_anisotropic_spacing():
    g = make_grid(3, 3, 0, 0, 1, 2)
    assert (g.h, g.k) == (0.5, 1.0)


def test_periodic_box_spacing():
    g = make_grid(65, 65, 0, 0, 2 * np.pi, 2 * np.pi)
    assert g.h == pytest.approx(2 * np.pi / 64)
    assert g.k == pytest.approx(2 * np.pi / 64)


@pytest.mark.parametrize("args", [(2, 5), (5, 2), (0, 0)])
def test_rejects_small_counts(args):
    with pytest.raises(ValueError):
        make_grid(*args)


@pytest.mark.parametrize("lx, ly", [(0.0, 1.0), (1.0, -1.0)])
def test_rejects_bad_extent(lx, ly):
    with pytest.raises(ValueError):
        make_grid(5, 5, 0, 0, lx, ly)


def test_sample_zero():
    f = sample(make_grid(4, 5), lambda x, y, t: 0.0)
    assert f.values.shape == (5, 4)
    assert not f.values.any()


def test_sample_coordinate_rows():
    f = sample(make_grid(3, 3), lambda x, y, t: x)
    np.testing.assert_array_equal(f.flat(), [0, 0.5, 1] * 3)


def test_sample_centre_value():
    f = sample(make_grid(11, 11), lambda x, y, t: np.sin(np.pi * x) * np.sin(np.pi * y))
    assert f[5, 5] == pytest.approx(1.0)


def test_sample_reports_bad_node():
    g = make_grid(5, 5)
    with pytest.raises(SamplingError, match=r"\(0, 0\)"):
        sample(g, lambda x, y, t: 1.0 / (x + y))


def test_field_is_read_only_and_finite():
    g = make_grid(3, 3)
    f = ScalarField(g, np.zeros(9))
    with pytest.raises(ValueError):
        f.values[0, 0] = 1.0
    with pytest.raises(ValueError):
        ScalarField(g, np.full(9, np.nan))
    with pytest.raises(ValueError):
        ScalarField(g, np.zeros(8))


@given(st.integers(3, 40), st.integers(3, 40), st.floats(-5, 5), st.floats(-5, 5),
       st.floats(0.1, 10), st.floats(0.1, 10), st.data())
def test_index_round_trip(nx, ny, x0, y0, lx, ly, data):
    g = UniformGrid2D(nx, ny, x0, y0, lx, ly)
    i = data.draw(st.integers(0, nx - 1))
    j = data.draw(st.integers(0, ny - 1))
    assert g.node_coords(g.index(i, j)) == (x0 + i * g.h, y0 + j * g.k)


def test_sample_is_pointwise(rng):
    g = make_grid(7, 6)
    f = lambda x, y, t: np.sin(3 * x) * np.exp(y) + t
    full = sample(g, f, 0.3).values
    X, Y = g.mesh()
    perm = rng.permutation(g.size)
    vals = f(X.ravel()[perm], Y.ravel()[perm], 0.3)
    out = np.empty(g.size)
    out[perm] = vals
    np.testing.assert_array_equal(out.reshape(g.shape), full)


def test_periodic_edges_must_pair():
    d = Dirichlet(lambda x, y, t: 0.0)
    with pytest.raises(ValueError):
        BoundarySpec(PERIODIC, d, d, d)
    bc = BoundarySpec(PERIODIC, PERIODIC, d, d)
    assert bc.periodic_x and not bc.periodic_y


def test_edge_values_fill_only_edges():
    g = make_grid(4, 4)
    out = BoundarySpec.dirichlet(lambda x, y, t: x + 10 * y + t).edge_values(g, 1.0)
    X, Y = g.mesh()
    ref = X + 10 * Y + 1.0
    np.testing.assert_allclose(out[0], ref[0])
    np.testing.assert_allclose(out[:, -1], ref[:, -1])
    assert not out[1:-1, 1:-1].any()
