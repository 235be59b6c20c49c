import numpy as np
import pytest

from cc4oc.grid import make_grid
from cc4oc.navier_stokes import (cavity_boundary, cavity_rest_state, cavity_solver,
                                 manufactured_solver, manufactured_state, ns_advance,
                                 shear_layer_init, shear_layer_solver)
from cc4oc.pade import pade_dx, pade_dy
from cc4oc.problems import ns_manufactured, shear_case
from cc4oc.scheme import SchemeConfig


def manufactured_errors(n, t_end, **kw):
    g = make_grid(n, n)
    solver = manufactured_solver(g, 1.0, SchemeConfig(dt=g.h ** 2))
    st = solver.march(manufactured_state(g, 1.0), t_end, **kw)
    X, Y = g.mesh()
    psi, omega, _ = ns_manufactured(X, Y, st.t, 1.0)
    return (np.abs(st.psi.values - psi).max(), np.abs(st.omega.values - omega).max(),
            st, solver)


def test_manufactured_half_time():
    e_psi, _, st, _ = manufactured_errors(21, 0.5)
    assert st.t == pytest.approx(0.5)
    assert e_psi == pytest.approx(1.154e-8, rel=0.1)


def test_extrapolated_start_gives_same_answer():
    a = manufactured_errors(11, 0.1)
    b = manufactured_errors(11, 0.1, extrapolate=True)
    np.testing.assert_allclose(a[2].psi.values, b[2].psi.values, atol=1e-11)
    np.testing.assert_allclose(a[2].omega.values, b[2].omega.values, atol=1e-9)


def test_derivatives_consistent_after_step():
    g = make_grid(13, 13)
    solver = manufactured_solver(g, 1.0, SchemeConfig(dt=1e-3))
    st = ns_advance(manufactured_state(g, 1.0), solver)
    cl = solver.poisson
    np.testing.assert_allclose(st.psi_x.values, pade_dx(st.psi, cl.closure_x, st.t).values,
                               atol=1e-10)
    np.testing.assert_allclose(st.psi_y.values, pade_dy(st.psi, cl.closure_y, st.t).values,
                               atol=1e-10)
    np.testing.assert_allclose(st.u, st.psi_y.values)
    np.testing.assert_allclose(st.v, -st.psi_x.values)


def test_rest_state_is_steady():
    g = make_grid(9, 9)
    solver = cavity_solver(g, 100.0, SchemeConfig(dt=0.01), lid=0.0)
    st = cavity_rest_state(solver)
    for _ in range(3):
        st = ns_advance(st, solver)
    assert not np.abs(st.psi.values).max() > 0
    assert not np.abs(st.omega.values).max() > 0


def test_cavity_boundary_values():
    g = make_grid(9, 9)
    solver = cavity_solver(g, 100.0, SchemeConfig(dt=0.01))
    st = solver.march(cavity_rest_state(solver), 0.05)
    fixed = cavity_boundary(st)
    psi = fixed.psi.values
    assert not psi[0].any() and not psi[-1].any()
    assert not psi[:, 0].any() and not psi[:, -1].any()
    np.testing.assert_allclose(fixed.psi_y.values[-1, 1:-1], 1.0)
    np.testing.assert_allclose(fixed.psi_x.values[:, 0], 0.0, atol=1e-14)
    k = g.k
    top = -(8 * psi[-2, 4] - psi[-3, 4]) / (2 * k * k) - 3 / k
    assert fixed.omega.values[-1, 4] == pytest.approx(top)


def test_cavity_starts_spinning_clockwise():
    g = make_grid(17, 17)
    solver = cavity_solver(g, 100.0, SchemeConfig(dt=0.01))
    st = solver.march(cavity_rest_state(solver), 0.2)
    assert st.psi.values.min() < 0
    assert st.u[-2, 8] > 0


def test_shear_layer_initial_state():
    g = shear_case().grid(33)
    st = shear_layer_init(g)
    assert abs(st.psi.values[:-1, :-1].mean()) < 1e-12
    assert abs(st.omega.values[:-1, :-1].mean()) < 1e-10
    np.testing.assert_allclose(st.psi.values[-1], st.psi.values[0])
    np.testing.assert_allclose(st.v[:, 8], 0.05, rtol=0.02)


def test_shear_layer_conserves_mean_vorticity():
    g = shear_case().grid(33)
    solver = shear_layer_solver(g, 1e4, SchemeConfig(dt=0.01))
    st = shear_layer_init(g, solver=solver)
    m0 = st.omega.values[:-1, :-1].mean()
    st = solver.march(st, 0.2)
    assert abs(st.omega.values[:-1, :-1].mean() - m0) <= 1e-8


def test_re_must_be_positive():
    with pytest.raises(ValueError):
        manufactured_solver(make_grid(5, 5), 0.0, SchemeConfig())
