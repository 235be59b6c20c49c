import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cc4oc.grid import ScalarField, make_grid, sample
from cc4oc.harness import (ERROR_COLUMNS, EstimationError, RunConfig, convergence,
                           error_norms, observed_order, perceived_order,
                           perceived_order_halving, restrict_to_common, run_case,
                           simulate, stability_table, temporal)


def field(g, v):
    return ScalarField(g, np.asarray(v, dtype=float))


def test_identical_fields_have_zero_norms():
    g = make_grid(5, 5)
    f = field(g, np.arange(25.0).reshape(5, 5))
    r = error_norms(f, f)
    assert (r.l1, r.l2, r.linf) == (0.0, 0.0, 0.0)
    assert r.dims == (5, 5)


def test_constant_error_gives_equal_norms():
    g = make_grid(6, 4)
    r = error_norms(field(g, np.full((4, 6), -0.25)), field(g, np.zeros((4, 6))))
    assert r.l1 == pytest.approx(0.25) and r.l2 == pytest.approx(0.25)
    assert r.linf == 0.25


def test_sine_bump_calibration():
    g = make_grid(401, 401)
    X, Y = g.mesh()
    e = field(g, 3.0 * np.sin(np.pi * X) * np.sin(np.pi * Y))
    r = error_norms(e, field(g, np.zeros_like(X)))
    assert r.l1 / r.linf == pytest.approx(4 / np.pi ** 2, rel=1e-2)
    assert r.l2 / r.linf == pytest.approx(0.5, rel=1e-2)


def test_cells_convention_rescales_sums():
    g = make_grid(5, 3)
    e = field(g, np.ones((3, 5)))
    r = error_norms(e, field(g, np.zeros((3, 5))), convention="cells")
    assert r.l1 == pytest.approx(15 / 8)
    assert r.l2 == pytest.approx(math.sqrt(15 / 8))
    with pytest.raises(ValueError):
        error_norms(e, e, convention="median")


def test_grid_mismatch_rejected():
    a = field(make_grid(5, 5), np.zeros((5, 5)))
    b = field(make_grid(5, 5, lx=2.0), np.zeros((5, 5)))
    with pytest.raises(ValueError):
        error_norms(a, b)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(-1e3, 1e3), min_size=9, max_size=9))
def test_norm_ordering(vals):
    g = make_grid(3, 3)
    r = error_norms(field(g, np.reshape(vals, (3, 3))), field(g, np.zeros((3, 3))))
    assert r.linf >= r.l2 * (1 - 1e-12) and r.l2 >= r.l1 * (1 - 1e-12) and r.l1 >= 0


def test_observed_order_examples():
    assert observed_order(16e-3, 1e-3) == pytest.approx(4.0)
    assert observed_order(6.676e-6, 4.354e-7) == pytest.approx(3.94, abs=5e-3)
    assert observed_order(2e-5, 2e-5) == 0.0
    with pytest.raises(EstimationError):
        observed_order(0.0, 1.0)


def test_perceived_order_examples():
    assert perceived_order(17.0, 1.0, 4.0, 2.0, 1.0) == pytest.approx(4.0, abs=1e-8)
    assert perceived_order(3.0, 1.0, 0.4, 0.2, 0.1) == pytest.approx(1.0, abs=1e-8)
    hs = [2 * np.pi / n for n in (64, 128, 256)]
    assert perceived_order(2.041e-4, 1.128e-5, *hs) == pytest.approx(4.10, abs=5e-3)


@settings(max_examples=50, deadline=None)
@given(st.floats(2.01, 1000.0), st.floats(1e-3, 1.0))
def test_bisection_matches_closed_form(ratio, h3):
    p = perceived_order(ratio, 1.0, 4 * h3, 2 * h3, h3)
    assert p == pytest.approx(perceived_order_halving(ratio, 1.0), abs=1e-8)


def test_perceived_order_errors():
    with pytest.raises(EstimationError):
        perceived_order(1.0, 2.0, 4, 2, 1)
    with pytest.raises(EstimationError):
        perceived_order(3.0, 1.0, 1, 2, 4)
    with pytest.raises(EstimationError):  # ratio 1.0001 needs p beyond 10 on no grid
        perceived_order(1e9, 1.0, 4, 2, 1)


def test_restrict_examples():
    fine = make_grid(5, 5)
    f = field(fine, np.arange(25.0).reshape(5, 5))
    assert restrict_to_common(f, fine).values.tolist() == f.values.tolist()
    c = restrict_to_common(f, make_grid(3, 3))
    np.testing.assert_array_equal(c.values, f.values[::2, ::2])
    fn = lambda x, y, t: np.cos(3 * x) * np.exp(y)
    fine = make_grid(33, 17)
    coarse = make_grid(9, 5)
    np.testing.assert_array_equal(restrict_to_common(sample(fine, fn, 0.0), coarse).values,
                                  sample(coarse, fn, 0.0).values)
    with pytest.raises(ValueError):
        restrict_to_common(f, make_grid(4, 4))
    with pytest.raises(ValueError):
        restrict_to_common(f, make_grid(3, 3, lx=2.0))


def test_run_config_validation():
    with pytest.raises(ValueError):
        RunConfig("vortex", 11)
    with pytest.raises(ValueError):
        RunConfig("taylor", 11, iota=1.5)
    with pytest.raises(ValueError):
        RunConfig("taylor", 11, dt=-1.0)
    with pytest.raises(ValueError):
        RunConfig("taylor", 2)
    assert RunConfig("cavity", 65).time_step() == 0.01
    assert RunConfig("taylor", 11).time_step() == pytest.approx(0.01)


def test_errors_carry_case_context():
    cfg = RunConfig("gauss", 11, a=-1.0, t_end=0.01)
    with pytest.raises(Exception, match="gauss 11x11"):
        simulate(cfg)


def test_taylor_convergence_table():
    rows = convergence("taylor", [11, 21])
    assert [r[1] for r in rows] == [11, 21]
    assert rows[0][-1] is None
    assert rows[1][8] == pytest.approx(6.676e-6, rel=0.05)
    assert rows[1][-1] == pytest.approx(3.87, abs=0.15)


def test_taylor_cells_norms_reproduce_reference_row():
    r = simulate(RunConfig("taylor", 21, norms="cells")).reports[0]
    assert r.l1 == pytest.approx(2.598e-6, rel=0.01)
    assert r.l2 == pytest.approx(3.274e-6, rel=0.01)


def test_temporal_table_orders():
    rows = temporal("taylor", 21, [0.02, 0.01], t_end=0.2)
    assert rows[0][3] == 0.02 and rows[1][3] == 0.01
    assert rows[1][-1] == pytest.approx(2.0, abs=0.1)


def test_run_case_csv_is_deterministic(tmp_path):
    outs = []
    for name in ("a.csv", "b.csv"):
        cfg = RunConfig("gauss", 11, t_end=0.05, out=str(tmp_path / name))
        run_case(cfg)
        outs.append((tmp_path / name).read_bytes())
    assert outs[0] == outs[1]
    lines = outs[0].decode("utf-8").splitlines()
    assert lines[0] == ",".join(ERROR_COLUMNS)
    assert lines[1].startswith("gauss,11,11,") and lines[1].endswith(",")


def test_shear_run_writes_fields(tmp_path):
    out = tmp_path / "shear.csv"
    run_case(RunConfig("shear", 9, dt=0.01, t_end=0.02, out=str(out)))
    lines = out.read_text().splitlines()
    assert lines[0] == "t,x,y,omega,psi,u,v"
    assert len(lines) == 82


def test_stability_table_reproducible():
    a = stability_table(0.5, 5, n_theta=16, seed=3)
    assert a == stability_table(0.5, 5, n_theta=16, seed=3)
    assert all(r[7] <= 1 + 1e-12 for r in a)
