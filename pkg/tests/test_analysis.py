import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cc4oc.analysis import (ALL_SCHEMES, CharacteristicQuery, SchemeId, StabilityQuery,
                            amplification_factor, characteristic, characteristic_curve,
                            explicit_blowup_example, max_gain_grid, nondimensional,
                            stability_margin, stability_scan, symbol_parts, theta_sweep,
                            wavenumber_table)

PI = math.pi


def series_symbol(scheme, kh, h, c):
    """Leading terms of each symbol about kh = 0 (oracle for consistency)."""
    k = kh / h
    return k * k + 1j * c * k


def test_cc4oc_at_nyquist():
    h = 0.1
    lam = characteristic(SchemeId.CC4OC, CharacteristicQuery(PI, h, 3.0))
    assert lam.real == pytest.approx(8 / h ** 2)
    assert abs(lam.imag) < 1e-10


def test_exact_symbol():
    assert characteristic("Exact", CharacteristicQuery(0.1, 0.1, 2.0)) == pytest.approx(1 + 2j)


def test_cd_quarter_wave():
    h, c = 0.1, 3.0
    lam = characteristic(SchemeId.CD, CharacteristicQuery(PI / 2, h, c))
    assert lam == pytest.approx(2 / h ** 2 + 1j * c / h)


@pytest.mark.parametrize("scheme", ALL_SCHEMES)
def test_consistency_small_kh(scheme):
    q = CharacteristicQuery(0.01, 0.1, 1.0)
    lam = characteristic(scheme, q)
    ref = series_symbol(scheme, q.kappa_h, q.h, q.c)
    assert abs(lam - ref) / abs(ref) <= 1e-3


def test_imaginary_parts_agree():
    kh = np.linspace(1e-6, PI, 2001)
    for h, c in [(0.1, 1.0), (0.02, 1e4), (1.0, 0.1)]:
        a = characteristic_curve("CC4OC", kh, h, c).imag
        b = characteristic_curve("PDE", kh, h, c).imag
        assert np.abs(a - b).max() <= 1e-13 * max(1.0, np.abs(a).max())


def test_pde_real_part_matches_second_derivative_stencil():
    # (1, 10, 1) phi_xx = 12/h^2 (1, -2, 1) phi applied to exp(I kappa x)
    h = 0.05
    kh = np.linspace(0.01, PI, 50)
    sym = 12 * (2 - 2 * np.cos(kh)) / (h ** 2 * (10 + 2 * np.cos(kh)))
    np.testing.assert_allclose(characteristic_curve("PDE", kh, h, 1.0).real, sym, rtol=1e-13)


@pytest.mark.parametrize("scheme", [SchemeId.HOC, SchemeId.RHOC])
def test_zero_speed_limits(scheme):
    h = 0.1
    at0 = characteristic(scheme, CharacteristicQuery(0.7, h, 0.0))
    near0 = characteristic(scheme, CharacteristicQuery(0.7, h, 1e-6))
    assert at0 == pytest.approx(near0, rel=1e-6)


@settings(max_examples=50, deadline=None)
@given(st.sampled_from(ALL_SCHEMES), st.floats(-10, 10), st.floats(0.01, 1.0),
       st.floats(-50, 50))
def test_periodic_and_conjugate_symmetric(scheme, kh, h, c):
    if scheme is SchemeId.EXACT:
        return
    lam = characteristic_curve(scheme, np.array([kh, kh + 2 * PI, -kh]), h, c)
    scale = max(1.0, abs(lam[0]))
    assert abs(lam[1] - lam[0]) <= 1e-9 * scale
    assert abs(lam[2] - np.conj(lam[0])) <= 1e-9 * scale


def test_nondimensional_exact_curves():
    kh = np.linspace(0.1, PI, 10)
    re, im = nondimensional(characteristic_curve("Exact", kh, 0.2, 5.0), 0.2, 5.0)
    np.testing.assert_allclose(re, kh ** 2)
    np.testing.assert_allclose(im, kh)
    with pytest.raises(ValueError):
        nondimensional(1 + 1j, 0.1, 0.0)


def test_wavenumber_table_layout():
    rows = wavenumber_table([0.1, 100.0], 8)
    assert len(rows) == 2 * 8 * len(ALL_SCHEMES)
    assert {r[2] for r in rows} == {s.value for s in ALL_SCHEMES}
    assert rows[-1][1] == pytest.approx(PI)


def test_query_validation():
    with pytest.raises(ValueError):
        CharacteristicQuery(1.0, 0.0)
    with pytest.raises(ValueError):
        StabilityQuery(0, 0, 0.1, 0.1, 1, 1, 0.0, 0.1, 0.5)
    with pytest.raises(ValueError):
        StabilityQuery(0, 0, 0.1, 0.1, 1, 1, 1.0, 0.0, 0.5)


def test_constant_mode_neutral():
    q = StabilityQuery(0.0, 0.0, 0.1, 0.2, 3.0, -4.0, 1.0, 0.5, 0.5)
    assert amplification_factor(q) == pytest.approx(1.0)


@settings(max_examples=100, deadline=None)
@given(st.floats(0, 2 * PI), st.floats(0, 2 * PI), st.floats(1e-3, 1), st.floats(1e-3, 1),
       st.floats(-1e3, 1e3), st.floats(-1e3, 1e3), st.floats(1e-3, 1e3),
       st.floats(1e-6, 10))
def test_backward_euler_contracts(tx, ty, h, k, c, d, a, dt):
    q = StabilityQuery(tx, ty, h, k, c, d, a, dt, 1.0)
    A, B = symbol_parts(tx, ty, h, k, c, d, a, dt)
    assert A <= 0
    assert abs(amplification_factor(q)) == pytest.approx(1 / abs(1 - (A + 1j * B)), rel=1e-12)
    assert abs(amplification_factor(q)) <= 1 + 1e-13


@settings(max_examples=100, deadline=None)
@given(st.floats(0, 2 * PI), st.floats(0, 2 * PI), st.floats(1e-3, 1), st.floats(1e-3, 1),
       st.floats(-1e3, 1e3), st.floats(-1e3, 1e3), st.floats(1e-6, 10),
       st.floats(0.5, 1.0))
def test_margin_sign_matches_gain(tx, ty, h, k, c, d, dt, iota):
    q = StabilityQuery(tx, ty, h, k, c, d, 1.0, dt, iota)
    A, B = symbol_parts(tx, ty, h, k, c, d, 1.0, dt)
    assert stability_margin(q) <= 1e-9 * (1 + A * A + B * B)
    assert abs(amplification_factor(q)) <= 1 + 1e-12


def test_crank_nicolson_sweep():
    res = stability_scan(0.5, theta_sweep(64, 0.1, 0.1, 10.0, 10.0, 1.0, 1.0, 0.5))
    assert res.max_abs_g <= 1 + 1e-13


@pytest.mark.parametrize("A", [0.0, -0.1, -3.0, -1e4])
def test_real_mobius_contraction(A):
    g = (1 + A / 2) / (1 - A / 2)
    assert abs(g) <= 1


def test_explicit_blowup():
    q = explicit_blowup_example()
    A, B = symbol_parts(q.theta_x, q.theta_y, q.h, q.k, q.c, q.d, q.a, q.dt)
    assert A == pytest.approx(-3.0)
    assert abs(B) < 1e-12
    assert abs(amplification_factor(q)) == pytest.approx(2.0)


def test_scan_reports_argmax():
    n = 16
    qs = theta_sweep(n, 0.1, 0.1, 0.0, 0.0, 1.0, 3 * 0.01 / 16, 0.0)
    res = stability_scan(0.0, qs)
    assert (res.theta_x, res.theta_y) == pytest.approx((PI, PI))
    g, tx, ty = max_gain_grid(n, 0.1, 0.1, 0.0, 0.0, 1.0, 3 * 0.01 / 16, 0.0)
    assert g == pytest.approx(res.max_abs_g)
    with pytest.raises(ValueError):
        stability_scan(0.5, [])


@pytest.mark.parametrize("scheme", [SchemeId.HOC, SchemeId.RHOC])
@pytest.mark.parametrize("c", [0.5, 50.0, 1000.0])
def test_hoc_family_matches_literal_coefficients(scheme, c):
    h = 0.1
    pe = c * h
    if scheme is SchemeId.HOC:
        w1 = 1 + pe ** 2 / 12
    else:
        w1 = (1 - pe ** 2 / 12 + pe ** 4 / 144) / (1 - pe ** 2 / 6 + pe ** 4 / 36)
    w2 = (1 - w1) / c ** 2 + h ** 2 / 6
    w3 = (1 - w1) / c
    kh = np.linspace(0.05, PI, 40)
    l1 = (2 - 2 * np.cos(kh)) / h ** 2
    l2 = np.sin(kh) / h
    ref = (w1 * l1 + 1j * c * l2) / ((1 - w2 * l1) + 1j * w3 * l2)
    np.testing.assert_allclose(characteristic_curve(scheme, kh, h, c), ref, rtol=1e-9)
