"""Fourier analysis: modified wavenumbers of compact schemes and the von
Neumann amplification factor of the weighted time discretisation.

A discrete operator acting on ``exp(I kappa x)`` multiplies it by a complex
symbol ``lambda``; for ``-phi_xx + c phi_x`` the exact symbol is
``kappa^2 + I c kappa``.  The real part measures dissipation, the imaginary
part dispersion.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np


class SchemeId(str, enum.Enum):
    EXACT = "Exact"
    CD = "CD"
    HOC = "HOC"
    PDE = "PDE"
    RHOC = "RHOC"
    CC4OC = "CC4OC"


ALL_SCHEMES = tuple(SchemeId)


@dataclass(frozen=True)
class CharacteristicQuery:
    """One Fourier mode ``kappa_h = kappa * h`` on spacing ``h`` with speed ``c``."""

    kappa_h: float
    h: float
    c: float = 1.0

    def __post_init__(self):
        if not self.h > 0:
            raise ValueError("h must be positive")

    @property
    def pe(self) -> float:
        """Cell Reynolds number ``c h``."""
        return self.c * self.h


def _symbol(scheme: SchemeId, kh, h: float, c: float):
    kh = np.asarray(kh, dtype=float)
    cs, sn = np.cos(kh), np.sin(kh)
    lam1 = (2.0 - 2.0 * cs) / h ** 2
    lam2 = sn / h
    pe = c * h
    if scheme is SchemeId.EXACT:
        kappa = kh / h
        return kappa ** 2 + 1j * c * kappa
    if scheme is SchemeId.CD:
        return lam1 + 1j * c * lam2
    if scheme is SchemeId.CC4OC:
        return ((5.0 - 4.0 * cs - cs ** 2) / (h ** 2 * (2.0 + cs))
                + 1j * c * 3.0 * sn / (h * (2.0 + cs)))
    if scheme is SchemeId.PDE:
        # (1, 10, 1) second-derivative Pade stencil; its symbol has 5 + cos
        return (12.0 * (1.0 - cs) / (h ** 2 * (5.0 + cs))
                + 1j * c * 3.0 * sn / (h * (2.0 + cs)))
    # (1 - w1) / c^2 and (1 - w1) / c are written without the 1/c factors to
    # avoid cancellation; at c = 0 they reduce to w2 = h^2/12, w3 = 0
    if scheme is SchemeId.HOC:
        w1 = 1.0 + pe ** 2 / 12.0
        q = -h ** 2 / 12.0  # (1 - w1) / c^2
    elif scheme is SchemeId.RHOC:
        p2 = pe ** 2
        den = 1.0 - p2 / 6.0 + p2 ** 2 / 36.0
        w1 = (1.0 - p2 / 12.0 + p2 ** 2 / 144.0) / den
        q = h ** 2 * (-1.0 / 12.0 + p2 / 48.0) / den
    else:
        raise ValueError(f"unknown scheme {scheme!r}")
    w2 = q + h ** 2 / 6.0
    w3 = q * c
    return (w1 * lam1 + 1j * c * lam2) / ((1.0 - w2 * lam1) + 1j * w3 * lam2)


def characteristic(scheme, q: CharacteristicQuery) -> complex:
    """Symbol ``lambda`` of ``scheme`` for the mode described by ``q``.

    Examples
    --------
    >>> characteristic(SchemeId.EXACT, CharacteristicQuery(0.1, 0.1, 2.0))
    (1+2j)
    """
    return complex(_symbol(SchemeId(scheme), q.kappa_h, q.h, q.c))


def characteristic_curve(scheme, kappa_h, h: float, c: float) -> np.ndarray:
    """Vectorised :func:`characteristic` over an array of ``kappa_h``."""
    if not h > 0:
        raise ValueError("h must be positive")
    return np.asarray(_symbol(SchemeId(scheme), kappa_h, h, c), dtype=complex)


def nondimensional(lam, h: float, c: float):
    """``(h^2 Re(lambda), h Im(lambda) / c)``, the scaling used for plots.

    With this scaling the exact curves are ``(kh)^2`` and ``kh`` and depend on
    ``c`` and ``h`` only through ``Pe = c h``.
    """
    if c == 0:
        raise ValueError("imaginary part cannot be scaled by c = 0")
    lam = np.asarray(lam)
    return h ** 2 * lam.real, h * lam.imag / c


def wavenumber_table(pe_values: Sequence[float], samples: int, h: float = 1.0):
    """Rows ``(pe, kappa_h, scheme, re, im)`` of non-dimensional symbols.

    ``kappa_h`` runs over ``samples`` equispaced points in ``(0, pi]``.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    kh = np.pi * np.arange(1, samples + 1) / samples
    rows = []
    for pe in pe_values:
        c = pe / h
        curves = {s: nondimensional(characteristic_curve(s, kh, h, c), h, c)
                  for s in ALL_SCHEMES}
        for m in range(samples):
            for s in ALL_SCHEMES:
                re, im = curves[s]
                rows.append((float(pe), float(kh[m]), s.value, float(re[m]), float(im[m])))
    return rows


# -- von Neumann stability ---------------------------------------------------

@dataclass(frozen=True)
class StabilityQuery:
    """Phase angles and parameters of one Fourier mode of the 2D scheme."""

    theta_x: float
    theta_y: float
    h: float
    k: float
    c: float
    d: float
    a: float
    dt: float
    iota: float

    def __post_init__(self):
        if not self.a > 0:
            raise ValueError("a must be positive")
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if not (self.h > 0 and self.k > 0):
            raise ValueError("spacings must be positive")


def symbol_parts(theta_x, theta_y, h, k, c, d, a, dt):
    """Real part ``A`` (always ``<= 0``) and imaginary part ``B`` of the
    spatial symbol times ``dt / a``."""
    cx, cy = np.cos(theta_x), np.cos(theta_y)
    A = dt / a * ((cx ** 2 + 4 * cx - 5) / (h ** 2 * (2 + cx))
                  + (cy ** 2 + 4 * cy - 5) / (k ** 2 * (2 + cy)))
    B = dt / a * (c * 3 * np.sin(theta_x) / (h * (2 + cx))
                  + d * 3 * np.sin(theta_y) / (k * (2 + cy)))
    return A, B


def _gain(A, B, iota):
    z = A + 1j * B
    den = 1.0 - iota * z
    if np.any(np.abs(den) < 1e-300):
        raise ZeroDivisionError("amplification factor denominator vanishes")
    return (1.0 + (1.0 - iota) * z) / den


def amplification_factor(q: StabilityQuery) -> complex:
    """Per-step growth ``G`` of the Fourier mode ``q``.

    ``G = (1 + (1 - iota) z) / (1 - iota z)`` with ``z = A + I B``.
    """
    A, B = symbol_parts(q.theta_x, q.theta_y, q.h, q.k, q.c, q.d, q.a, q.dt)
    return complex(_gain(A, B, q.iota))


def stability_margin(q: StabilityQuery) -> float:
    """``2A + (A^2 + B^2)(1 - 2 iota)``; non-positive exactly when ``|G| <= 1``."""
    A, B = symbol_parts(q.theta_x, q.theta_y, q.h, q.k, q.c, q.d, q.a, q.dt)
    return float(2 * A + (A * A + B * B) * (1 - 2 * q.iota))


@dataclass(frozen=True)
class ScanResult:
    max_abs_g: float
    theta_x: float
    theta_y: float
    query: StabilityQuery


def theta_sweep(n: int, h: float, k: float, c: float, d: float, a: float,
                dt: float, iota: float) -> list[StabilityQuery]:
    """All ``n x n`` phase pairs ``2 pi (m_x, m_y) / n``."""
    th = 2 * np.pi * np.arange(n) / n
    return [StabilityQuery(float(tx), float(ty), h, k, c, d, a, dt, iota)
            for ty in th for tx in th]


def stability_scan(iota: float, queries: Iterable[StabilityQuery]) -> ScanResult:
    """Largest ``|G|`` over ``queries``, each evaluated with the given ``iota``."""
    qs = list(queries)
    if not qs:
        raise ValueError("empty sweep")
    cols = np.array([(q.theta_x, q.theta_y, q.h, q.k, q.c, q.d, q.a, q.dt)
                     for q in qs]).T
    A, B = symbol_parts(*cols)
    g = np.abs(_gain(A, B, iota))
    m = int(np.argmax(g))
    return ScanResult(float(g[m]), qs[m].theta_x, qs[m].theta_y, qs[m])


def max_gain_grid(n: int, h: float, k: float, c: float, d: float, a: float,
                  dt: float, iota: float) -> tuple[float, float, float]:
    """Array form of a ``theta_sweep`` scan: ``(max |G|, theta_x, theta_y)``."""
    th = 2 * np.pi * np.arange(n) / n
    TX, TY = np.meshgrid(th, th)
    A, B = symbol_parts(TX, TY, h, k, c, d, a, dt)
    g = np.abs(_gain(A, B, iota))
    j, i = np.unravel_index(int(np.argmax(g)), g.shape)
    return float(g[j, i]), float(th[i]), float(th[j])


def explicit_blowup_example(h: float = 0.1, a: float = 1.0) -> StabilityQuery:
    """A forward-Euler (``iota = 0``) mode with ``A = -3``, ``B = 0``, so ``|G| = 2``.

    At ``theta = pi`` in both directions each term of ``A`` is ``-8 / h^2``.
    """
    dt = 3.0 * a * h * h / 16.0
    return StabilityQuery(math.pi, math.pi, h, h, 0.0, 0.0, a, dt, 0.0)
