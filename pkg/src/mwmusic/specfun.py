"""Integer-order Bessel functions, Y_0/Y_1, H_0^(1) and the Jacobi-Anger series.

Algorithms (implemented in :mod:`mwmusic.kernels`):

* ``J_nu``: power series for ``x <= 12``, Miller backward recurrence normalized
  by ``J_0 + 2 sum J_2k = 1`` above.
* ``Y_0``, ``Y_1``: logarithmic power series for ``x <= 12``, Hankel asymptotic
  expansion (truncated at its smallest term) above.
* ``H_0^(1)(z)``: complex power series of ``J_0 + i Y_0`` for ``|z| <= 12``,
  complex Hankel asymptotic expansion above.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels

__all__ = [
    "SeriesBudget",
    "default_budget",
    "bessel_j",
    "bessel_j_table",
    "bessel_y",
    "hankel1_0",
    "plane_wave_series",
    "PlaneWaveResult",
    "bessel_tail_bound",
]


_I_POWERS = np.array([1.0, 1.0j, -1.0, -1.0j])


@dataclass(frozen=True)
class SeriesBudget:
    """Truncation budget for integer-order Bessel series."""

    nu_max: int
    tol: float = 1e-10

    def __post_init__(self):
        if int(self.nu_max) != self.nu_max or self.nu_max < 1:
            raise ValueError(f"nu_max must be an integer >= 1, got {self.nu_max}")
        if not self.tol > 0:
            raise ValueError(f"tol must be positive, got {self.tol}")


def default_budget(x_max: float, tol: float = 1e-10) -> SeriesBudget:
    """Budget covering arguments up to ``x_max``: ``ceil(x + 10 x^(1/3)) + 12``."""
    x_max = max(float(x_max), 0.0)
    return SeriesBudget(int(math.ceil(x_max + 10.0 * x_max ** (1.0 / 3.0))) + 12, tol)


def bessel_tail_bound(x, nu_max: int):
    """Upper bound on ``sum_{nu > nu_max} |J_nu(x)|``.

    Uses ``|J_nu(x)| <= (x/2)^nu / nu!`` and a geometric majorant of the
    remaining terms. Vectorized over ``x``.
    """
    x = np.asarray(x, dtype=float)
    h = 0.5 * x
    first_order = nu_max + 1
    with np.errstate(divide="ignore"):
        logt = first_order * np.log(np.where(h > 0, h, 1.0)) - math.lgamma(first_order + 1.0)
    first = np.where(h > 0, np.exp(logt), 0.0)
    ratio = h / (first_order + 1.0)
    return np.where(ratio < 1.0, first / np.maximum(1.0 - ratio, 1e-300), np.inf)


def bessel_j_table(nu_max: int, x) -> np.ndarray:
    """``J_0 .. J_nu_max`` at every ``x``; shape ``x.shape + (nu_max + 1,)``."""
    x = np.asarray(x, dtype=float)
    if np.any(x < 0) or not np.all(np.isfinite(x)):
        raise ValueError("bessel_j_table requires finite x >= 0")
    if nu_max < 0:
        raise ValueError("nu_max must be >= 0")
    table = kernels.bessel_j_table(int(nu_max), np.ascontiguousarray(x.ravel()))
    return table.reshape(x.shape + (nu_max + 1,))


def bessel_j(order: int, x):
    """Bessel function of the first kind ``J_order(x)`` for real ``x >= 0``.

    Negative orders use the reflection ``J_{-n} = (-1)^n J_n``.
    """
    if int(order) != order:
        raise ValueError("order must be an integer")
    order = int(order)
    n = abs(order)
    table = bessel_j_table(n, x)
    out = table[..., n]
    if order < 0 and n % 2:
        out = -out
    return out if np.ndim(out) else float(out)


def bessel_y(order: int, x):
    """Neumann function ``Y_0`` or ``Y_1`` for real ``x > 0``."""
    if order not in (0, 1):
        raise ValueError("bessel_y supports orders 0 and 1 only")
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0) or not np.all(np.isfinite(x)):
        raise ValueError("bessel_y is singular for x <= 0")
    y0, y1 = kernels.bessel_y01(np.ascontiguousarray(x.ravel()))
    out = (y0 if order == 0 else y1).reshape(x.shape)
    return out if out.ndim else float(out)


def hankel1_0(z):
    """``H_0^(1)(z) = J_0(z) + i Y_0(z)`` for complex ``z`` with ``Re(z) > 0``."""
    z = np.asarray(z, dtype=complex)
    if np.any(z == 0):
        raise ValueError("hankel1_0 is singular at z = 0")
    if np.any(z.real <= 0):
        raise ValueError("hankel1_0 requires Re(z) > 0")
    out = kernels.hankel1_0(np.ascontiguousarray(z.ravel())).reshape(z.shape)
    return out if out.ndim else complex(out)


@dataclass(frozen=True)
class PlaneWaveResult:
    value: complex
    nu_max: int
    residual_bound: float


def plane_wave_series(x: float, theta: float, budget: SeriesBudget | None = None) -> PlaneWaveResult:
    """Truncated Jacobi-Anger expansion of ``exp(i x cos(theta))``.

    Sums ``J_0(x) + sum_{0<|nu|<=nu_max} i^nu J_nu(x) e^{i nu theta}``. The
    returned ``residual_bound`` bounds the dropped orders; when it exceeds
    ``budget.tol`` the budget has saturated and the caller should raise it.
    """
    if x < 0:
        raise ValueError("x must be >= 0")
    if budget is None:
        budget = default_budget(x)
    table = bessel_j_table(budget.nu_max, np.array([x]))[0]
    nu = np.arange(1, budget.nu_max + 1)
    ipow = _I_POWERS[nu % 4]
    refl = np.where(nu % 2, -1.0, 1.0)
    pos = ipow * table[1:] * np.exp(1j * nu * theta)
    neg = (1.0 / ipow) * refl * table[1:] * np.exp(-1j * nu * theta)
    value = table[0] + pos.sum() + neg.sum()
    bound = 2.0 * float(bessel_tail_bound(x, budget.nu_max))
    return PlaneWaveResult(complex(value), budget.nu_max, bound)
