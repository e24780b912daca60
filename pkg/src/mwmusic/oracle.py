"""Closed-form Bessel-series structure of the zero-diagonal imaging function.

For a single target at ``r_s`` and a test point ``r`` with
``r - r_s = d [cos phi, sin phi]``, the far-field imaging function is

    F(r) ~ ((N-1)/N) |1 - J_0(kd)^2 - Re(E)/N|^(-1/2),
    E = 2 J_0(kd) S + S S' / N,

where ``S = sum_n sum_{nu != 0} i^nu J_nu(kd) e^{i nu (theta_n - phi)}`` and
``S'`` is its sign-flipped companion. Several targets add their bracketed
terms inside the absolute value. The wavenumber here is real: callers pass
``Re(k)``, whereas the forward model keeps the complex ``k``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .music import CLAMP_RATIO, ImageMap
from .scene import Scene, antenna_angles
from .specfun import SeriesBudget, bessel_j_table, bessel_tail_bound, default_budget

__all__ = [
    "ResidualSum",
    "residual_sum",
    "residual_sums",
    "far_field_margin",
    "oracle_terms",
    "oracle_map_single",
    "oracle_map_multi",
]

FAR_FIELD_FACTOR = 10.0
_COMPANION_TOL = 1e-9


@dataclass(frozen=True)
class ResidualSum:
    value: complex
    companion: complex
    nu_max_used: int
    tail_bound: float


def residual_sums(k_real: float, dist, phi, antenna_angles, nu_max: int, parity: str | None = None):
    """Vectorized residual sums ``(S, S')`` at many (dist, phi) pairs.

    ``parity`` restricts the orders to odd or even ``|nu|``.
    """
    dist = np.asarray(dist, dtype=float).ravel()
    phi = np.asarray(phi, dtype=float).ravel()
    if np.any(dist < 0):
        raise ValueError("dist must be >= 0")
    table = bessel_j_table(nu_max, k_real * dist)
    if parity is not None:
        if parity not in ("odd", "even"):
            raise ValueError("parity must be 'odd', 'even' or None")
        drop = 0 if parity == "odd" else 1
        table = table.copy()
        table[:, 1:][:, (np.arange(1, nu_max + 1) % 2) == drop] = 0.0
    thetas = np.ascontiguousarray(np.asarray(antenna_angles, dtype=float))
    return kernels.residual_sums(np.ascontiguousarray(table), np.ascontiguousarray(phi), thetas)


def residual_sum(k_real: float, dist: float, phi_star: float, antenna_angles,
                 budget: SeriesBudget | None = None, parity: str | None = None) -> ResidualSum:
    """Residual double sum for one test point, with a tail bound for the dropped orders."""
    if dist < 0:
        raise ValueError("dist must be >= 0")
    x = k_real * dist
    if budget is None:
        budget = default_budget(x)
    s, sp = residual_sums(k_real, [dist], [phi_star], antenna_angles, budget.nu_max, parity)
    n_ant = len(antenna_angles)
    tail = 2.0 * n_ant * float(bessel_tail_bound(x, budget.nu_max))
    return ResidualSum(complex(s[0]), complex(sp[0]), budget.nu_max, tail)


def far_field_margin(k_real: float) -> float:
    """Minimum antenna distance kept in theorem comparisons: ``10 / (4 k)``."""
    return FAR_FIELD_FACTOR / (4.0 * k_real)


def oracle_terms(k_real: float, thetas, target, points, nu_max: int) -> np.ndarray:
    """``1 - J_0^2 - Re(E)/N`` for one target at every point."""
    pts = np.asarray(points, dtype=float)
    diff = pts - np.asarray(target, dtype=float)
    dist = np.hypot(diff[:, 0], diff[:, 1])
    phi = np.arctan2(diff[:, 1], diff[:, 0])
    n_ant = len(thetas)
    j0 = bessel_j_table(0, k_real * dist)[:, 0]
    s, sp = residual_sums(k_real, dist, phi, thetas, nu_max)
    scale = np.maximum(np.abs(s), 1.0)
    if np.any(np.abs(sp - np.conj(s)) > _COMPANION_TOL * scale):
        raise ArithmeticError("companion residual sum disagrees with conj(S)")
    e = 2.0 * j0 * s + s * sp / n_ant
    return 1.0 - j0**2 - e.real / n_ant


def _oracle_map(scene: Scene, targets, nx: int, ny: int | None, budget: SeriesBudget | None) -> ImageMap:
    ny = nx if ny is None else ny
    k_real = scene.k.real
    xs, ys = scene.roi.axes(nx, ny)
    gx, gy = np.meshgrid(xs, ys)
    pts = np.column_stack((gx.ravel(), gy.ravel()))
    pos = scene.positions()
    thetas = antenna_angles(scene.array)
    n_ant = scene.array.n
    dmin = np.min(np.linalg.norm(pts[:, None, :] - pos[None, :, :], axis=-1), axis=1)
    keep = (dmin >= far_field_margin(k_real)) & scene.roi.mask(pts[:, 0], pts[:, 1])
    if budget is None:
        corners = np.array([[xs[0], ys[0]], [xs[0], ys[-1]], [xs[-1], ys[0]], [xs[-1], ys[-1]]])
        reach = max(np.max(np.linalg.norm(corners - np.asarray(t), axis=1)) for t in targets)
        budget = default_budget(k_real * reach)
    total = np.zeros(int(keep.sum()))
    for t in targets:
        total += oracle_terms(k_real, thetas, t, pts[keep], budget.nu_max)
    prefactor = (n_ant - 1) / n_ant
    values = np.zeros(pts.shape[0])
    values[keep] = prefactor / np.maximum(np.sqrt(np.abs(total)), CLAMP_RATIO)
    meta = {"kind": "oracle", "targets": len(targets), "nu_max": budget.nu_max,
            "frequency_hz": scene.frequency}
    return ImageMap(xs, ys, values.reshape(ny, nx), meta)


def oracle_map_single(scene: Scene, nx: int = 201, ny: int | None = None,
                      budget: SeriesBudget | None = None) -> ImageMap:
    """Closed-form map for a single-anomaly scene.

    Nodes closer to an antenna than :func:`far_field_margin` are set to 0,
    the limiting value of the imaging function at the antennas.
    """
    if len(scene.anomalies) != 1:
        raise ValueError("oracle_map_single needs exactly one anomaly; use oracle_map_multi")
    return _oracle_map(scene, [scene.anomalies[0].center], nx, ny, budget)


def oracle_map_multi(scene: Scene, nx: int = 201, ny: int | None = None,
                     budget: SeriesBudget | None = None) -> ImageMap:
    if not scene.anomalies:
        raise ValueError("scene has no anomalies")
    return _oracle_map(scene, [a.center for a in scene.anomalies], nx, ny, budget)

