"""Geometry, materials and frequency of a circular-array imaging scene.

All quantities are SI. Permittivities are stored relative to the vacuum value
``EPS0``; conductivities in S/m; lengths in metres; frequencies in Hz.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

EPS0 = 8.854e-12
MU0 = 4.0e-7 * math.pi

__all__ = [
    "EPS0",
    "MU0",
    "Medium",
    "AntennaArray",
    "Anomaly",
    "Roi",
    "Scene",
    "SmallAnomalyCheck",
    "wavenumber",
    "antenna_angles",
    "antenna_positions",
    "is_small_anomaly",
]


@dataclass(frozen=True)
class Medium:
    eps_r: float
    sigma: float = 0.0
    mu: float = MU0

    def __post_init__(self):
        if not self.eps_r > 0:
            raise ValueError(f"eps_r must be > 0, got {self.eps_r}")
        if not self.sigma >= 0:
            raise ValueError(f"sigma must be >= 0, got {self.sigma}")
        if not self.mu > 0:
            raise ValueError(f"mu must be > 0, got {self.mu}")

    @property
    def permittivity(self) -> float:
        return self.eps_r * EPS0


@dataclass(frozen=True)
class AntennaArray:
    """``n`` antennas on a circle, ``theta_k = start + direction * 2 pi (k-1) / n``."""

    n: int
    radius: float
    start_angle: float = 0.0
    direction: int = 1

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 3:
            raise ValueError(f"antenna count must be an integer >= 3, got {self.n}")
        if not self.radius > 0:
            raise ValueError(f"array radius must be > 0, got {self.radius}")
        if self.direction not in (1, -1):
            raise ValueError(f"direction must be +1 or -1, got {self.direction}")

    @classmethod
    def reference_ring(cls, n: int = 16, radius: float = 0.09) -> "AntennaArray":
        """Clockwise ring starting at 3 pi / 2, the layout of the bundled scenes."""
        return cls(n, radius, 1.5 * math.pi, -1)


@dataclass(frozen=True)
class Anomaly:
    eps_r: float
    sigma: float
    center: tuple[float, float]
    radius: float
    label: str | None = None

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError(f"anomaly radius must be > 0, got {self.radius}")
        if not self.eps_r > 0:
            raise ValueError(f"anomaly eps_r must be > 0, got {self.eps_r}")
        if not self.sigma >= 0:
            raise ValueError(f"anomaly sigma must be >= 0, got {self.sigma}")
        if len(self.center) != 2:
            raise ValueError("anomaly center must be an (x, y) pair")
        object.__setattr__(self, "center", (float(self.center[0]), float(self.center[1])))

    @property
    def area(self) -> float:
        return math.pi * self.radius**2


@dataclass(frozen=True)
class Roi:
    """Axis-aligned imaging rectangle; ``circular`` masks it to the inscribed ellipse."""

    xmin: float = -0.1
    xmax: float = 0.1
    ymin: float = -0.1
    ymax: float = 0.1
    circular: bool = False

    def __post_init__(self):
        if not (self.xmax > self.xmin and self.ymax > self.ymin):
            raise ValueError("ROI must have xmax > xmin and ymax > ymin")

    def contains(self, point, strict: bool = True) -> bool:
        x, y = point
        if strict:
            inside = self.xmin < x < self.xmax and self.ymin < y < self.ymax
        else:
            inside = self.xmin <= x <= self.xmax and self.ymin <= y <= self.ymax
        if inside and self.circular:
            return bool(self.mask(np.array([x]), np.array([y]))[0])
        return inside

    def axes(self, nx: int, ny: int | None = None):
        ny = nx if ny is None else ny
        return np.linspace(self.xmin, self.xmax, nx), np.linspace(self.ymin, self.ymax, ny)

    def mask(self, x, y):
        """True for points kept by the circular mask (always True when not circular)."""
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        if not self.circular:
            return np.ones(np.broadcast(x, y).shape, dtype=bool)
        cx, cy = 0.5 * (self.xmin + self.xmax), 0.5 * (self.ymin + self.ymax)
        ax, ay = 0.5 * (self.xmax - self.xmin), 0.5 * (self.ymax - self.ymin)
        return ((x - cx) / ax) ** 2 + ((y - cy) / ay) ** 2 <= 1.0 + 1e-12


@dataclass(frozen=True)
class Scene:
    medium: Medium
    array: AntennaArray
    anomalies: tuple[Anomaly, ...] = ()
    frequency: float = 1.2e9
    roi: Roi = field(default_factory=Roi)

    def __post_init__(self):
        if not self.frequency > 0:
            raise ValueError(f"frequency must be > 0, got {self.frequency}")
        object.__setattr__(self, "anomalies", tuple(self.anomalies))
        for i, anomaly in enumerate(self.anomalies):
            if not self.roi.contains(anomaly.center):
                raise ValueError(f"anomaly {i} center {anomaly.center} lies outside the ROI")

    @property
    def omega(self) -> float:
        return 2.0 * math.pi * self.frequency

    @property
    def k(self) -> complex:
        return wavenumber(self.medium, self.frequency)

    def positions(self) -> np.ndarray:
        return antenna_positions(self.array)

    def with_anomalies(self, anomalies) -> "Scene":
        return Scene(self.medium, self.array, tuple(anomalies), self.frequency, self.roi)


def wavenumber(medium: Medium, frequency: float) -> complex:
    """Background wavenumber from ``k^2 = omega^2 mu (eps + i sigma / omega)``.

    Principal root, so ``Re(k) > 0`` and ``Im(k) >= 0``.
    """
    if not frequency > 0:
        raise ValueError(f"frequency must be > 0, got {frequency}")
    omega = 2.0 * math.pi * frequency
    k2 = omega**2 * medium.mu * complex(medium.permittivity, medium.sigma / omega)
    return complex(np.sqrt(k2))


def antenna_angles(array: AntennaArray) -> np.ndarray:
    k = np.arange(array.n)
    return array.start_angle + array.direction * 2.0 * math.pi * k / array.n


def antenna_positions(array: AntennaArray) -> np.ndarray:
    """Antenna coordinates, shape ``(n, 2)``."""
    theta = antenna_angles(array)
    return array.radius * np.column_stack((np.cos(theta), np.sin(theta)))


class SmallAnomalyCheck(NamedTuple):
    is_small: bool
    formula_is_small: bool
    lhs: float
    quarter_wavelength: float
    margin: float
    override: bool | None


def is_small_anomaly(anomaly: Anomaly, medium: Medium, frequency: float,
                     override: bool | None = None) -> SmallAnomalyCheck:
    """Check ``|sqrt(eps_a / eps_b) - 1| * r < lambda / 4``.

    ``lambda = 2 pi / Re(k)`` is the background wavelength. ``margin`` is
    ``lambda / 4 - lhs`` (positive means small). ``override`` replaces the
    verdict in ``is_small`` while the formula's verdict is kept alongside.
    """
    if not anomaly.eps_r > 0:
        raise ValueError("anomaly eps_r must be > 0")
    k = wavenumber(medium, frequency)
    quarter = 0.25 * 2.0 * math.pi / k.real
    lhs = abs(math.sqrt(anomaly.eps_r / medium.eps_r) - 1.0) * anomaly.radius
    formula = lhs < quarter
    verdict = formula if override is None else bool(override)
    return SmallAnomalyCheck(verdict, formula, lhs, quarter, quarter - lhs, override)
