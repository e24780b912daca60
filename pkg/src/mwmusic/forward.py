"""Born-approximation synthesis of scattered-field S-parameter matrices.

Entries are scattered-field quantities ``S_tot - S_inc``: no background term
ever appears. Each target contributes ``c * E(a_n, r) * E(a_m, r)`` with
``E(a, r) = -(i/4) H_0^(1)(k |a - r|)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .scene import Anomaly, Medium, Scene, wavenumber
from .specfun import hankel1_0

__all__ = [
    "ScatteringMatrix",
    "incident_field",
    "born_coefficient",
    "assemble_point_targets",
    "assemble_extended",
    "extended_cells",
    "mask",
    "add_noise",
    "DIAGONAL_STATES",
]

DIAGONAL_STATES = ("known", "unknown", "zeroed")


@dataclass(frozen=True)
class ScatteringMatrix:
    """Square complex matrix with a diagonal-validity flag.

    ``known`` is the full matrix, ``unknown`` has NaN on the diagonal (never to
    be read) and ``zeroed`` has exact zeros there.
    """

    entries: np.ndarray
    diagonal_state: str = "known"

    def __post_init__(self):
        a = np.array(self.entries, dtype=complex, copy=True)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError(f"scattering matrix must be square, got shape {a.shape}")
        if a.shape[0] < 3:
            raise ValueError("scattering matrix dimension must be >= 3")
        if self.diagonal_state not in DIAGONAL_STATES:
            raise ValueError(f"diagonal_state must be one of {DIAGONAL_STATES}")
        if self.diagonal_state == "zeroed" and np.any(np.diag(a) != 0):
            raise ValueError("zeroed matrix has nonzero diagonal entries")
        if self.diagonal_state == "unknown":
            np.fill_diagonal(a, complex(np.nan, np.nan))
        a.setflags(write=False)
        object.__setattr__(self, "entries", a)

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    def valid_mask(self) -> np.ndarray:
        m = np.ones((self.n, self.n), dtype=bool)
        if self.diagonal_state == "unknown":
            np.fill_diagonal(m, False)
        return m

    def frobenius(self) -> float:
        return float(np.linalg.norm(self.entries[self.valid_mask()]))

    def scaled(self, alpha: complex) -> "ScatteringMatrix":
        return ScatteringMatrix(alpha * self.entries, self.diagonal_state)


def incident_field(k: complex, a, r):
    """z-component of the incident field at ``r`` radiated from ``a``.

    ``a`` and ``r`` broadcast against each other on their leading axes; the
    last axis holds (x, y).
    """
    d = np.linalg.norm(np.asarray(a, dtype=float) - np.asarray(r, dtype=float), axis=-1)
    if np.any(d == 0):
        raise ValueError("incident field is singular when source and field point coincide")
    return -0.25j * hankel1_0(k * d)


def _born_prefactor(anomaly: Anomaly, medium: Medium, frequency: float, area: float) -> complex:
    omega = 2.0 * math.pi * frequency
    k = wavenumber(medium, frequency)
    eps_b = medium.permittivity
    contrast = complex((anomaly.eps_r * 1.0 - medium.eps_r) / medium.eps_r,
                       (anomaly.sigma - medium.sigma) / (omega * eps_b))
    return 1j * k * k * area / (4.0 * omega * medium.mu) * contrast


def born_coefficient(anomaly: Anomaly, medium: Medium, frequency: float) -> complex:
    """``(i k^2 area / (4 omega mu)) * (d_eps / eps_b + i d_sigma / (omega eps_b))``."""
    return _born_prefactor(anomaly, medium, frequency, anomaly.area)


def _check_off_antenna(positions, point, what):
    d = np.linalg.norm(positions - np.asarray(point, dtype=float), axis=1)
    if np.any(d == 0):
        raise ValueError(f"{what} at {tuple(point)} coincides with an antenna")


def _mirror_upper(s: np.ndarray) -> np.ndarray:
    # Vectorized complex products may round S(m,n) and S(n,m) differently;
    # mirroring one triangle makes reciprocity exact.
    return np.triu(s) + np.triu(s, 1).T


def assemble_point_targets(scene: Scene) -> ScatteringMatrix:
    """Full matrix of point-like anomalies, each at its center with its own area."""
    pos = scene.positions()
    k = scene.k
    s = np.zeros((scene.array.n, scene.array.n), dtype=complex)
    for anomaly in scene.anomalies:
        _check_off_antenna(pos, anomaly.center, "anomaly center")
        w = incident_field(k, pos, anomaly.center)
        c = born_coefficient(anomaly, scene.medium, scene.frequency)
        s += c * np.outer(w, w)
    return ScatteringMatrix(_mirror_upper(s), "known")


def extended_cells(anomaly: Anomaly, cell_size: float, subsamples: int = 4):
    """Midpoint-quadrature cells covering a disk.

    Returns ``(centers, weights)``. Cells form a square lattice centred on the
    disk center; each cell's coverage is estimated from a
    ``subsamples x subsamples`` point test, and the weights are rescaled so
    they sum to the exact disk area. A cell at least twice the radius
    degenerates to a single cell at the center.
    """
    if not cell_size > 0:
        raise ValueError(f"cell_size must be > 0, got {cell_size}")
    r = anomaly.radius
    h = float(cell_size)
    reach = int(math.ceil(r / h - 0.5 + 1e-12))
    idx = np.arange(-reach, reach + 1)
    ix, iy = np.meshgrid(idx, idx, indexing="ij")
    off = (np.arange(subsamples) + 0.5) / subsamples - 0.5
    sx = (ix[..., None, None] + off[:, None]) * h
    sy = (iy[..., None, None] + off[None, :]) * h
    inside = (sx**2 + sy**2 <= r * r).sum(axis=(-2, -1))
    keep = inside > 0
    if not keep.any():
        raise ValueError("cell grid does not intersect the anomaly")
    cov = inside[keep].astype(float)
    weights = anomaly.area * (cov / cov.sum())
    cx, cy = anomaly.center
    centers = np.column_stack((cx + ix[keep] * h, cy + iy[keep] * h))
    return centers, weights


def assemble_extended(scene: Scene, cell_size: float) -> ScatteringMatrix:
    """Full matrix of disk-shaped anomalies by Born cell quadrature.

    The total field inside the anomaly is replaced by the incident field, so
    this is the linearized model, not a full-wave one.
    """
    pos = scene.positions()
    k = scene.k
    n = scene.array.n
    s = np.zeros((n, n), dtype=complex)
    for anomaly in scene.anomalies:
        centers, weights = extended_cells(anomaly, cell_size)
        d = np.linalg.norm(pos[None, :, :] - centers[:, None, :], axis=-1)
        if np.any(d == 0):
            raise ValueError("a quadrature cell center coincides with an antenna")
        e = -0.25j * hankel1_0(k * d)
        for w_cell, row in zip(weights, e):
            c = _born_prefactor(anomaly, scene.medium, scene.frequency, w_cell)
            s += c * np.outer(row, row)
    return ScatteringMatrix(_mirror_upper(s), "known")


def mask(matrix: ScatteringMatrix, target_state: str) -> ScatteringMatrix:
    """Mark the diagonal unknown or zero it; off-diagonal entries are untouched."""
    allowed = {
        "unknown": ("known", "unknown"),
        "zeroed": ("known", "unknown", "zeroed"),
    }
    if target_state not in allowed:
        raise ValueError(f"target_state must be 'unknown' or 'zeroed', got {target_state!r}")
    if matrix.diagonal_state not in allowed[target_state]:
        raise ValueError(f"cannot mask a {matrix.diagonal_state} diagonal to {target_state}")
    a = np.array(matrix.entries, copy=True)
    np.fill_diagonal(a, 0.0 if target_state == "zeroed" else np.nan)
    return ScatteringMatrix(a, target_state)


def _entry_noise(seed: int, m: int, n: int) -> complex:
    # Counter-based stream keyed by (seed, m, n) so entry order never matters.
    gen = np.random.Generator(np.random.Philox(key=[seed & 0xFFFFFFFFFFFFFFFF, (m << 32) | n]))
    re, im = gen.standard_normal(2)
    return complex(re, im) / math.sqrt(2.0)


def add_noise(matrix: ScatteringMatrix, snr_db: float, seed: int) -> ScatteringMatrix:
    """Add circular complex Gaussian noise to every valid entry.

    The per-entry variance is ``||S||_F^2 / (n_valid * 10^(snr_db/10))`` so the
    expected noise energy matches the requested SNR. ``snr_db = inf`` returns
    the matrix unchanged. Zeroed and unknown diagonals are never perturbed.
    """
    if math.isinf(snr_db) and snr_db > 0:
        return ScatteringMatrix(matrix.entries, matrix.diagonal_state)
    if not math.isfinite(snr_db):
        raise ValueError("snr_db must be finite or +inf")
    n = matrix.n
    valid = matrix.valid_mask()
    if matrix.diagonal_state == "zeroed":
        np.fill_diagonal(valid, False)
    count = int(valid.sum())
    sigma = matrix.frobenius() / math.sqrt(count * 10.0 ** (snr_db / 10.0))
    noise = np.zeros((n, n), dtype=complex)
    for m, col in zip(*np.nonzero(valid)):
        noise[m, col] = _entry_noise(int(seed), int(m), int(col))
    return ScatteringMatrix(matrix.entries + sigma * noise, matrix.diagonal_state)
