"""MUSIC imaging from full or zero-diagonal scattering matrices.

The imaging value at a test point ``r`` is ``1 / |P_noise v(r)|`` where ``v`` is
the steering vector of incident fields from every antenna and ``P_noise``
projects onto the complement of the leading ``M`` left singular vectors.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .forward import ScatteringMatrix, mask
from .scene import Scene
from .specfun import hankel1_0

__all__ = [
    "NoSignalError",
    "SubspaceDecomposition",
    "SteeringVector",
    "ImageMap",
    "decompose",
    "select_signal",
    "project_noise",
    "steering",
    "steering_batch",
    "imaging_value",
    "imaging_values",
    "image_map",
    "CLAMP_RATIO",
    "DEFAULT_RATIO",
]

CLAMP_RATIO = 1e-12
DEFAULT_RATIO = 0.4
STEERING_MODES = ("exact", "farfield")
NORMALIZATIONS = ("unit", "raw")


class NoSignalError(ValueError):
    """Raised when a singular spectrum carries no signal."""


@dataclass(frozen=True)
class SubspaceDecomposition:
    singulars: np.ndarray
    left_vectors: np.ndarray
    right_vectors: np.ndarray
    selected: int | None = None

    @property
    def n(self) -> int:
        return self.singulars.size

    def select(self, m: int) -> "SubspaceDecomposition":
        if not 1 <= m < self.n:
            raise ValueError(f"signal dimension must lie in [1, {self.n - 1}], got {m}")
        return replace(self, selected=int(m))

    @property
    def signal_basis(self) -> np.ndarray:
        if self.selected is None:
            raise ValueError("no signal dimension selected; call select() first")
        return self.left_vectors[:, : self.selected]


def _canonical_phase(u: np.ndarray, v: np.ndarray):
    idx = np.argmax(np.abs(u), axis=0)
    lead = u[idx, np.arange(u.shape[1])]
    phase = np.where(np.abs(lead) > 0, lead / np.where(lead == 0, 1, np.abs(lead)), 1.0)
    return u / phase, v / phase


def decompose(matrix: ScatteringMatrix) -> SubspaceDecomposition:
    """SVD with descending singular values and canonicalized vector phases.

    Each left vector's largest-modulus entry is made real-positive and the
    matching right vector is rotated by the same phase.
    """
    if matrix.diagonal_state == "unknown":
        raise ValueError("unknown diagonal: apply mask(matrix, 'zeroed') before decomposing")
    if matrix.n < 3:
        raise ValueError("matrix dimension must be >= 3")
    u, s, vh = np.linalg.svd(matrix.entries)
    u, v = _canonical_phase(u, vh.conj().T)
    return SubspaceDecomposition(s, u, v)


def select_signal(singulars, fixed: int | None = None, ratio: float | None = None) -> int:
    """Choose the signal dimension ``M``.

    ``fixed`` clamps to ``[1, N-1]``. ``ratio`` keeps the largest ``m`` with
    ``tau_m / tau_1 >= ratio`` (also capped at ``N-1``).
    """
    tau = np.asarray(singulars, dtype=float)
    n = tau.size
    if (fixed is None) == (ratio is None):
        raise ValueError("give exactly one of fixed or ratio")
    if not tau[0] > 0:
        raise NoSignalError("singular spectrum is identically zero")
    if fixed is not None:
        return int(min(max(int(fixed), 1), n - 1))
    m = int(np.count_nonzero(tau / tau[0] >= ratio))
    return min(max(m, 1), n - 1)


def project_noise(decomp: SubspaceDecomposition, v) -> np.ndarray:
    """Apply ``I - U_M U_M^*`` to ``v`` (shape ``(N,)`` or ``(..., N)``)."""
    v = np.asarray(v, dtype=complex)
    if v.shape[-1] != decomp.n:
        raise ValueError(f"vector length {v.shape[-1]} does not match dimension {decomp.n}")
    u = decomp.signal_basis
    return v - (v @ u.conj()) @ u.T


@dataclass(frozen=True)
class SteeringVector:
    values: np.ndarray
    mode: str = "exact"
    normalization: str = "unit"


def steering_batch(k: complex, positions, points, mode: str = "exact",
                   normalization: str = "unit") -> np.ndarray:
    """Steering vectors for many points at once; returns shape ``(P, N)``.

    ``exact`` uses ``-(i/4) H_0^(1)(k |a_n - r|)`` with the complex ``k``;
    ``farfield`` uses the lossless plane-wave form ``exp(-i Re(k) theta_n . r)``
    with ``theta_n = a_n / |a_n|``, so every raw entry has modulus 1.
    """
    if mode not in STEERING_MODES:
        raise ValueError(f"mode must be one of {STEERING_MODES}")
    if normalization not in NORMALIZATIONS:
        raise ValueError(f"normalization must be one of {NORMALIZATIONS}")
    pos = np.asarray(positions, dtype=float)
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if mode == "exact":
        d = np.linalg.norm(pts[:, None, :] - pos[None, :, :], axis=-1)
        if np.any(d == 0):
            raise ValueError("exact steering is singular at an antenna position")
        w = -0.25j * hankel1_0(k * d)
    else:
        unit = pos / np.linalg.norm(pos, axis=1, keepdims=True)
        w = np.exp(-1j * np.real(k) * (pts @ unit.T))
    if normalization == "unit":
        w = w / np.linalg.norm(w, axis=1, keepdims=True)
    return w


def steering(k: complex, positions, r, mode: str = "exact",
             normalization: str = "unit") -> SteeringVector:
    w = steering_batch(k, positions, np.asarray(r, dtype=float)[None, :], mode, normalization)[0]
    return SteeringVector(w, mode, normalization)


def imaging_values(decomp: SubspaceDecomposition, vectors) -> np.ndarray:
    """``1 / max(|P v|, 1e-12 |v|)`` row-wise."""
    v = np.atleast_2d(np.asarray(vectors, dtype=complex))
    pv = np.linalg.norm(project_noise(decomp, v), axis=-1)
    vn = np.linalg.norm(v, axis=-1)
    return 1.0 / np.maximum(pv, CLAMP_RATIO * vn)


def imaging_value(decomp: SubspaceDecomposition, steer) -> float:
    values = steer.values if isinstance(steer, SteeringVector) else steer
    if np.shape(values)[-1] != decomp.n:
        raise ValueError("steering dimension does not match decomposition")
    return float(imaging_values(decomp, values)[0])


@dataclass(frozen=True)
class ImageMap:
    """Values on a uniform grid; ``values[iy, ix]`` sits at ``(xs[ix], ys[iy])``."""

    xs: np.ndarray
    ys: np.ndarray
    values: np.ndarray
    metadata: dict = field(default_factory=dict)

    @property
    def nx(self) -> int:
        return self.xs.size

    @property
    def ny(self) -> int:
        return self.ys.size

    @property
    def extent(self):
        return float(self.xs[0]), float(self.xs[-1]), float(self.ys[0]), float(self.ys[-1])

    def points(self) -> np.ndarray:
        gx, gy = np.meshgrid(self.xs, self.ys)
        return np.column_stack((gx.ravel(), gy.ravel()))

    def argmax(self):
        """``(ix, iy)`` of the largest value."""
        iy, ix = np.unravel_index(np.argmax(self.values), self.values.shape)
        return int(ix), int(iy)

    def nearest_node(self, point):
        ix = int(np.argmin(np.abs(self.xs - point[0])))
        iy = int(np.argmin(np.abs(self.ys - point[1])))
        return ix, iy

    def spacing(self):
        return float(self.xs[1] - self.xs[0]), float(self.ys[1] - self.ys[0])


def image_map(matrix: ScatteringMatrix, scene: Scene, nx: int = 201, ny: int | None = None,
              fixed: int | None = None, ratio: float | None = None, mode: str = "exact",
              normalization: str = "unit") -> ImageMap:
    """Evaluate the MUSIC imaging function on the scene's ROI grid.

    A zeroed-diagonal matrix defaults to ``M = 1`` when no rule is given; a
    full matrix requires an explicit ``fixed`` or ``ratio``. An unknown
    diagonal is zeroed first. Nodes on an antenna (exact mode) and nodes outside
    a circular ROI are set to 0.
    """
    ny = nx if ny is None else ny
    if min(nx, ny) < 32:
        raise ValueError("image grid must be at least 32 x 32")
    if matrix.diagonal_state == "unknown":
        matrix = mask(matrix, "zeroed")
    decomp = decompose(matrix)
    if fixed is None and ratio is None:
        if matrix.diagonal_state != "zeroed":
            raise ValueError("a full matrix needs an explicit selection rule (fixed or ratio)")
        fixed = 1
    m = select_signal(decomp.singulars, fixed=fixed, ratio=ratio)
    decomp = decomp.select(m)

    xs, ys = scene.roi.axes(nx, ny)
    gx, gy = np.meshgrid(xs, ys)
    pts = np.column_stack((gx.ravel(), gy.ravel()))
    pos = scene.positions()
    keep = scene.roi.mask(pts[:, 0], pts[:, 1])
    if mode == "exact":
        dmin = np.min(np.linalg.norm(pts[:, None, :] - pos[None, :, :], axis=-1), axis=1)
        keep &= dmin > 1e-9 * scene.array.radius
    values = np.zeros(pts.shape[0])
    w = steering_batch(scene.k, pos, pts[keep], mode, normalization)
    values[keep] = imaging_values(decomp, w)
    meta = {
        "kind": "dm" if matrix.diagonal_state == "zeroed" else "tm",
        "M": m,
        "steering": mode,
        "normalization": normalization,
        "frequency_hz": scene.frequency,
    }
    return ImageMap(xs, ys, values.reshape(ny, nx), meta)
