"""Scalar comparison of two imaging maps on the same grid."""

from __future__ import annotations

import math

import numpy as np

from .music import ImageMap

__all__ = ["compare_maps", "min_antenna_distance", "saturated", "SATURATION_FACTOR"]

# A node is treated as a clamped infinite peak when it exceeds the map's
# median positive value by this factor; clamped values carry no shape
# information and are left out of the correlation.
SATURATION_FACTOR = 1e9


def min_antenna_distance(image: ImageMap, positions) -> np.ndarray:
    """Distance from every node to its nearest antenna, shaped like ``image.values``."""
    pts = image.points()
    pos = np.asarray(positions, dtype=float)
    d = np.linalg.norm(pts[:, None, :] - pos[None, :, :], axis=-1).min(axis=1)
    return d.reshape(image.values.shape)


def saturated(values) -> np.ndarray:
    v = np.asarray(values, dtype=float)
    pos = v[v > 0]
    if pos.size == 0:
        return np.zeros(v.shape, dtype=bool)
    return v >= SATURATION_FACTOR * np.median(pos)


def compare_maps(a: ImageMap, b: ImageMap, node_mask=None) -> dict:
    """Argmax offset (in nodes), Pearson correlation and peak ratio of two maps.

    ``node_mask`` (boolean, shaped like the maps) restricts the correlation;
    clamp-saturated nodes of either map are always excluded from it.
    """
    if a.values.shape != b.values.shape or not (
            np.allclose(a.xs, b.xs, rtol=0, atol=1e-12) and np.allclose(a.ys, b.ys, rtol=0, atol=1e-12)):
        raise ValueError("maps are on different grids")
    ax, ay = a.argmax()
    bx, by = b.argmax()
    keep = np.ones(a.values.shape, dtype=bool) if node_mask is None else np.asarray(node_mask, bool)
    sat = saturated(a.values) | saturated(b.values)
    use = keep & ~sat
    va, vb = a.values[use], b.values[use]
    if va.size < 2 or va.std() == 0 or vb.std() == 0:
        r = math.nan
    else:
        r = float(np.corrcoef(va, vb)[0, 1])
    peak_b = float(b.values.max())
    return {
        "argmax_offset_nodes": float(math.hypot(ax - bx, ay - by)),
        "argmax_a": [ax, ay],
        "argmax_b": [bx, by],
        "pearson_r": r,
        "peak_ratio": float(a.values.max()) / peak_b if peak_b > 0 else math.inf,
        "nodes_compared": int(use.sum()),
        "nodes_saturated": int((keep & sat).sum()),
    }
