import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mwmusic.forward import ScatteringMatrix, assemble_point_targets, mask
from mwmusic.music import (CLAMP_RATIO, NoSignalError, decompose, image_map, imaging_value,
                           project_noise, select_signal, steering, steering_batch)

R_STAR = np.array([0.01, 0.03])


def random_matrix(rng, n=16):
    return ScatteringMatrix(rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)))


def test_decomposition_invariants(rng):
    m = random_matrix(rng)
    d = decompose(m)
    u, v, s = d.left_vectors, d.right_vectors, d.singulars
    assert np.all(np.diff(s) <= 0) and np.all(s >= 0)
    assert np.max(np.abs(u.conj().T @ u - np.eye(16))) <= 1e-10
    recon = (u * s) @ v.conj().T
    assert np.linalg.norm(recon - m.entries) <= 1e-10 * s[0]
    lead = u[np.argmax(np.abs(u), axis=0), np.arange(16)]
    np.testing.assert_allclose(lead.imag, 0, atol=1e-15)
    assert np.all(lead.real > 0)


def test_decomposition_is_reproducible(rng):
    m = random_matrix(rng)
    a, b = decompose(m), decompose(m)
    np.testing.assert_array_equal(a.left_vectors, b.left_vectors)


def test_decompose_rejects_unknown(small_scene):
    with pytest.raises(ValueError):
        decompose(mask(assemble_point_targets(small_scene), "unknown"))


def test_zero_and_rank_one_spectra(rng):
    assert np.all(decompose(ScatteringMatrix(np.zeros((5, 5)))).singulars == 0)
    w = rng.normal(size=8) + 1j * rng.normal(size=8)
    c = 0.3 - 2j
    s = decompose(ScatteringMatrix(c * np.outer(w, w))).singulars
    assert s[0] == pytest.approx(abs(c) * np.linalg.norm(w) ** 2, rel=1e-13)
    assert s[1] <= 1e-12 * s[0]


def test_leading_vector_is_steering(small_scene):
    d = decompose(assemble_point_targets(small_scene))
    f = steering(small_scene.k, small_scene.positions(), R_STAR).values
    u1 = d.left_vectors[:, 0]
    # K = c w w^T, so the left vector is conj-free w / |w| up to a phase.
    phase = np.vdot(f, u1) / abs(np.vdot(f, u1))
    assert np.linalg.norm(u1 - phase * f) <= 1e-8


def test_select_signal_rules():
    tau = np.array([1.0, 0.5, 1e-12, 1e-13, 0.0])
    assert select_signal(tau, ratio=0.4) == 2
    assert select_signal(np.array([1.0, 1e-12, 0, 0]), ratio=0.4) == 1
    assert select_signal(tau, fixed=0) == 1
    assert select_signal(tau, fixed=10) == 4
    assert select_signal(np.ones(6), ratio=0.1) == 5
    with pytest.raises(NoSignalError):
        select_signal(np.zeros(4), ratio=0.4)
    with pytest.raises(ValueError):
        select_signal(tau)
    with pytest.raises(ValueError):
        select_signal(tau, fixed=1, ratio=0.4)


def test_select_nine_on_extended(extended_scene):
    from mwmusic.forward import assemble_extended
    r = extended_scene.anomalies[0].radius
    d = mask(assemble_extended(extended_scene, r / 16), "zeroed")
    assert select_signal(decompose(d).singulars, fixed=9) == 9


def test_projector_properties(rng):
    d = decompose(random_matrix(rng)).select(3)
    v = rng.normal(size=16) + 1j * rng.normal(size=16)
    pv = project_noise(d, v)
    assert np.linalg.norm(project_noise(d, pv) - pv) <= 1e-10 * np.linalg.norm(v)
    for j in range(3):
        assert np.linalg.norm(project_noise(d, d.left_vectors[:, j])) <= 1e-10
    w = d.left_vectors[:, 7]
    assert np.linalg.norm(project_noise(d, w) - w) <= 1e-10
    total = np.linalg.norm(pv) ** 2 + np.linalg.norm(v - pv) ** 2
    assert total == pytest.approx(np.linalg.norm(v) ** 2, rel=1e-10)
    # Hermitian: <Px, y> = <x, Py>.
    y = rng.normal(size=16) + 1j * rng.normal(size=16)
    assert abs(np.vdot(pv, y) - np.vdot(v, project_noise(d, y))) <= 1e-10 * np.linalg.norm(v) * np.linalg.norm(y)
    with pytest.raises(ValueError):
        project_noise(d, np.ones(5))
    with pytest.raises(ValueError):
        decompose(random_matrix(rng)).signal_basis
    with pytest.raises(ValueError):
        d.select(16)


def test_steering_modes(small_scene):
    k, pos = small_scene.k, small_scene.positions()
    raw0 = steering(k, pos, [0.0, 0.0], "farfield", "raw").values
    np.testing.assert_array_equal(raw0, np.ones(16))
    unit = steering(k, pos, R_STAR, "farfield", "unit").values
    np.testing.assert_allclose(np.abs(unit), 1 / 4, rtol=1e-14)
    raw = steering(k, pos, R_STAR, "farfield", "raw").values
    np.testing.assert_allclose(np.abs(raw), 1.0, rtol=1e-14)
    ex = steering(k, pos, R_STAR, "exact", "unit").values
    assert np.linalg.norm(ex) == pytest.approx(1.0, abs=1e-12)
    angle = math.acos(min(1.0, abs(np.vdot(ex, unit))))
    # Angle between exact and far-field unit vectors at the target, first run value.
    assert angle == pytest.approx(0.3779780835567987, abs=1e-9)
    with pytest.raises(ValueError):
        steering(k, pos, pos[2], "exact")
    with pytest.raises(ValueError):
        steering(k, pos, R_STAR, "nearfield")
    with pytest.raises(ValueError):
        steering(k, pos, R_STAR, "exact", "l1")


def test_steering_batch_matches_single(small_scene, rng):
    pts = rng.uniform(-0.05, 0.05, (7, 2))
    batch = steering_batch(small_scene.k, small_scene.positions(), pts)
    for p, row in zip(pts, batch):
        np.testing.assert_allclose(row, steering(small_scene.k, small_scene.positions(), p).values, rtol=1e-15)


def test_imaging_value_examples(small_scene, rng):
    d = decompose(random_matrix(rng)).select(1)
    assert imaging_value(d, d.left_vectors[:, 0]) == pytest.approx(1 / CLAMP_RATIO, rel=1e-3)
    assert imaging_value(d, d.left_vectors[:, 5]) == pytest.approx(1.0, rel=1e-12)
    with pytest.raises(ValueError):
        imaging_value(d, np.ones(4))
    k = decompose(assemble_point_targets(small_scene)).select(1)
    f = steering(small_scene.k, small_scene.positions(), R_STAR)
    assert imaging_value(k, f) >= 1e8


def test_full_matrix_map(small_scene):
    img = image_map(assemble_point_targets(small_scene), small_scene, fixed=1)
    ix, iy = img.argmax()
    tx, ty = img.nearest_node(R_STAR)
    assert math.hypot(ix - tx, iy - ty) <= 1
    assert img.values.max() >= 1e3 * np.median(img.values)
    assert img.metadata["kind"] == "tm" and img.metadata["M"] == 1
    with pytest.raises(ValueError):
        image_map(assemble_point_targets(small_scene), small_scene)
    with pytest.raises(ValueError):
        image_map(assemble_point_targets(small_scene), small_scene, nx=16, fixed=1)


def test_zeroed_map_peak_is_unique(small_scene):
    from scipy import ndimage
    d = mask(assemble_point_targets(small_scene), "zeroed")
    img = image_map(d, small_scene)
    ix, iy = img.argmax()
    tx, ty = img.nearest_node(R_STAR)
    assert math.hypot(ix - tx, iy - ty) <= 2
    peak = img.values >= img.values.max() / math.sqrt(2)
    labels, count = ndimage.label(peak)
    assert count == 1 and labels[ty, tx] == 1


def test_unknown_diagonal_is_zeroed_first(small_scene):
    k = assemble_point_targets(small_scene)
    a = image_map(mask(k, "unknown"), small_scene, nx=41)
    b = image_map(mask(k, "zeroed"), small_scene, nx=41)
    np.testing.assert_array_equal(a.values, b.values)


def test_values_nonnegative_and_antenna_nodes(small_scene):
    # A grid whose nodes include an antenna: that node is set to 0.
    from mwmusic.scene import Roi
    roi = Roi(-0.09, 0.09, -0.09, 0.09)
    scene = type(small_scene)(small_scene.medium, small_scene.array, small_scene.anomalies,
                              small_scene.frequency, roi)
    d = mask(assemble_point_targets(scene), "zeroed")
    img = image_map(d, scene, nx=37)
    assert np.all(np.isfinite(img.values)) and np.all(img.values >= 0)
    ix, iy = img.nearest_node([0.0, -0.09])
    assert img.values[iy, ix] == 0.0


@settings(max_examples=10, deadline=None)
@given(st.floats(1e-3, 1e6), st.floats(-math.pi, math.pi))
def test_scale_invariance_property(mag, phase):
    from mwmusic.io import parse_scene
    scene = parse_scene("table1_small.scene")
    d = mask(assemble_point_targets(scene), "zeroed")
    a = image_map(d, scene, nx=33)
    b = image_map(d.scaled(mag * np.exp(1j * phase)), scene, nx=33)
    assert np.max(np.abs(a.values - b.values) / a.values.max()) <= 1e-10
