import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from octaharm.sh4_core import (
    ResolutionError,
    canonical_point,
    eval_basis,
    eval_basis_xyz,
    eval_harmonic,
    reference_harmonic,
    sample_sphere,
)
from octaharm.so3_quotient import octahedral_group, quat_to_matrix

from oracles import sphere_gram

angles = st.floats(-10.0, 10.0, allow_nan=False)


def test_reference_harmonic_values():
    a = reference_harmonic()
    expected = np.zeros(9)
    expected[4] = 0.7637626158259734
    expected[8] = 0.6454972243679028
    np.testing.assert_allclose(a, expected, rtol=0, atol=1e-15)
    assert abs(np.linalg.norm(a) - 1.0) <= 1e-15


def test_north_pole_only_zonal_nonzero():
    b = eval_basis(0.0, 1.234)
    assert np.all(b[[0, 1, 2, 3, 5, 6, 7, 8]] == 0.0)
    assert b[4] == pytest.approx(np.sqrt(9.0 / (4.0 * np.pi)), abs=1e-15)


def test_equator_odd_functions_vanish():
    b = eval_basis(np.pi / 2, 0.0)
    assert abs(b[3]) < 1e-16 and abs(b[1]) < 1e-16


def test_zonal_pole_value():
    e4 = np.eye(9)[4]
    assert eval_harmonic(e4, 0.0, 0.0) == pytest.approx(0.8462843753216345, abs=1e-15)


def test_orthonormality_by_quadrature():
    gram = sphere_gram(256, 512)
    assert np.abs(gram - np.eye(9)).max() <= 1e-6


def test_parseval(rng):
    x, w = np.polynomial.legendre.leggauss(256)
    phi = 2 * np.pi * np.arange(512) / 512
    for _ in range(5):
        a = rng.normal(size=9)
        h = eval_harmonic(a, np.arccos(x)[:, None], phi[None, :])
        integral = (w[:, None] * h**2).sum() * 2 * np.pi / 512
        assert integral == pytest.approx(a @ a, abs=1e-5)


def test_zero_harmonic_and_linearity(rng):
    assert eval_harmonic(np.zeros(9), 0.3, 2.0) == 0.0
    a, b = rng.normal(size=(2, 9))
    t, p = 1.1, 4.2
    assert eval_harmonic(a + b, t, p) == pytest.approx(
        eval_harmonic(a, t, p) + eval_harmonic(b, t, p), abs=1e-14)


@given(angles, angles)
def test_azimuth_reflection(theta, phi):
    b = eval_basis(theta, phi)
    br = eval_basis(theta, -phi)
    # sine-type functions are odd in phi, cosine-type even
    np.testing.assert_allclose(br[:4], -b[:4], atol=1e-12)
    np.testing.assert_allclose(br[4:], b[4:], atol=1e-12)


@given(angles, angles)
def test_canonical_point_same_direction(theta, phi):
    t, p = canonical_point(theta, phi)
    assert 0.0 <= t <= np.pi and 0.0 <= p < 2 * np.pi
    np.testing.assert_allclose(eval_basis(t, p), eval_basis(theta, phi), atol=1e-12)


def test_sample_sphere_quarter_turn_symmetry():
    g = sample_sphere(reference_harmonic(), 64, 128)
    assert g.values.shape == (64, 128)
    np.testing.assert_allclose(g.values, np.roll(g.values, -32, axis=1), atol=1e-12)


def test_sample_sphere_zero():
    g = sample_sphere(np.zeros(9), 5, 8)
    assert np.all(g.values == 0.0)


def test_sample_sphere_max_at_pole():
    a = reference_harmonic()
    pole = eval_harmonic(a, 0.0, 0.0)
    g = sample_sphere(a, 64, 128)
    assert np.abs(g.values).max() == pytest.approx(abs(pole), abs=1e-12)
    fine = sample_sphere(a, 721, 1440)
    assert np.abs(fine.values).max() <= abs(pole) + 1e-12


def test_sample_sphere_octahedral_invariance():
    n_theta, n_phi = 65, 128
    g = sample_sphere(reference_harmonic(), n_theta, n_phi)
    t, p = np.meshgrid(g.theta, g.phi, indexing="ij")
    dirs = np.stack([np.sin(t) * np.cos(p), np.sin(t) * np.sin(p), np.cos(t)], axis=-1)
    checked = 0
    for q in octahedral_group():
        moved = dirs @ quat_to_matrix(q).T
        mt = np.arccos(np.clip(moved[..., 2], -1, 1)) / np.pi * (n_theta - 1)
        mp = np.mod(np.arctan2(moved[..., 1], moved[..., 0]), 2 * np.pi) / (2 * np.pi) * n_phi
        on_grid = (np.abs(mt - np.round(mt)) < 1e-9) & (np.abs(mp - np.round(mp)) < 1e-9)
        jt = np.round(mt[on_grid]).astype(int)
        jp = np.round(mp[on_grid]).astype(int) % n_phi
        np.testing.assert_allclose(g.values[jt, jp], g.values[on_grid], atol=1e-10)
        checked += on_grid.sum()
    assert checked > 24 * 100


def test_octahedral_invariance_off_grid(rng):
    a = reference_harmonic()
    v = rng.normal(size=(200, 3))
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    h = eval_basis_xyz(v) @ a
    for q in octahedral_group():
        np.testing.assert_allclose(eval_basis_xyz(v @ quat_to_matrix(q).T) @ a, h, atol=1e-12)


@pytest.mark.parametrize("n_theta,n_phi", [(1, 8), (4, 3), (0, 0)])
def test_sample_sphere_resolution_error(n_theta, n_phi):
    with pytest.raises(ResolutionError):
        sample_sphere(reference_harmonic(), n_theta, n_phi)


@settings(max_examples=25)
@given(st.integers(2, 9), st.integers(4, 17))
def test_sample_grid_layout(n_theta, n_phi):
    g = sample_sphere(reference_harmonic(), n_theta, n_phi)
    assert g.theta[0] == 0.0 and g.theta[-1] == pytest.approx(np.pi)
    assert g.phi[-1] < 2 * np.pi
    assert len(list(g.rows())) == n_theta * n_phi
