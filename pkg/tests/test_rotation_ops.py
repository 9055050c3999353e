import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from octaharm.octa_variety import residuals
from octaharm.rotation_ops import (
    is_rotation9,
    rotate_coeffs,
    rotation3_from_euler,
    rx90_matrix,
    rx_matrix,
    ry_matrix,
    rz_matrix,
)
from octaharm.sh4_core import eval_basis_xyz, reference_harmonic

from oracles import fitted_rotation_operator

angle = st.floats(-2 * np.pi, 2 * np.pi, allow_nan=False)
I9 = np.eye(9)


def _rot3(axis, t):
    c, s = np.cos(t), np.sin(t)
    return {
        "x": np.array([[1, 0, 0], [0, c, -s], [0, s, c]]),
        "y": np.array([[c, 0, s], [0, 1, 0], [-s, 0, c]]),
        "z": np.array([[c, -s, 0], [s, c, 0], [0, 0, 1]]),
    }[axis]


def test_rz_identity_and_entries():
    np.testing.assert_array_equal(rz_matrix(0.0), I9)
    m = rz_matrix(np.pi / 2)
    assert m[0, 8] == pytest.approx(0.0, abs=1e-15)
    assert m[2, 6] == pytest.approx(0.0, abs=1e-15)
    assert m[3, 5] == 1.0
    assert m[5, 3] == -1.0


@given(angle, angle)
def test_rz_homomorphism(g1, g2):
    np.testing.assert_allclose(rz_matrix(g1) @ rz_matrix(g2), rz_matrix(g1 + g2), atol=1e-13)


def test_rx90_tabulated_entries():
    m = rx90_matrix()
    assert m[4, 4] == 3 / 8
    assert m[4, 8] == np.sqrt(35) / 8
    assert m[8, 8] == 1 / 8
    assert m[5, 0] == -2 * np.sqrt(14) / 8
    assert m[0, 5] == 2 * np.sqrt(14) / 8
    assert np.count_nonzero(m) == 21


def test_rx90_orthogonal_and_period_four():
    m = rx90_matrix()
    assert np.abs(m @ m.T - I9).max() <= 1e-13
    np.testing.assert_allclose(np.linalg.matrix_power(m, 4), I9, atol=1e-12)


def test_rx90_is_cached_but_not_shared():
    m = rx90_matrix()
    m[0, 0] = 99.0
    assert rx90_matrix()[0, 0] == 0.0


def test_ry_rx_at_zero():
    np.testing.assert_allclose(ry_matrix(0.0), I9, atol=1e-13)
    np.testing.assert_allclose(rx_matrix(0.0), I9, atol=1e-13)


def test_rx_quarter_turn_matches_table():
    np.testing.assert_allclose(rx_matrix(np.pi / 2), rx90_matrix(), rtol=0, atol=1e-12)


@given(angle, angle)
def test_one_parameter_groups(t1, t2):
    for f in (ry_matrix, rx_matrix):
        np.testing.assert_allclose(f(t1) @ f(t2), f(t1 + t2), atol=1e-12)
    np.testing.assert_allclose(rx_matrix(t1) @ rx_matrix(-t1), I9, atol=1e-12)


@given(angle)
def test_generated_matrices_are_rotations(t):
    for f in (rz_matrix, ry_matrix, rx_matrix):
        assert is_rotation9(f(t))


@pytest.mark.parametrize("axis,op,sign", [("z", rz_matrix, 1), ("x", rx_matrix, 1), ("y", ry_matrix, -1)])
def test_elementary_operators_against_fitted_oracle(axis, op, sign):
    # the y operator turns the sphere by -beta about +y
    for t in (0.3, -1.2, 2.9):
        fitted = fitted_rotation_operator(_rot3(axis, sign * t))
        np.testing.assert_allclose(op(t), fitted, atol=1e-12)


def test_rotate_identity(rng):
    a = rng.normal(size=9)
    np.testing.assert_allclose(rotate_coeffs(a, (0, 0, 0)), a, atol=1e-13)


@given(st.tuples(angle, angle, angle))
def test_rotate_preserves_norm(e):
    a = np.linspace(-1.0, 1.3, 9)
    assert np.linalg.norm(rotate_coeffs(a, e)) == pytest.approx(np.linalg.norm(a), abs=1e-13)


def test_orbit_of_reference_on_variety(rng):
    ref = reference_harmonic()
    worst = max(residuals(rotate_coeffs(ref, e)).max_abs() for e in rng.uniform(-np.pi, np.pi, (1000, 3)))
    assert worst <= 1e-10


def test_rotation3_basic(rng):
    np.testing.assert_array_equal(rotation3_from_euler((0, 0, 0)), np.eye(3))
    for e in rng.uniform(-4, 4, (20, 3)):
        assert np.linalg.det(rotation3_from_euler(e)) == pytest.approx(1.0, abs=1e-14)


def test_rotation_consistency_convention(rng):
    # frozen convention: rotated coefficients evaluate like the original at R^T p
    for _ in range(100):
        a = rng.normal(size=9)
        e = rng.uniform(-np.pi, np.pi, 3)
        p = rng.normal(size=3)
        p /= np.linalg.norm(p)
        r = rotation3_from_euler(e)
        lhs = eval_basis_xyz(p) @ rotate_coeffs(a, e)
        assert lhs == pytest.approx(eval_basis_xyz(r.T @ p) @ a, abs=1e-10)


def test_rotation_consistency_rejects_other_variant(rng):
    a = rng.normal(size=9)
    e = np.array([0.4, -0.9, 1.7])
    p = np.array([0.2, -0.5, 0.84])
    p /= np.linalg.norm(p)
    r = rotation3_from_euler(e)
    assert abs(eval_basis_xyz(p) @ rotate_coeffs(a, e) - eval_basis_xyz(r @ p) @ a) > 1e-3
