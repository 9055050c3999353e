"""9x9 rotation operators on degree-4 coefficient vectors.

``rz_matrix`` and ``rx90_matrix`` are tabulated; rotations about y and
general rotations about x are built by conjugation:

    ry(b) = rx90 @ rz(b) @ rx90.T
    rx(a) = ry(pi/2).T @ rz(a) @ ry(pi/2)

Convention (checked in the test suite): for Euler angles ``(alpha, beta,
gamma)`` let ``R = rotation3_from_euler(alpha, beta, gamma)``.  Then

    eval_harmonic(rotate_coeffs(a, e), p) == eval_harmonic(a, R.T @ p)

i.e. the operators rotate the function actively by ``R``.  ``rz`` and ``rx``
follow the right-hand rule; the conjugation that defines ``ry`` produces a
rotation by ``-beta`` about +y, so ``R = Rx(alpha) @ Ry(-beta) @ Rz(gamma)``.
"""

from __future__ import annotations

from functools import lru_cache
from typing import NamedTuple

import numpy as np
from numpy.typing import ArrayLike, NDArray

from octaharm.sh4_core import Sh4Coeffs, as_coeffs

Rotation9 = NDArray[np.float64]


class EulerAngles(NamedTuple):
    alpha: float
    beta: float
    gamma: float


def rz_matrix(gamma: float) -> Rotation9:
    """Rotation by ``gamma`` about z: couples index pairs ``(4-k, 4+k)`` by ``k*gamma``."""
    m = np.eye(9)
    for k in range(1, 5):
        c, s = np.cos(k * gamma), np.sin(k * gamma)
        i, j = 4 - k, 4 + k
        m[i, i] = c
        m[j, j] = c
        m[i, j] = s
        m[j, i] = -s
    return m


@lru_cache(maxsize=None)
def _rx90() -> Rotation9:
    r2, r5, r7, r14, r35 = np.sqrt([2.0, 5.0, 7.0, 14.0, 35.0])
    m = np.array([
        [0, 0, 0, 0, 0, 2 * r14, 0, -2 * r2, 0],
        [0, -6, 0, 2 * r7, 0, 0, 0, 0, 0],
        [0, 0, 0, 0, 0, 2 * r2, 0, 2 * r14, 0],
        [0, 2 * r7, 0, 6, 0, 0, 0, 0, 0],
        [0, 0, 0, 0, 3, 0, 2 * r5, 0, r35],
        [-2 * r14, 0, -2 * r2, 0, 0, 0, 0, 0, 0],
        [0, 0, 0, 0, 2 * r5, 0, 4, 0, -2 * r7],
        [2 * r2, 0, -2 * r14, 0, 0, 0, 0, 0, 0],
        [0, 0, 0, 0, r35, 0, -2 * r7, 0, 1],
    ]) / 8.0
    m.setflags(write=False)
    return m


def rx90_matrix() -> Rotation9:
    """Tabulated quarter turn about x."""
    return _rx90().copy()


def ry_matrix(beta: float) -> Rotation9:
    rx90 = _rx90()
    return rx90 @ rz_matrix(beta) @ rx90.T


@lru_cache(maxsize=None)
def _ry90() -> Rotation9:
    m = ry_matrix(np.pi / 2)
    m.setflags(write=False)
    return m


def rx_matrix(alpha: float) -> Rotation9:
    ry90 = _ry90()
    return ry90.T @ rz_matrix(alpha) @ ry90


def euler_matrix(e: ArrayLike) -> Rotation9:
    """The 9x9 operator ``rx(alpha) @ ry(beta) @ rz(gamma)``."""
    alpha, beta, gamma = np.asarray(e, dtype=np.float64)
    return rx_matrix(alpha) @ ry_matrix(beta) @ rz_matrix(gamma)


def rotate_coeffs(a: ArrayLike, e: ArrayLike) -> Sh4Coeffs:
    """Apply the Euler rotation ``e = (alpha, beta, gamma)`` to coefficients ``a``."""
    return euler_matrix(e) @ as_coeffs(a)


def _rot3(axis: int, t: float) -> NDArray:
    c, s = np.cos(t), np.sin(t)
    i, j = [(1, 2), (2, 0), (0, 1)][axis]
    m = np.eye(3)
    m[i, i] = c
    m[j, j] = c
    m[i, j] = -s
    m[j, i] = s
    return m


def rotation3_from_euler(e: ArrayLike) -> NDArray:
    """3x3 rotation acting on the sphere the way :func:`rotate_coeffs` acts on coefficients."""
    alpha, beta, gamma = np.asarray(e, dtype=np.float64)
    return _rot3(0, alpha) @ _rot3(1, -beta) @ _rot3(2, gamma)


def is_rotation9(m: ArrayLike, tol: float = 1e-12) -> bool:
    m = np.asarray(m)
    if m.shape != (9, 9):
        return False
    orth = np.abs(m @ m.T - np.eye(9)).max() <= tol
    return bool(orth and abs(np.linalg.det(m) - 1.0) <= 1e-10)
