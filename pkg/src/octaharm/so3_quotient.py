"""Rotations modulo the octahedral group.

Quaternions are float arrays ``(w, x, y, z)`` (or stacks ``(..., 4)``) with the
Hamilton product; ``q`` and ``-q`` are the same rotation.  The quaternion of a
rotation is tied to :mod:`octaharm.rotation_ops` through
:func:`quaternion_from_euler`, which matches
:func:`octaharm.rotation_ops.rotation3_from_euler`.

Since the reference harmonic is fixed by every element ``g`` of the
octahedral group, ``rotate(ref, q) == rotate(ref, q * g)``: harmonics on the
manifold correspond to cosets ``q * G``.  The canonical coset representative
is the one with the smallest rotation angle; in Rodrigues coordinates these
fill a truncated cube.
"""

from __future__ import annotations

import math
from functools import lru_cache
from typing import NamedTuple

import numpy as np
from numpy.typing import ArrayLike, NDArray

from octaharm.rotation_ops import EulerAngles, euler_matrix
from octaharm.sh4_core import as_coeffs, reference_harmonic

UnitQuaternion = NDArray[np.float64]
RodriguesVector = NDArray[np.float64]

TAN_PI_8 = math.sqrt(2.0) - 1.0
GIMBAL_TOL = 1e-9
_TIE_TOL = 1e-14


# -- quaternion algebra ------------------------------------------------------

def quat_multiply(p: ArrayLike, q: ArrayLike) -> NDArray:
    p = np.asarray(p, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    pw, px, py, pz = np.moveaxis(p, -1, 0)
    qw, qx, qy, qz = np.moveaxis(q, -1, 0)
    return np.stack([
        pw * qw - px * qx - py * qy - pz * qz,
        pw * qx + px * qw + py * qz - pz * qy,
        pw * qy - px * qz + py * qw + pz * qx,
        pw * qz + px * qy - py * qx + pz * qw,
    ], axis=-1)


def quat_inverse(q: ArrayLike) -> NDArray:
    q = np.array(q, dtype=np.float64)
    q[..., 1:] *= -1.0
    return q


def canonicalize(q: ArrayLike, eps: float = 1e-12) -> NDArray:
    """Pick the sign of ``q`` with ``w >= 0`` (first nonzero vector part >= 0 when ``w == 0``)."""
    q = np.array(q, dtype=np.float64)
    flat = q.reshape(-1, 4)
    for row in flat:
        for c in row:
            if abs(c) > eps:
                if c < 0:
                    row *= -1.0
                break
    return flat.reshape(q.shape)


def _canonicalize_fast(q: NDArray) -> NDArray:
    # vectorized; rows with |w| <= eps fall back to the scalar rule
    sign = np.where(q[..., 0] < 0, -1.0, 1.0)
    out = q * sign[..., None]
    small = np.abs(q[..., 0]) <= 1e-12
    if np.any(small):
        out[small] = canonicalize(q[small])
    return out


def quaternion_from_axis_angle(axis: ArrayLike, angle: float) -> UnitQuaternion:
    axis = np.asarray(axis, dtype=np.float64)
    axis = axis / np.linalg.norm(axis)
    return np.concatenate([[math.cos(angle / 2)], math.sin(angle / 2) * axis])


def rotation_angle(q: ArrayLike) -> NDArray | float:
    """Rotation angle in ``[0, pi]``."""
    q = np.asarray(q, dtype=np.float64)
    ang = 2.0 * np.arctan2(np.linalg.norm(q[..., 1:], axis=-1), np.abs(q[..., 0]))
    return float(ang) if ang.ndim == 0 else ang


def quat_to_matrix(q: ArrayLike) -> NDArray:
    w, x, y, z = np.asarray(q, dtype=np.float64) / np.linalg.norm(q)
    return np.array([
        [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
        [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
        [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
    ])


def random_quaternions(n: int, rng: np.random.Generator) -> NDArray:
    """Haar-uniform random rotations, canonicalized, shape ``(n, 4)``."""
    q = rng.normal(size=(n, 4))
    q /= np.linalg.norm(q, axis=1, keepdims=True)
    return _canonicalize_fast(q)


# -- Euler bridge --------------------------------------------------------------

def quaternion_from_euler(e: ArrayLike) -> UnitQuaternion:
    """Quaternion of ``rotation3_from_euler(e)``: ``qx(alpha) * qy(-beta) * qz(gamma)``."""
    alpha, beta, gamma = np.asarray(e, dtype=np.float64)
    qx = quaternion_from_axis_angle([1, 0, 0], alpha)
    qy = quaternion_from_axis_angle([0, 1, 0], -beta)
    qz = quaternion_from_axis_angle([0, 0, 1], gamma)
    return canonicalize(quat_multiply(quat_multiply(qx, qy), qz))


def euler_from_quaternion(q: ArrayLike) -> EulerAngles:
    """Inverse of :func:`quaternion_from_euler`, with ``beta`` in ``[-pi/2, pi/2]``.

    Within ``GIMBAL_TOL`` of ``|beta| = pi/2`` only ``alpha +- gamma`` is
    determined; ``alpha`` is then set to 0 and ``gamma`` takes the rest.
    """
    r = quat_to_matrix(q)
    cb = math.hypot(r[0, 0], r[0, 1])
    b = math.atan2(r[0, 2], cb)
    if cb <= math.sin(GIMBAL_TOL):
        return EulerAngles(0.0, -b, math.atan2(r[1, 0], r[1, 1]))
    alpha = math.atan2(-r[1, 2], r[2, 2])
    gamma = math.atan2(-r[0, 1], r[0, 0])
    return EulerAngles(alpha, -b, gamma)


# -- octahedral group ------------------------------------------------------------

@lru_cache(maxsize=None)
def _group() -> NDArray:
    elems = [np.array([1.0, 0.0, 0.0, 0.0])]
    axes = np.eye(3)
    for ax in axes:
        for ang in (np.pi / 2, -np.pi / 2, np.pi):
            elems.append(quaternion_from_axis_angle(ax, ang))
    for sx, sy in [(1, 1), (-1, 1), (1, -1), (-1, -1)]:
        for ang in (2 * np.pi / 3, -2 * np.pi / 3):
            elems.append(quaternion_from_axis_angle([sx, sy, 1], ang))
    for ax in ([1, 1, 0], [1, -1, 0], [1, 0, 1], [1, 0, -1], [0, 1, 1], [0, 1, -1]):
        elems.append(quaternion_from_axis_angle(ax, np.pi))
    g = canonicalize(np.array(elems))
    g.setflags(write=False)
    return g


def octahedral_group() -> NDArray:
    """The 24 rotations of the cube as canonical quaternions, shape ``(24, 4)``.

    Index 0 is the identity.
    """
    return _group().copy()


# -- fundamental zone --------------------------------------------------------------

def rodrigues_from_quaternion(q: ArrayLike) -> RodriguesVector:
    q = np.asarray(q, dtype=np.float64)
    if np.any(q[..., 0] == 0.0):
        raise ValueError("half-turn rotations have no finite Rodrigues vector")
    return q[..., 1:] / q[..., :1]


def quaternion_from_rodrigues(r: ArrayLike) -> UnitQuaternion:
    r = np.asarray(r, dtype=np.float64)
    q = np.concatenate([np.ones(r.shape[:-1] + (1,)), r], axis=-1)
    return q / np.linalg.norm(q, axis=-1, keepdims=True)


def in_fundamental_zone(r: ArrayLike, tol: float = 1e-10) -> bool | NDArray:
    """Truncated-cube test: ``max|r_i| <= tan(pi/8)`` and ``sum|r_i| <= 1``."""
    r = np.abs(np.asarray(r, dtype=np.float64))
    ok = (r.max(axis=-1) <= TAN_PI_8 + tol) & (r.sum(axis=-1) <= 1.0 + tol)
    return bool(ok) if np.ndim(ok) == 0 else ok


def reduce_many(q: ArrayLike) -> tuple[NDArray, NDArray]:
    """Vectorized :func:`reduce_to_fundamental_zone` over a stack ``(n, 4)``."""
    q = np.atleast_2d(np.asarray(q, dtype=np.float64))
    g = _group()
    cand = quat_multiply(q[:, None, :], g[None, :, :])  # (n, 24, 4)
    w = np.abs(cand[..., 0])
    # ties go to the smallest index
    idx = np.argmax(w >= w.max(axis=1, keepdims=True) - _TIE_TOL, axis=1)
    red = cand[np.arange(len(q)), idx]
    return _canonicalize_fast(red), idx


def reduce_to_fundamental_zone(q: ArrayLike) -> tuple[UnitQuaternion, int]:
    """Smallest-angle representative ``q * g_i`` of the coset ``q * G``.

    Returns the canonical reduced quaternion and the group index ``i``.
    """
    red, idx = reduce_many(np.asarray(q, dtype=np.float64)[None, :])
    return red[0], int(idx[0])


def quotient_distance_many(q1: ArrayLike, q2: ArrayLike) -> NDArray:
    """Vectorized :func:`quotient_distance` over stacked pairs."""
    q1 = np.atleast_2d(np.asarray(q1, dtype=np.float64))
    q2 = np.atleast_2d(np.asarray(q2, dtype=np.float64))
    d = quat_multiply(quat_inverse(q1), q2)
    g = _group()
    # scalar part of d * g_k is the dot product of d with conj(g_k)
    w = np.abs(d @ quat_inverse(g).T)
    best = np.argmax(w, axis=1)
    return rotation_angle(quat_multiply(d, g[best]))


def quotient_distance(q1: ArrayLike, q2: ArrayLike) -> float:
    """Misorientation angle (radians) between two rotations modulo the cube group."""
    return float(quotient_distance_many(q1, q2)[0])


# -- nearest point on the manifold ---------------------------------------------------

class NearestSymmetric(NamedTuple):
    distance: float
    q_best: UnitQuaternion
    sign: int


@lru_cache(maxsize=8)
def _orbit_table(n_grid: int, seed: int) -> tuple[NDArray, NDArray, NDArray]:
    """Coarse grid over the fundamental zone: quaternions, 9x9 operators, orbit points."""
    rng = np.random.default_rng(seed)
    qs, _ = reduce_many(random_quaternions(n_grid, rng))
    ref = reference_harmonic()
    mats = np.stack([euler_matrix(euler_from_quaternion(q)) for q in qs])
    pts = mats @ ref
    for arr in (qs, mats, pts):
        arr.setflags(write=False)
    return qs, mats, pts


_STEP0 = 0.1
_N_LEVELS = 36  # 0.1 * 2**-35 ~ 3e-12 rad


@lru_cache(maxsize=None)
def _step_table() -> tuple[NDArray, NDArray, NDArray]:
    """Elementary rotations about x, y, z by +-h for h = 0.1 * 2**-j.

    Returns the 4x4 right-multiplication matrices ``(L, 6, 4, 4)`` of the
    step quaternions (``q * s == qmats[s] @ q``), the 9x9 operators
    ``(L, 6, 9, 9)`` and their images of the reference harmonic ``(L, 6, 9)``.
    """
    ref = reference_harmonic()
    qs = np.empty((_N_LEVELS, 6, 4, 4))
    mats = np.empty((_N_LEVELS, 6, 9, 9))
    for j in range(_N_LEVELS):
        h = _STEP0 * 2.0 ** -j
        eulers = [(h, 0, 0), (-h, 0, 0), (0, h, 0), (0, -h, 0), (0, 0, h), (0, 0, -h)]
        for k, e in enumerate(eulers):
            qs[j, k] = quat_multiply(np.eye(4), quaternion_from_euler(e)).T
            mats[j, k] = euler_matrix(e)
    return qs, mats, mats @ ref


def _refine(a: NDArray, sign: float, q0: NDArray, m0: NDArray, max_sweeps: int):
    """Coordinate search over elementary rotation angles about the current estimate.

    Each sweep tries +-h about each axis and moves to the best improving
    trial; when none improves, h is halved.
    """
    step_q, step_m, step_v = _step_table()
    sa = sign * a
    q, m = q0.copy(), m0.copy()
    best = float(np.sum((sa - m @ reference_harmonic()) ** 2))
    level = 0
    for _ in range(max_sweeps):
        trials = step_v[level] @ m.T  # (6, 9)
        f = np.sum((sa - trials) ** 2, axis=1)
        k = int(np.argmin(f))
        if f[k] < best:
            best = float(f[k])
            m = m @ step_m[level, k]
            q = step_q[level, k] @ q
        else:
            level += 1
            if level == _N_LEVELS:
                break
    return best, q


def nearest_symmetric(
    a: ArrayLike,
    refine_iters: int = 400,
    *,
    n_grid: int = 4096,
    seed: int = 42,
    n_starts: int = 3,
) -> NearestSymmetric:
    """Closest point ``sign * rotate(ref, q)`` of the manifold to ``a`` (Euclidean in R^9).

    Scores a seeded random grid of ``n_grid`` fundamental-zone rotations with
    both signs, then refines the ``n_starts`` best by derivative-free
    coordinate search (at most ``refine_iters`` sweeps each).
    """
    a = as_coeffs(a)
    qs, mats, pts = _orbit_table(n_grid, seed)
    score = pts @ a
    order = np.argsort(-np.abs(score), kind="stable")[:n_starts]
    best = None
    for i in order:
        s = 1.0 if score[i] >= 0 else -1.0
        f, q = _refine(a, s, qs[i], mats[i], refine_iters)
        if best is None or f < best[0]:
            best = (f, q, s)
    _, q, s = best
    q_red, _ = reduce_to_fundamental_zone(q / np.linalg.norm(q))
    dist = float(np.linalg.norm(a - s * (euler_matrix(euler_from_quaternion(q_red)) @ reference_harmonic())))
    return NearestSymmetric(dist, q_red, int(s))
