"""Real spherical harmonics of degree 4.

Coefficient vectors have 9 entries; index ``i`` holds the coefficient of
``Y_{4,m}`` with ``m = i - 4``.  The basis is the orthonormal real basis
without the Condon-Shortley phase: indices 0-3 are the sine-type functions
(``m < 0``), index 4 is the zonal function and indices 5-8 are cosine-type.
This is the sign convention under which the tabulated rotation operators in
:mod:`octaharm.rotation_ops` act as active rotations, see
:func:`octaharm.rotation_ops.rotation3_from_euler`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray

Sh4Coeffs = NDArray[np.float64]

_SQRT_PI = np.sqrt(np.pi)

# Cartesian normalization constants, m = -4..4.
_NORM = np.array([
    0.75 * np.sqrt(35.0 / np.pi),
    0.75 * np.sqrt(35.0 / (2.0 * np.pi)),
    0.75 * np.sqrt(5.0 / np.pi),
    0.75 * np.sqrt(5.0 / (2.0 * np.pi)),
    3.0 / (16.0 * _SQRT_PI),
    0.75 * np.sqrt(5.0 / (2.0 * np.pi)),
    0.375 * np.sqrt(5.0 / np.pi),
    0.75 * np.sqrt(35.0 / (2.0 * np.pi)),
    3.0 / 16.0 * np.sqrt(35.0 / np.pi),
])


class ResolutionError(ValueError):
    """Sampling grid too coarse."""


def as_coeffs(a: ArrayLike) -> Sh4Coeffs:
    """Validate and return ``a`` as a float64 coefficient vector of length 9."""
    arr = np.asarray(a, dtype=np.float64)
    if arr.shape != (9,):
        raise ValueError(f"expected 9 coefficients, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("coefficients must be finite")
    return arr


def is_normalized(a: ArrayLike, tol: float = 1e-12) -> bool:
    return abs(float(np.linalg.norm(as_coeffs(a))) - 1.0) <= tol


def reference_harmonic() -> Sh4Coeffs:
    """Octahedrally symmetric harmonic with lobes along the coordinate axes.

    Every unit-norm octahedral harmonic is a rotation of this one, up to sign.
    """
    a = np.zeros(9)
    a[4] = np.sqrt(7.0 / 12.0)
    a[8] = np.sqrt(5.0 / 12.0)
    return a


def canonical_point(theta: ArrayLike, phi: ArrayLike) -> tuple[NDArray, NDArray]:
    """Map arbitrary angles to ``theta in [0, pi]``, ``phi in [0, 2*pi)``."""
    v = direction(theta, phi)
    t = np.arccos(np.clip(v[..., 2], -1.0, 1.0))
    p = np.mod(np.arctan2(v[..., 1], v[..., 0]), 2.0 * np.pi)
    # mod can round up to exactly 2*pi for tiny negative azimuths
    p = np.where(p >= 2.0 * np.pi, 0.0, p)
    return t, p


def direction(theta: ArrayLike, phi: ArrayLike) -> NDArray:
    """Unit vectors, shape ``(..., 3)``, for polar angle ``theta`` and azimuth ``phi``."""
    theta = np.asarray(theta, dtype=np.float64)
    phi = np.asarray(phi, dtype=np.float64)
    st = np.sin(theta)
    return np.stack([st * np.cos(phi), st * np.sin(phi), np.cos(theta) * np.ones_like(phi)], axis=-1)


def eval_basis_xyz(v: ArrayLike) -> NDArray:
    """Basis values at unit direction(s) ``v`` of shape ``(..., 3)``; returns ``(..., 9)``."""
    v = np.asarray(v, dtype=np.float64)
    x, y, z = v[..., 0], v[..., 1], v[..., 2]
    x2, y2, z2 = x * x, y * y, z * z
    polys = [
        x * y * (x2 - y2),
        (3.0 * x2 - y2) * y * z,
        x * y * (7.0 * z2 - 1.0),
        y * z * (7.0 * z2 - 3.0),
        35.0 * z2 * z2 - 30.0 * z2 + 3.0,
        x * z * (7.0 * z2 - 3.0),
        (x2 - y2) * (7.0 * z2 - 1.0),
        (x2 - 3.0 * y2) * x * z,
        x2 * (x2 - 3.0 * y2) - y2 * (3.0 * x2 - y2),
    ]
    return np.stack(polys, axis=-1) * _NORM


def eval_basis(theta: ArrayLike, phi: ArrayLike) -> NDArray:
    """Values ``(Y_{4,-4}, ..., Y_{4,4})`` at spherical point(s).

    Broadcasts over ``theta`` and ``phi``; the basis index is the last axis.
    """
    return eval_basis_xyz(direction(theta, phi))


def eval_harmonic(a: ArrayLike, theta: ArrayLike, phi: ArrayLike) -> NDArray | float:
    """Evaluate the harmonic with coefficients ``a`` at ``(theta, phi)``."""
    out = eval_basis(theta, phi) @ as_coeffs(a)
    return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class SphereSampleGrid:
    n_theta: int
    n_phi: int
    theta: NDArray
    phi: NDArray
    values: NDArray  # shape (n_theta, n_phi)

    def rows(self):
        """Yield ``(theta, phi, value)`` row-major over the grid."""
        for j, t in enumerate(self.theta):
            for k, p in enumerate(self.phi):
                yield float(t), float(p), float(self.values[j, k])


def sample_sphere(a: ArrayLike, n_theta: int, n_phi: int) -> SphereSampleGrid:
    """Sample a harmonic on a uniform latitude-longitude grid.

    ``theta`` includes both poles; ``phi`` excludes the ``2*pi`` endpoint.
    """
    if n_theta < 2 or n_phi < 4:
        raise ResolutionError(f"grid {n_theta}x{n_phi} too small (need n_theta >= 2, n_phi >= 4)")
    a = as_coeffs(a)
    theta = np.pi * np.arange(n_theta) / (n_theta - 1)
    phi = 2.0 * np.pi * np.arange(n_phi) / n_phi
    values = eval_basis(theta[:, None], phi[None, :]) @ a
    return SphereSampleGrid(n_theta, n_phi, theta, phi, values)
