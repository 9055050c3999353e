"""Quadric description of the octahedral harmonic manifold.

A unit coefficient vector ``a`` is a rotation of ``+-reference_harmonic()``
exactly when ``a @ S_k @ a == 0`` for the five symmetric matrices returned by
:func:`quadric_matrices`.  The sum of squares of those five quadratic forms
is invariant under rotations of ``a`` and is used as the deviation measure;
adding a normalization term gives the penalty minimized by :func:`symmetrize`.
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, NamedTuple, Optional, TextIO

import numpy as np
from numpy.typing import ArrayLike, NDArray

from octaharm.sh4_core import Sh4Coeffs, as_coeffs

TRACE_HEADER = ("iter", "penalty", "sqrt_penalty", "step", "grad_norm", "distance")


class DegenerateStartError(ValueError):
    """Descent started at a stationary point that is not a minimizer."""


class NonConvergenceWarning(RuntimeWarning):
    pass


def _sym(entries: dict[tuple[int, int], float]) -> NDArray:
    m = np.zeros((9, 9))
    for (i, j), v in entries.items():
        m[i, j] = v
        m[j, i] = v
    return m


@lru_cache(maxsize=None)
def _quadrics() -> NDArray:
    r2, r3, r5, r6, r7 = np.sqrt([2.0, 3.0, 5.0, 6.0, 7.0])
    s1 = r2 * np.diag([28.0, 7.0, -8.0, -17.0, -20.0, -17.0, -8.0, 7.0, 28.0])
    s2 = r3 * _sym({
        (0, 1): 14.0, (1, 2): 5 * r7, (2, 3): 9.0,
        (4, 5): 2 * r5, (5, 6): 9.0, (6, 7): 5 * r7, (7, 8): 14.0,
    })
    s3 = r3 * _sym({
        (0, 7): 14.0, (1, 6): 5 * r7, (1, 8): -14.0, (2, 5): 9.0,
        (2, 7): -5 * r7, (3, 4): 2 * r5, (3, 6): -9.0,
    })
    s4 = r6 * _sym({
        (0, 2): 2 * r7, (1, 3): 3 * r7, (3, 3): 10.0, (4, 6): 6 * r5,
        (5, 5): -10.0, (5, 7): 3 * r7, (6, 8): 2 * r7,
    })
    s5 = r6 * _sym({
        (0, 6): 2 * r7, (1, 5): 3 * r7, (2, 4): 6 * r5, (2, 8): -2 * r7,
        (3, 5): -10.0, (3, 7): -3 * r7,
    })
    s = np.stack([s1, s2, s3, s4, s5])
    s.setflags(write=False)
    return s


def quadric_matrices() -> NDArray:
    """The five symmetric 9x9 matrices, stacked as shape ``(5, 9, 9)``."""
    return _quadrics().copy()


class ResidualVector(NamedTuple):
    norm_residual: float
    quadric_residuals: NDArray

    def as_array(self) -> NDArray:
        return np.concatenate([[self.norm_residual], self.quadric_residuals])

    def max_abs(self) -> float:
        return float(np.abs(self.as_array()).max())


def _quadric_values(a: NDArray) -> tuple[NDArray, NDArray]:
    sa = _quadrics() @ a
    return sa @ a, sa


def residuals(a: ArrayLike) -> ResidualVector:
    """``(a.a - 1, a.S1.a, ..., a.S5.a)``; all zero exactly on the manifold."""
    a = as_coeffs(a)
    q, _ = _quadric_values(a)
    return ResidualVector(float(a @ a - 1.0), q)


def deviation(a: ArrayLike) -> float:
    """Rotation-invariant measure of departure from octahedral symmetry.

    Homogeneous of degree 4 in ``a``; zero on the manifold and on its scalings.
    """
    q, _ = _quadric_values(as_coeffs(a))
    return float(q @ q)


def is_on_manifold(a: ArrayLike, tol: float = 1e-10) -> bool:
    if tol <= 0:
        raise ValueError("tol must be positive")
    return residuals(a).max_abs() <= tol


@dataclass(frozen=True)
class DescentConfig:
    """Weights and line-search parameters for :func:`symmetrize`.

    ``w2`` defaults to 0.001, not 1: the quadric terms are roughly 300-1100
    times stiffer than the normalization term near the manifold, and equal
    weights leave plain gradient descent badly conditioned.
    """

    w1: float = 1.0
    w2: float = 0.001
    initial_step: float = 0.1
    max_iterations: int = 500
    penalty_tolerance: float = 1e-12
    backtracking_factor: float = 0.5
    armijo_constant: float = 1e-4
    max_backtracks: int = 60

    def __post_init__(self):
        for name in ("w1", "w2", "initial_step", "penalty_tolerance"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise ValueError(f"{name} must be positive and finite, got {v}")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        for name in ("backtracking_factor", "armijo_constant"):
            v = getattr(self, name)
            if not 0 < v < 1:
                raise ValueError(f"{name} must lie in (0, 1), got {v}")


DEFAULT_CONFIG = DescentConfig()


def penalty(a: ArrayLike, cfg: DescentConfig = DEFAULT_CONFIG) -> float:
    a = as_coeffs(a)
    q, _ = _quadric_values(a)
    n = a @ a - 1.0
    return float(cfg.w1 * n * n + cfg.w2 * (q @ q))


def penalty_gradient(a: ArrayLike, cfg: DescentConfig = DEFAULT_CONFIG) -> NDArray:
    a = as_coeffs(a)
    q, sa = _quadric_values(a)
    return 4.0 * cfg.w1 * (a @ a - 1.0) * a + 4.0 * cfg.w2 * (q @ sa)


@dataclass
class DescentRecord:
    index: int
    a: Sh4Coeffs
    penalty: float
    sqrt_penalty: float
    step_size: float
    gradient_norm: float
    distance: Optional[float] = None


@dataclass
class DescentTrace:
    records: list[DescentRecord] = field(default_factory=list)
    converged: bool = False
    status: str = "running"

    def __len__(self):
        return len(self.records)

    @property
    def final(self) -> DescentRecord:
        return self.records[-1]

    def column(self, name: str) -> NDArray:
        return np.array([getattr(r, name) for r in self.records], dtype=float)

    def write_csv(self, fh: TextIO) -> None:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(TRACE_HEADER)
        for r in self.records:
            dist = "" if r.distance is None else repr(r.distance)
            w.writerow([r.index, repr(r.penalty), repr(r.sqrt_penalty),
                        repr(r.step_size), repr(r.gradient_norm), dist])


def symmetrize(
    a0: ArrayLike,
    cfg: DescentConfig = DEFAULT_CONFIG,
    distance_fn: Callable[[NDArray], float] | None = None,
) -> DescentTrace:
    """Project ``a0`` onto the manifold by gradient descent on :func:`penalty`.

    Steps are chosen by Armijo backtracking starting from ``cfg.initial_step``
    at every iteration, so accepted penalties decrease strictly.  Record 0 is
    the starting point.  ``distance_fn``, when given, is evaluated at every
    iterate and stored in the trace (e.g. the nearest-orbit distance from
    :func:`octaharm.so3_quotient.nearest_symmetric`).

    The returned trace has ``converged=False`` and a :class:`NonConvergenceWarning`
    is emitted when the iteration or line-search budget runs out.

    Raises
    ------
    DegenerateStartError
        If the gradient vanishes at ``a0`` while the penalty is above tolerance
        (``a0 = 0`` is the typical case).
    """
    a = as_coeffs(a0).copy()
    trace = DescentTrace()

    def record(i, a, p, step, gnorm):
        d = None if distance_fn is None else float(distance_fn(a))
        trace.records.append(DescentRecord(i, a.copy(), p, math.sqrt(p), step, gnorm, d))

    p = penalty(a, cfg)
    g = penalty_gradient(a, cfg)
    gg = float(g @ g)
    record(0, a, p, 0.0, math.sqrt(gg))
    if p <= cfg.penalty_tolerance:
        trace.converged, trace.status = True, "converged"
        return trace
    if gg == 0.0:
        raise DegenerateStartError(
            f"zero gradient at start with penalty {p:.3g}; perturb the initial coefficients")

    for it in range(1, cfg.max_iterations + 1):
        t = cfg.initial_step
        for _ in range(cfg.max_backtracks):
            trial = a - t * g
            p_trial = penalty(trial, cfg)
            if p_trial < p and p_trial <= p - cfg.armijo_constant * t * gg:
                break
            t *= cfg.backtracking_factor
        else:
            trace.status = "line_search_failed"
            break
        a, p = trial, p_trial
        g = penalty_gradient(a, cfg)
        gg = float(g @ g)
        record(it, a, p, t, math.sqrt(gg))
        if p <= cfg.penalty_tolerance:
            trace.converged, trace.status = True, "converged"
            return trace
    else:
        trace.status = "max_iterations"

    warnings.warn(
        f"symmetrize stopped ({trace.status}) after {len(trace) - 1} iterations "
        f"with penalty {p:.3g} > {cfg.penalty_tolerance:.3g}",
        NonConvergenceWarning,
        stacklevel=2,
    )
    return trace
