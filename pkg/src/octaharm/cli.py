"""Command-line interface.

Exit codes: 0 success, 1 usage error, 2 unreadable input, 3 symmetrize did
not converge (outputs are still written).
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import warnings
from pathlib import Path

import numpy as np

from octaharm import io
from octaharm.octa_variety import (
    DegenerateStartError,
    DescentConfig,
    NonConvergenceWarning,
    deviation,
    is_on_manifold,
    residuals,
    symmetrize,
)
from octaharm.rotation_ops import rotate_coeffs
from octaharm.sh4_core import reference_harmonic, sample_sphere
from octaharm.so3_quotient import (
    in_fundamental_zone,
    nearest_symmetric,
    reduce_to_fundamental_zone,
    rodrigues_from_quaternion,
)

EXIT_OK, EXIT_USAGE, EXIT_INPUT, EXIT_NONCONVERGED = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _finite(text: str) -> float:
    v = float(text)
    if not math.isfinite(v):
        raise argparse.ArgumentTypeError(f"not a finite number: {text}")
    return v


def _positive(text: str) -> float:
    v = _finite(text)
    if v <= 0:
        raise argparse.ArgumentTypeError(f"must be positive: {text}")
    return v


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text + "\n")
    else:
        print(text)


def _angles(p):
    p.add_argument("--alpha", type=_finite, default=0.0, help="radians")
    p.add_argument("--beta", type=_finite, default=0.0, help="radians")
    p.add_argument("--gamma", type=_finite, default=0.0, help="radians")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="octaharm", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("make", help="rotated reference harmonic")
    _angles(p)
    p.add_argument("--out")

    p = sub.add_parser("rotate", help="rotate coefficients by Euler angles")
    p.add_argument("--in", dest="inp", required=True, help="coefficients (JSON)")
    _angles(p)
    p.add_argument("--out")

    p = sub.add_parser("residuals", help="normalization and quadric residuals")
    p.add_argument("--in", dest="inp", required=True, help="coefficients (JSON)")
    p.add_argument("--tol", type=_positive, default=1e-10)
    p.add_argument("--out")

    p = sub.add_parser("deviation", help="rotation-invariant symmetry deviation")
    p.add_argument("--in", dest="inp", required=True, help="coefficients (JSON)")

    p = sub.add_parser("symmetrize", help="gradient descent onto the manifold")
    p.add_argument("--in", dest="inp", required=True, help="coefficients (JSON)")
    p.add_argument("--w1", type=_positive, default=DescentConfig.w1, help="normalization weight (%(default)s)")
    p.add_argument("--w2", type=_positive, default=DescentConfig.w2, help="deviation weight (%(default)s)")
    p.add_argument("--step", type=_positive, default=DescentConfig.initial_step,
                   help="initial line-search step (%(default)s)")
    p.add_argument("--max-iter", type=int, default=DescentConfig.max_iterations, help="(%(default)s)")
    p.add_argument("--tol", type=_positive, default=DescentConfig.penalty_tolerance,
                   help="stop once penalty <= tol (%(default)s)")
    p.add_argument("--track-distance", action="store_true", help="fill the trace distance column")
    p.add_argument("--seed", type=int, default=42, help="coarse search seed (%(default)s)")
    p.add_argument("--out", help="final coefficients (JSON)")
    p.add_argument("--trace", help="per-iteration trace (CSV)")

    p = sub.add_parser("distance", help="distance to the nearest symmetric harmonic")
    p.add_argument("--in", dest="inp", required=True, help="coefficients (JSON)")
    p.add_argument("--seed", type=int, default=42, help="coarse search seed (%(default)s)")
    p.add_argument("--refine-iters", type=int, default=400, help="(%(default)s)")
    p.add_argument("--out")

    p = sub.add_parser("reduce-rotation", help="reduce a quaternion to the fundamental zone")
    for c in ("qw", "qx", "qy", "qz"):
        p.add_argument(f"--{c}", type=_finite, required=True)

    p = sub.add_parser("sample", help="sample a harmonic on a theta/phi grid (CSV)")
    p.add_argument("--in", dest="inp", required=True, help="coefficients (JSON)")
    p.add_argument("--ntheta", type=int, default=64, help="theta samples incl. both poles (%(default)s)")
    p.add_argument("--nphi", type=int, default=128, help="phi samples over [0, 2pi) (%(default)s)")
    p.add_argument("--out")
    return parser


def _cmd_symmetrize(args) -> int:
    a0 = io.read_coeffs(args.inp)
    try:
        cfg = DescentConfig(w1=args.w1, w2=args.w2, initial_step=args.step,
                            max_iterations=args.max_iter, penalty_tolerance=args.tol)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    dist_fn = None
    if args.track_distance:
        dist_fn = lambda a: nearest_symmetric(a, seed=args.seed).distance  # noqa: E731
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NonConvergenceWarning)
        trace = symmetrize(a0, cfg, distance_fn=dist_fn)
    final = trace.final
    if args.out:
        io.write_coeffs(args.out, final.a)
    if args.trace:
        with open(args.trace, "w", newline="") as fh:
            trace.write_csv(fh)
    print(f"{trace.status}: {len(trace) - 1} iterations, penalty {final.penalty:.6e}")
    if not args.out:
        print(io.coeffs_to_json(final.a))
    if not trace.converged:
        print(f"warning: penalty above tolerance {cfg.penalty_tolerance:g}", file=sys.stderr)
        return EXIT_NONCONVERGED
    return EXIT_OK


def _dispatch(args) -> int:
    cmd = args.command
    if cmd == "make":
        a = rotate_coeffs(reference_harmonic(), (args.alpha, args.beta, args.gamma))
        _emit(io.coeffs_to_json(a), args.out)
    elif cmd == "rotate":
        a = rotate_coeffs(io.read_coeffs(args.inp), (args.alpha, args.beta, args.gamma))
        _emit(io.coeffs_to_json(a), args.out)
    elif cmd == "residuals":
        a = io.read_coeffs(args.inp)
        r = residuals(a)
        _emit(json.dumps({
            "norm_residual": r.norm_residual,
            "quadric_residuals": [float(x) for x in r.quadric_residuals],
            "max_abs": r.max_abs(),
            "on_manifold": is_on_manifold(a, args.tol),
        }), args.out)
    elif cmd == "deviation":
        print(repr(deviation(io.read_coeffs(args.inp))))
    elif cmd == "symmetrize":
        return _cmd_symmetrize(args)
    elif cmd == "distance":
        res = nearest_symmetric(io.read_coeffs(args.inp), args.refine_iters, seed=args.seed)
        _emit(json.dumps({
            "euclidean_distance_r9": res.distance,
            "q_best": [float(x) for x in res.q_best],
            "sign": res.sign,
        }), args.out)
    elif cmd == "reduce-rotation":
        q = np.array([args.qw, args.qx, args.qy, args.qz])
        n = np.linalg.norm(q)
        if n == 0:
            raise UsageError("quaternion must be nonzero")
        red, idx = reduce_to_fundamental_zone(q / n)
        r = rodrigues_from_quaternion(red)
        print(json.dumps({
            "q_reduced": [float(x) for x in red],
            "symmetry_index": idx,
            "rodrigues": [float(x) for x in r],
            "in_fundamental_zone": bool(in_fundamental_zone(r)),
        }))
    elif cmd == "sample":
        a = io.read_coeffs(args.inp)
        try:
            grid = sample_sphere(a, args.ntheta, args.nphi)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
        if args.out:
            with open(args.out, "w", newline="") as fh:
                io.write_sample_csv(fh, grid)
        else:
            io.write_sample_csv(sys.stdout, grid)
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _dispatch(args)
    except io.InputFormatError as exc:
        print(f"octaharm: cannot read input: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except UsageError as exc:
        print(f"octaharm: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DegenerateStartError as exc:
        print(f"octaharm: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGED


if __name__ == "__main__":
    sys.exit(main())
