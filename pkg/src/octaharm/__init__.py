"""Degree-4 real spherical harmonics with octahedral symmetry.

Rotation operators on the 9-dimensional coefficient space, the quadric
description of the octahedral manifold, a rotation-invariant deviation
measure and a gradient-descent symmetrizer, plus the octahedral quotient
of SO(3) used to measure distances to the manifold.
"""

from octaharm.sh4_core import (
    Sh4Coeffs,
    SphereSampleGrid,
    as_coeffs,
    canonical_point,
    eval_basis,
    eval_harmonic,
    reference_harmonic,
    sample_sphere,
)
from octaharm.rotation_ops import (
    EulerAngles,
    rotate_coeffs,
    rotation3_from_euler,
    rx90_matrix,
    rx_matrix,
    ry_matrix,
    rz_matrix,
)
from octaharm.octa_variety import (
    DescentConfig,
    DescentTrace,
    deviation,
    is_on_manifold,
    penalty,
    penalty_gradient,
    quadric_matrices,
    residuals,
    symmetrize,
)
from octaharm.so3_quotient import (
    euler_from_quaternion,
    in_fundamental_zone,
    nearest_symmetric,
    octahedral_group,
    quaternion_from_euler,
    quotient_distance,
    reduce_to_fundamental_zone,
)

__version__ = "0.1.0"
