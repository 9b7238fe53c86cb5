"""Douglas-Rachford and alternating projections for two subspaces.

The submodules cover subspace geometry (:mod:`subspace_core`), explicit
operator matrices (:mod:`operators`), iteration drivers
(:mod:`iteration`), rate verification (:mod:`rates`), planar closed
forms (:mod:`two_lines`), the block-model demo (:mod:`ell2_demo`) and
the random benchmark (:mod:`experiments`).
"""

from .iteration import (
    FixedCount,
    MaxDistance,
    Method,
    TrueError,
    run_batch,
    run_dr,
    run_map,
)
from .operators import dr_adjoint, dr_operator, fix_projector, map_operator, verify_identities
from .rates import rate_report
from .subspace_core import (
    Subspace,
    complement,
    intersect,
    orthonormalize,
    principal_angles,
    project,
)

__version__ = "0.1.0"

__all__ = [
    "Subspace",
    "orthonormalize",
    "project",
    "complement",
    "intersect",
    "principal_angles",
    "dr_operator",
    "dr_adjoint",
    "map_operator",
    "fix_projector",
    "verify_identities",
    "Method",
    "TrueError",
    "MaxDistance",
    "FixedCount",
    "run_dr",
    "run_map",
    "run_batch",
    "rate_report",
]
