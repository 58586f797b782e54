"""Operator-algebraic, spectral and boundary-measure invariants of finite multigraphs."""

from .boundary_measure import (
    PSMeasure,
    basepoint_rn_check,
    conformality_residual,
    conformality_sweep,
    ps_cylinder_measure,
)
from .classify import Fingerprint, algebra_transport, build_conjugacy, fingerprint, survey
from .covering_tree import CoveringTree, fixed_point_density_check, generators_from_spanning_tree
from .errors import (
    ConvergenceError,
    CrossCheckError,
    DepthOverflowError,
    GraphFormatError,
    GraphQSMError,
    InadmissibleGraphError,
    InsufficientDepthError,
    RankMismatchError,
    SizeLimitError,
)
from .ktheory import (
    AbelianGroup,
    edge_ck_strict_iso,
    k0_boundary_algebra,
    k0_vertex_ck,
    smith_normal_form,
    theorem1_oracle,
)
from .multigraph import (
    Multigraph,
    betti,
    enumerate_multigraphs,
    isomorphic,
    load_multigraph,
    parse_multigraph,
    serialize_multigraph,
)
from .nonbacktracking import PerronData, bass_hashimoto, ihara_zeta_recip, perron_root
from .qsm import (
    CPElement,
    CrossedProduct,
    TimeParameter,
    cp_multiply,
    kms_residual,
    kms_state,
    time_evolve,
)

__version__ = "0.1.0"
