"""Invariant metrics and dual-domain certification on projective spaces and Grassmannians."""

import os as _os

# Cap BLAS/OpenMP pools before numpy/scipy spin them up.  Must happen at
# package import, which is as early as the console script allows.
_cap = _os.environ.get("FLAGMETRIC_THREADS")
if _cap:
    for _var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS",
                 "MKL_NUM_THREADS", "NUMEXPR_NUM_THREADS"):
        _os.environ.setdefault(_var, _cap)
del _os

from .errors import (
    DegeneratePairing,
    DimensionMismatch,
    FiberExitsImmediately,
    FlagMetricError,
    InvalidDimension,
    NoWitness,
    NotAnAutomorphism,
    NotConvex,
    NotDualConvexAt,
    NotInDomain,
    NotPD,
    NotProper,
    OutsideDomain,
    ParseError,
    RankDeficient,
    SpanningFailure,
    ValidationError,
)
from .domains import (
    BallDomain,
    Certificate,
    ChartSpec,
    Domain,
    ExplicitVertices,
    MatrixBallDomain,
    OracleDomain,
    ParametricMatrixBall,
    ParametricPolarBall,
    PDConeDomain,
    PDConePairing,
    PolytopeDomain,
    SampleCloud,
    boundary_sample,
    dual_convexity_certificate,
    dual_membership_certificate,
    dual_of,
    lshape_domain,
    properness_certificate,
    smat,
    spanning_basis,
    standard_chart,
    svec,
    sym_dim,
)
from .metrics import (
    CompletenessVerdict,
    InvarianceReport,
    MetricValue,
    caratheodory_metric,
    completeness_probe,
    evaluate_dual_pair,
    hilbert_metric_line,
    invariance_check,
    kobayashi_c,
    kobayashi_k,
)
from .optimize import DEFAULT_OPT, OptimizerConfig
from .report import polyline_svg, render_csv, render_metric_ball
from .rigidity import (
    FiberDemo,
    FiberWitness,
    FlagDomainSpec,
    OppositeDensityReport,
    fiber_boundary_demo,
    fiber_escape_witness,
    opposite_density_check,
    random_flag,
    standard_flag_domain,
)
from .symmetric import (
    act,
    boost,
    check_indefinite_orthogonal,
    indefinite_form,
    pd_cone_act,
    pd_cone_ambient_matrix,
    pd_cone_transitivity_witness,
    sample_automorphism,
    sample_pd_cone_element,
    transitivity_witness,
)
from .geometry import (
    DEFAULT_TOL,
    DualGrassmannPoint,
    FullFlag,
    GrassmannPoint,
    ProjectivePoint,
    Tolerances,
    canonicalize,
    complementary_dims,
    cross_ratio,
    flag_project,
    flag_transverse,
    flag_from_raw,
    grassmann_distance,
    is_transverse,
    orthocomplement,
    pairing,
    plucker_lift,
    principal_angles,
    random_grassmann_point,
    same_span,
    subspace_intersection,
)

__version__ = "0.1.0"
