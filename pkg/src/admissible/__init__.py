"""Numerical toolkit for admissible (Koranyi-type) boundary limits of holomorphic functions."""

__version__ = "0.1.0"

from .cplx import INF, Jet, chordal_distance, hermitian_inner
from .errors import (
    AdmissibleError,
    ChainError,
    EvaluationError,
    FitError,
    GeometryError,
    InvariantError,
    ParseError,
    PoleError,
    SamplingError,
)
from .expr import FnHandle, catalog, eval_jet, evaluate, function, parse, reciprocal, to_text
from .geometry import Ellipsoid, GraphDomain, UnitBall, boundary_frame, delta_xi, graph_d
from .regions import RegionSpec, contains, normal_ray, paper_parabola, parse_region, sample_region
from .derivatives import (
    cauchy_estimate_check,
    directional_spherical,
    growth_fit,
    nabla_functional,
    spherical_derivative_1d,
)
from .chains import Polydisc, RescaledFn, build_chain, marty_functional, normality_score
from .limits import (
    admissible_verdict,
    classify,
    criterion_t1_check,
    estimate_limit,
    growth_verdict,
    lindelof_refined_verdict,
    single_region_verdict,
)
