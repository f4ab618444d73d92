"""Circumcenter-closure toolkit.

Exact and floating-point circumcenter geometry, the angle-doubling dynamics
of the fixed-base iteration, spiral similarity orbits, dyadic segment and
quadrilateral filling, and a planner that reaches arbitrary plane points
with independently verifiable derivation certificates.
"""

from .geometry import (
    CollinearInput,
    DegeneratePair,
    EveryPointFixed,
    GeometryError,
    NoUniqueFixedPoint,
    Point,
    Scalar,
    Similarity,
    Triangle,
    circumcenter,
    circumradius_sq,
    fixed_point,
    iterated_center_report,
    orientation,
    shrink_witness,
    similarity_from_pairs,
)
from .derivation import (
    CenterStep,
    Derivation,
    DerivationBuilder,
    ParseError,
    SeedStep,
    parse,
    serialize,
    verify,
)
from .dynamics import (
    BitStreamAngle,
    CoverageReport,
    OrbitReport,
    RationalAngle,
    UndefinedCotangent,
    UnsupportedPeriodOne,
    cot_point,
    cotpi,
    coverage_experiment,
    orbit,
    shift,
    synthesize_alpha,
    thue_morse,
    verify_cotangent_relation,
)
from .spiral import (
    QueueReport,
    SpiralState,
    isoscelize,
    lambda_of,
    orderly_queues_check,
    p_infinity_formula,
    spiral_orbit,
)
from .fill import (
    BudgetExceeded,
    FillCloud,
    QuadPatch,
    quad_fill,
    quad_map,
    quad_map_inverse,
    reach,
    segment_fill,
)

__version__ = "0.1.0"
