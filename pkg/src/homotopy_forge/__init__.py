"""Executable discrete homotopy theory on finite metric spaces.

Working at a resolution scale r, points within r are "adjacent"; paths,
homotopies, contractibility, motion planners and the derived complexity
invariants all live at that scale. Everything positive the library
reports is backed by an explicit certificate that re-verifies without
search.
"""

from .budgets import DEFAULT_PATCH_NODES, DEFAULT_STATE_BUDGET, Budgets
from .complexity import (
    EquivalenceData,
    InvarianceReport,
    MonotonicityReport,
    MotionPlanner,
    TCReport,
    blocks_cover_planners,
    check_invariance_inequalities,
    monotonicity_report,
    tc_bounds,
    transport_planner,
    verify_equivalence,
)
from .contract import (
    CatReport,
    CategoricalCertificate,
    CategoricalResult,
    ContractibilityCertificate,
    ContractibilityResult,
    cat_bounds,
    check_contractible_implies_connected,
    is_r_categorical,
    is_r_contractible,
    lift_block_certificate,
    restrict_certificate,
)
from .errors import (
    AsymmetryError,
    DomainMismatch,
    EndpointMismatch,
    ForgeError,
    FormatError,
    MetricError,
    MissingBridge,
    NegativeDistance,
    NoPath,
    NonzeroSelfDistance,
    PartialMap,
    TriangleViolation,
    UnknownPoint,
    ValidationFailure,
    ZeroDistanceDistinctPoints,
)
from .homotopy import (
    HomotopyGrid,
    SearchOutcome,
    enumerate_neighbors,
    grid_from_tables,
    homotopy_search,
    search_to_constants,
    verify_homotopy,
)
from .loops import (
    NullHomotopyGrid,
    NullSearchOutcome,
    RLoop,
    is_null_homotopic,
    lemma_certificate,
    loop_from_labels,
)
from .maps import (
    LipMap,
    compose,
    constant_map,
    identity_map,
    inclusion_map,
    is_lipschitz,
    map_from_labels,
    map_uniform_distance,
)
from .paths import (
    DiscretePath,
    concat,
    is_r_path,
    path_from_labels,
    r_connected_components,
    reverse,
    shortest_r_path,
)
from .planner import (
    PatchSearchOutcome,
    contraction_from_planner,
    normalize_lengths,
    planner_from_categorical_patch,
    search_patch_planner,
    synthesize_from_contraction,
    verify_planner,
)
from .serialize import canonical_dumps, dumps, replay_verify, save, to_json
from .spaces import (
    EPS,
    FiniteMetricSpace,
    IntervalSpace,
    PathSpace,
    ProductSpace,
    gen_circle,
    gen_hawaiian,
    gen_interval_grid,
    gen_wedge_circles,
    l1_product,
    space_from_json,
    space_from_points,
    space_to_json,
    validate_metric,
)

__version__ = "0.1.0"
