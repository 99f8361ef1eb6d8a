"""Finite topological spaces, locally product subsets and finite 2-spaces."""

from .harness import SweepConfig, SweepReport, enumerate_preorders, fence_sweep, run_sweep
from .product import (
    Decomposition,
    Hypotheses,
    InvalidFence,
    LocalProductCertificate,
    ProductSpace,
    SubsetC,
    TheoremVerdict,
    TheoremViolation,
    decompose,
    is_rectangle,
    local_product_certificate,
    mixed_pair_property,
    product,
    theorem_verdict,
)
from .space import (
    FiniteSpace,
    InputError,
    PointSet,
    all_opens,
    closure,
    is_closed,
    is_continuous,
    is_open,
    is_path_connected,
    minimal_open,
    subspace,
)
from .twospace import (
    ChartRec,
    PreconditionError,
    TwoMapRec,
    TwoSpaceModel,
    check_chart,
    check_compatibility,
    check_two_map,
    from_locally_product_subset,
    two_product,
    validate_two_space,
)

__version__ = "0.1.0"
