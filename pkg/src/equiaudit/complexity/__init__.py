from .rademacher import (
    CONVENTIONS,
    EXHAUSTIVE_CAP,
    PointSet,
    RademacherRow,
    RademacherTable,
    empirical_rademacher,
    invariant_features,
    is_separable,
    rademacher_table,
    realizable_dichotomies,
)
from .simplex import feasible_point

__all__ = [
    "CONVENTIONS",
    "EXHAUSTIVE_CAP",
    "PointSet",
    "RademacherRow",
    "RademacherTable",
    "empirical_rademacher",
    "feasible_point",
    "invariant_features",
    "is_separable",
    "rademacher_table",
    "realizable_dichotomies",
]
