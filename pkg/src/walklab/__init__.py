"""Staggered quantum walks with Hamiltonians on Cayley graphs of finite groups."""

from .cayley import ConnectionSet, adjacency_matrix, is_connected, validate_connection_set
from .estimator import StaggeredWalk
from .exceptions import (
    ConfigError,
    ConnectionSetError,
    GroupError,
    HypothesisError,
    PartitionError,
    WalklabError,
)
from .groups import (
    FiniteGroup,
    all_subgroups,
    is_subgroup_with_id,
    make_abelian_product,
    make_from_table,
    right_cosets,
    set_product,
    subgroup_closure,
)
from .operators import (
    Angle,
    EvolutionOperator,
    ReflectionOperator,
    ctqw,
    discretization_check,
    expi_reflection,
    parse_angle,
    phase_equal,
    power,
    reflection_from_tessellation,
    staggered_step,
)
from .phenomena import (
    PhenomenonReport,
    ThetaSchedule,
    certify_ium,
    detect_ium,
    detect_period,
    detect_pst,
    ium_schedule,
    pst_schedule,
)
from .tessellation import (
    ConnectionPartition,
    CoveringReport,
    Tessellation,
    build_tessellations,
    classify_covering,
    commute_matrix,
    commute_settheoretic,
    subgroup_partitions,
)

__version__ = "0.1.0"

__all__ = [
    "Angle",
    "ConfigError",
    "ConnectionPartition",
    "ConnectionSet",
    "ConnectionSetError",
    "CoveringReport",
    "EvolutionOperator",
    "FiniteGroup",
    "GroupError",
    "HypothesisError",
    "PartitionError",
    "PhenomenonReport",
    "ReflectionOperator",
    "StaggeredWalk",
    "Tessellation",
    "ThetaSchedule",
    "WalklabError",
    "adjacency_matrix",
    "all_subgroups",
    "build_tessellations",
    "certify_ium",
    "classify_covering",
    "commute_matrix",
    "commute_settheoretic",
    "ctqw",
    "detect_ium",
    "detect_period",
    "detect_pst",
    "discretization_check",
    "expi_reflection",
    "is_connected",
    "is_subgroup_with_id",
    "ium_schedule",
    "make_abelian_product",
    "make_from_table",
    "parse_angle",
    "phase_equal",
    "power",
    "pst_schedule",
    "reflection_from_tessellation",
    "right_cosets",
    "set_product",
    "staggered_step",
    "subgroup_closure",
    "subgroup_partitions",
    "validate_connection_set",
]
