"""Primitive lattice sets: exact Hermite normal forms, Moebius/zeta sums and
numerical verification of the primitive-set density 1/[zeta(d)...zeta(d-m+1)].
"""

__version__ = "0.1.0"

from .errors import (
    CapacityError,
    ContractError,
    DomainError,
    ParseError,
    PrimsetError,
    RankError,
    ShapeError,
    SizeGuardError,
)
from .numbers import (
    CertifiedValue,
    MobiusTable,
    mobius_sieve,
    mobius_sum_reciprocal_zeta,
    target_probability,
    zeta_certified,
)
from .lattice import (
    BoundReport,
    HnfResult,
    IntMatrix,
    complete_to_basis,
    determinant,
    hnf,
    hnf_bounded,
    incremental_gcd_check,
    is_hnf,
    is_primitive,
    is_primitive_minors,
    is_unimodular,
    random_unimodular,
    saturation_index,
)
from .sampling import (
    BoxFamily,
    BoxSpec,
    SeededSampler,
    crt_blind_box,
    make_box,
    sample_pointset,
)
from .experiments import (
    CountResult,
    EstimateResult,
    LambdaSpec,
    check_covering_bounds,
    convergence_table,
    count_lambda_points,
    estimate_primitive_probability,
    exact_primitive_probability,
    inclusion_exclusion_identity,
    u_independence_check,
)
