"""Exact exponential sums with sparse polynomials over prime fields.

Public surface: field contexts and sparse polynomials, subgroup and gcd
machinery, exact sum evaluation, dual-route combinatorial counting, the
numeric bound catalog, and the sweep harness behind the `sparsesums` CLI.
"""

from .bounds import (
    BoundEntry,
    BoundReport,
    GcdBound,
    PiecewiseBound,
    ccp_bound,
    compare_bounds,
    cp_bound,
    dx_bound,
    n_triples_bound,
    quadlinear_general_bound,
    quadlinear_subgroup_bound,
    quadrinomial_gcd_bound,
    shifted_energy_bound,
    threshold,
    weil_bound,
)
from .energy import (
    CauchyStepReport,
    CountValue,
    Distribution,
    cauchy_step_report,
    d_times,
    diff_counts,
    i_distribution,
    j_distribution,
    lambda_square_sum,
    mult_energy,
    n_triples,
    shifted_energy,
)
from .errors import (
    BudgetExceeded,
    CompositeModulus,
    ConfigInvalid,
    DegenerateExponents,
    IoFailure,
    ModulusTooLarge,
    NonUniformImage,
    NonzeroRequired,
    NotADivisor,
    OrderingViolated,
    SparseSumsError,
    UnknownKind,
)
from .field import FieldCtx, SparsePoly, is_prime, make_field_ctx, smallest_primitive_root
from .subgroups import (
    GcdParams,
    ImageWithMultiplicity,
    Subgroup,
    all_subgroups,
    gcd_params,
    power_image,
    product_set,
    subgroup_of_order,
)
from .sums import (
    CharacterIndex,
    SumValue,
    bilinear_sum,
    quadlinear_sum,
    sum_decomposed,
    sum_exact,
    unit_weights,
)
from .sweep import (
    SweepConfig,
    VerifyReport,
    emit_plot_data,
    load_records,
    run_sweep,
    run_verify,
    write_records,
)

__all__ = [
    "BoundEntry",
    "BoundReport",
    "BudgetExceeded",
    "CauchyStepReport",
    "CharacterIndex",
    "CompositeModulus",
    "ConfigInvalid",
    "CountValue",
    "DegenerateExponents",
    "Distribution",
    "FieldCtx",
    "GcdBound",
    "GcdParams",
    "ImageWithMultiplicity",
    "IoFailure",
    "ModulusTooLarge",
    "NonUniformImage",
    "NonzeroRequired",
    "NotADivisor",
    "OrderingViolated",
    "PiecewiseBound",
    "SparsePoly",
    "SparseSumsError",
    "Subgroup",
    "SumValue",
    "SweepConfig",
    "UnknownKind",
    "VerifyReport",
    "all_subgroups",
    "bilinear_sum",
    "cauchy_step_report",
    "ccp_bound",
    "compare_bounds",
    "cp_bound",
    "d_times",
    "diff_counts",
    "dx_bound",
    "emit_plot_data",
    "gcd_params",
    "i_distribution",
    "is_prime",
    "j_distribution",
    "lambda_square_sum",
    "load_records",
    "make_field_ctx",
    "mult_energy",
    "n_triples",
    "n_triples_bound",
    "power_image",
    "product_set",
    "quadlinear_general_bound",
    "quadlinear_subgroup_bound",
    "quadlinear_sum",
    "quadrinomial_gcd_bound",
    "run_sweep",
    "run_verify",
    "shifted_energy",
    "shifted_energy_bound",
    "smallest_primitive_root",
    "subgroup_of_order",
    "sum_decomposed",
    "sum_exact",
    "threshold",
    "unit_weights",
    "weil_bound",
    "write_records",
]

__version__ = "0.1.0"
