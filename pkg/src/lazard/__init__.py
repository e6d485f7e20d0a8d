"""Exact mod-p and mod-p^k cohomology of finite-rank Lie algebras, with the
group side reached through a truncated Baker-Campbell-Hausdorff engine and a
two-column spectral recursion over rank-one quotient chains."""

from .bch import (
    BCHTable,
    HallBasis,
    LinearOperator,
    bch_table,
    conjugation_operator,
    group_mul,
    group_pow,
    hall_basis,
    truncated_exp,
    truncated_log,
)
from .cohomology import (
    CochainComplex,
    CohomologySpace,
    LieModule,
    betti,
    ce_complex,
    cocycle_representatives,
    cup_product,
    eckmann_shapiro_check,
    induced_map,
    integral_cohomology,
    uct_reconcile,
)
from .corpus import corpus, corpus_names
from .fileformat import emit_algebra, parse_algebra
from .lhs import (
    ComparisonReport,
    SpectralPage,
    coinvariants_dim,
    invariants_dim,
    lemma_abelian_check,
    main_theorem_check,
    solvable_betti,
    two_column_page,
)
from .liecore import (
    FiltrationChain,
    LieAlgebra,
    SolvableChain,
    Submodule,
    derived_series,
    derived_subalgebra,
    is_solvable,
    isolator,
    solvable_chain,
    validate,
    verify_pf_chain,
)
from .modarith import (
    ModMatrix,
    PrimeContext,
    SmithDecomposition,
    rank_kernel,
    smith_normal_form,
    solve,
    unit_inverse,
)

__all__ = [
    "BCHTable",
    "CochainComplex",
    "CohomologySpace",
    "ComparisonReport",
    "FiltrationChain",
    "HallBasis",
    "LieAlgebra",
    "LieModule",
    "LinearOperator",
    "ModMatrix",
    "PrimeContext",
    "SmithDecomposition",
    "SolvableChain",
    "SpectralPage",
    "Submodule",
    "bch_table",
    "betti",
    "ce_complex",
    "cocycle_representatives",
    "coinvariants_dim",
    "conjugation_operator",
    "corpus",
    "corpus_names",
    "cup_product",
    "derived_series",
    "derived_subalgebra",
    "eckmann_shapiro_check",
    "emit_algebra",
    "group_mul",
    "group_pow",
    "hall_basis",
    "induced_map",
    "integral_cohomology",
    "invariants_dim",
    "is_solvable",
    "isolator",
    "lemma_abelian_check",
    "main_theorem_check",
    "parse_algebra",
    "rank_kernel",
    "smith_normal_form",
    "solvable_betti",
    "solvable_chain",
    "solve",
    "truncated_exp",
    "truncated_log",
    "two_column_page",
    "uct_reconcile",
    "unit_inverse",
    "validate",
    "verify_pf_chain",
]

__version__ = "0.1.0"
