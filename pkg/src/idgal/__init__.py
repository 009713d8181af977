"""Exact iterative-derivation algebra in positive characteristic.

Working stack: prime fields and p-adic digit streams (charp), truncated
Laurent series and multivariate monomials with termwise higher derivatives
(series), derivation models over those carriers with axiom verification and
purely inseparable adjunctions (derivations), iterative differential
equations with gauge transforms and descent checks (ide), level subfields
and p-power-root towers (towers), constants of tensor squares with
bialgebra recognition (groupscheme), and end-to-end example pipelines with
a CLI (examples, cli).  All arithmetic is exact; every claim is asserted
on an explicit window and order.
"""

from .charp import (
    PAdicDigits,
    PrimeField,
    digit_shift,
    int_digits,
    lucas_binom,
    multi_binom,
    multi_lucas,
    num_digits,
    padic_combination,
    truncation,
)
from .derivations import (
    AxiomReport,
    DerivationModel,
    ExtElement,
    MonomialModel,
    PolyExtModel,
    SeriesModel,
    SymbolicAdjunction,
    adjoin_solution,
    check_nondegenerate,
    complete_multiplicative_rule,
    constants_in_ansatz,
    corrupted_variants,
    differentially_finite_dim,
    verify_axioms,
)
from .errors import IdgalError, Inconclusive, PoleAtOrigin, PrecisionError
from .examples import (
    CANONICAL_EX2,
    CANONICAL_EX3,
    ExampleConfig,
    admissible_stream_rows,
    default_suite,
    gen_example1,
    gen_example2,
    gen_example3,
    run_pipeline,
    run_suite,
    seeded_digit_streams,
)
from .groupscheme import (
    BialgebraData,
    TensorGen,
    TensorSquare,
    alpha_frobenius_kernel,
    bialgebra_equal,
    check_bialgebra,
    constants_search,
    height,
    leg_closure_and_constants,
    recognize,
)
from .ide import (
    IDE,
    SolutionMatrix,
    check_descent,
    from_p_power_data,
    gauge_transform,
    ide_from_basis,
    ide_from_json,
    ide_to_json,
    is_fundamental,
    solve_at_origin,
    validate,
)
from .series import (
    LaurentSeries,
    MonomialRing,
    coordinates_in_basis,
    p_power_root,
    parse_series,
    series_equal,
    series_from_json,
    series_to_json,
    theta_multi,
    theta_series,
)
from .towers import (
    BracketExtension,
    exponent,
    j_indices,
    kernel_subspace,
    make_bracket,
    theta_on_bracket,
    verify_tower_degrees,
)

__version__ = "0.1.0"

__all__ = [
    "AxiomReport",
    "BialgebraData",
    "BracketExtension",
    "CANONICAL_EX2",
    "CANONICAL_EX3",
    "DerivationModel",
    "ExampleConfig",
    "ExtElement",
    "IDE",
    "IdgalError",
    "Inconclusive",
    "LaurentSeries",
    "MonomialModel",
    "MonomialRing",
    "PAdicDigits",
    "PoleAtOrigin",
    "PolyExtModel",
    "PrecisionError",
    "PrimeField",
    "SeriesModel",
    "SolutionMatrix",
    "SymbolicAdjunction",
    "TensorGen",
    "TensorSquare",
    "adjoin_solution",
    "admissible_stream_rows",
    "alpha_frobenius_kernel",
    "bialgebra_equal",
    "check_bialgebra",
    "check_descent",
    "check_nondegenerate",
    "complete_multiplicative_rule",
    "constants_in_ansatz",
    "constants_search",
    "coordinates_in_basis",
    "corrupted_variants",
    "default_suite",
    "differentially_finite_dim",
    "digit_shift",
    "exponent",
    "from_p_power_data",
    "gauge_transform",
    "gen_example1",
    "gen_example2",
    "gen_example3",
    "height",
    "ide_from_basis",
    "ide_from_json",
    "ide_to_json",
    "int_digits",
    "is_fundamental",
    "j_indices",
    "kernel_subspace",
    "leg_closure_and_constants",
    "lucas_binom",
    "make_bracket",
    "multi_binom",
    "multi_lucas",
    "num_digits",
    "p_power_root",
    "padic_combination",
    "parse_series",
    "recognize",
    "run_pipeline",
    "run_suite",
    "seeded_digit_streams",
    "series_equal",
    "series_from_json",
    "series_to_json",
    "solve_at_origin",
    "theta_multi",
    "theta_on_bracket",
    "theta_series",
    "truncation",
    "validate",
    "verify_axioms",
    "verify_tower_degrees",
]
