"""Randomized maximin-share allocation for subadditive valuations, with an
exact-arithmetic verification suite for the concentration inequalities and
extremal constructions the guarantee rests on."""

from .allocation import (
    Agent,
    AlgoParams,
    Allocation,
    AllocationDiagnostics,
    FractionalSolution,
    Instance,
    LpEntry,
    PreparedInstance,
    ROUNDING_STRATEGIES,
    TentativeAllocation,
    allocate,
    allocate_prepared,
    check_feasible,
    copy_count,
    encode_mms_lp,
    instance_from_json,
    instance_to_json,
    prepare,
    preprocess,
    resolve_uniform,
    round_one_copy,
)
from .concentration import (
    ConcentrationReport,
    DistributionSummary,
    ExpectationBoundReport,
    LowerBoundReport,
    SampleSpec,
    SchechtmanReport,
    TalagrandInput,
    TalagrandReport,
    check_concentration,
    check_expectation_bound,
    check_expectation_lower_bound,
    check_schechtman_tail,
    check_talagrand_corollary,
    exact_value_distribution,
    max_expected_distance,
    sample_subset,
    schechtman_bound,
    sparse_binomial_example,
    staircase_expectation,
    talagrand_distance,
)
from .harness import (
    REPORT_HEADER,
    CorpusSpec,
    TrialStats,
    bench_corpus,
    emit_report,
    generate_corpus,
    random_valuation,
    render_report_csv,
    run_trials,
    share_target,
)
from .items import ItemSet
from .mms import MmsResult, exact_mms, normalize_to_unit_mms
from .rng import make_rng, mix64, stream_seed
from .valuations import (
    Additive,
    ClassFlags,
    Coverage,
    NearTwo,
    Scaled,
    Staircase,
    Table,
    Valuation,
    Xos,
    as_fraction,
    check_class,
    evaluate,
    make_near_two,
    make_staircase,
    scale,
    valuation_from_json,
)

__version__ = "0.1.0"

__all__ = [
    "Agent",
    "AlgoParams",
    "Allocation",
    "AllocationDiagnostics",
    "FractionalSolution",
    "Instance",
    "LpEntry",
    "PreparedInstance",
    "ROUNDING_STRATEGIES",
    "TentativeAllocation",
    "allocate",
    "allocate_prepared",
    "check_feasible",
    "copy_count",
    "encode_mms_lp",
    "instance_from_json",
    "instance_to_json",
    "prepare",
    "preprocess",
    "resolve_uniform",
    "round_one_copy",
    "ConcentrationReport",
    "DistributionSummary",
    "ExpectationBoundReport",
    "LowerBoundReport",
    "SampleSpec",
    "SchechtmanReport",
    "TalagrandInput",
    "TalagrandReport",
    "check_concentration",
    "check_expectation_bound",
    "check_expectation_lower_bound",
    "check_schechtman_tail",
    "check_talagrand_corollary",
    "exact_value_distribution",
    "max_expected_distance",
    "sample_subset",
    "schechtman_bound",
    "sparse_binomial_example",
    "staircase_expectation",
    "talagrand_distance",
    "REPORT_HEADER",
    "CorpusSpec",
    "TrialStats",
    "bench_corpus",
    "emit_report",
    "generate_corpus",
    "random_valuation",
    "render_report_csv",
    "run_trials",
    "share_target",
    "ItemSet",
    "MmsResult",
    "exact_mms",
    "normalize_to_unit_mms",
    "make_rng",
    "mix64",
    "stream_seed",
    "Additive",
    "ClassFlags",
    "Coverage",
    "NearTwo",
    "Scaled",
    "Staircase",
    "Table",
    "Valuation",
    "Xos",
    "as_fraction",
    "check_class",
    "evaluate",
    "make_near_two",
    "make_staircase",
    "scale",
    "valuation_from_json",
    "__version__",
]
