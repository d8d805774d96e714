"""Variable-length prefix coding with unequal symbol costs and an error budget."""

from .bounds import (
    BoundReport,
    DeviationRecord,
    RelationCheck,
    achievability_bound,
    bound_report,
    converse_bound,
    cost_rate_relation_check,
    first_order_rate_iid,
    gaussian_q,
    inverse_q,
    second_order_rate_iid,
    second_order_sequence,
)
from .costs import (
    CostFunction,
    RegularityReport,
    cost_of_word,
    golden_cost,
    log_base,
    memoryless_cost,
    parse_cost_file,
    q_weight,
    random_regular_cost,
    solve_cost_capacity,
    uniform_cost,
    validate_regularity,
)
from .errors import (
    CodebookInvariantError,
    CostcodeError,
    ExactnessUnavailableError,
    InfeasibleError,
    InvalidCodewordError,
    InvalidInputError,
    NonRegularCostError,
    ParseError,
    PrecisionExhaustionError,
    SupportBlowupError,
)
from .oracle import OracleResult, SandwichReport, check_sandwich, optimal_code_exhaustive
from .sfe import (
    Codebook,
    DominantSet,
    IntervalAssignment,
    assign_codeword,
    average_cost_rate,
    build_code,
    build_dominant_set,
    decode,
    dump_codebook,
    encode,
    error_probability,
    interval_of_word,
    transcode,
)
from .smooth import (
    AppendixReport,
    RateRecord,
    SmoothEntropyResult,
    appendix_report,
    g_delta_exact,
    g_delta_greedy,
    h_delta_exact,
    h_delta_greedy,
    rate_sequence,
    subset_objective,
)
from .sources import (
    Distribution,
    IidSource,
    bernoulli,
    block_distribution,
    conditional_on_set,
    entropy,
    parse_distribution_file,
    self_information,
    uniform,
    varentropy,
)

__version__ = "0.1.0"
