"""Exact longest-run distributions for scoring sequences, and tests of
whether real scoring runs outrun an independent-trials model."""

from .gamedata import (
    EventKind,
    GameDataError,
    GameLog,
    GameScope,
    ParseError,
    ScoringEvent,
    SequenceMode,
    derive_ds,
    ds_counts,
    estimate_p_same,
    load_games,
    longest_run_for_team,
    longest_team_run,
    matched_games_filter,
    scoring_sequence,
)
from .gof import (
    ChiSquareResult,
    DfConvention,
    GofError,
    LengthFrequencyTable,
    chi_square_test,
    chi_square_upper_tail,
    expected_counts,
    observed_counts,
    pool_bins,
    summarize,
)
from .montecarlo import (
    SimConfig,
    empirical_longest_run_pmf,
    simulate_bernoulli_labels,
    simulate_labels,
    simulate_season,
)
from .runcore import (
    AbsorbingChain,
    LongestRunDistribution,
    build_transition_matrix,
    dp_longest_run_distribution,
    expected_longest_run,
    longest_run_distribution,
    matrix_power,
    prob_longest_run_at_least,
    team_run_expectation,
    team_run_pmf,
)

__version__ = "0.1.0"

__all__ = [
    "AbsorbingChain",
    "ChiSquareResult",
    "DfConvention",
    "EventKind",
    "GameDataError",
    "GameLog",
    "GameScope",
    "GofError",
    "LengthFrequencyTable",
    "LongestRunDistribution",
    "ParseError",
    "ScoringEvent",
    "SequenceMode",
    "SimConfig",
    "build_transition_matrix",
    "chi_square_test",
    "chi_square_upper_tail",
    "derive_ds",
    "dp_longest_run_distribution",
    "ds_counts",
    "empirical_longest_run_pmf",
    "estimate_p_same",
    "expected_counts",
    "expected_longest_run",
    "load_games",
    "longest_run_distribution",
    "longest_run_for_team",
    "longest_team_run",
    "matched_games_filter",
    "matrix_power",
    "observed_counts",
    "pool_bins",
    "prob_longest_run_at_least",
    "scoring_sequence",
    "simulate_bernoulli_labels",
    "simulate_labels",
    "simulate_season",
    "summarize",
    "team_run_expectation",
    "team_run_pmf",
    "__version__",
]
