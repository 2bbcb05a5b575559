"""Elo ratings for round-robin tournaments: the rating algorithm, a closed-form
stochastic model of its convergence, step-size design, and Monte-Carlo checks."""

__version__ = "0.1.0"

from .core_model import (
    MatchRecord,
    ScenarioParams,
    base10_sigmoid,
    log_loss,
    logistic,
    logistic_pdf,
    match_loss,
    scale_to_base10,
    win_probability,
)
from .scheduling import (
    Schedule,
    build_double_round_robin,
    empirical_autocorrelation,
    sample_uniform_match,
    sample_uniform_schedule,
    schedule_vector,
    theoretical_autocorrelation,
)
from .elo_engine import (
    EstimationResult,
    FitConfig,
    RatingTrajectory,
    elo_update,
    fit_batch_ml,
    linearized_update,
    run_linearized,
    run_rating,
    sample_variance,
)
from .theory import (
    ConvergenceRates,
    LaplaceIdentity,
    NumericalError,
    StabilityError,
    TheoryCurves,
    convergence_rates,
    ell_min,
    fisher_information,
    games_to_convergence,
    h2_bar,
    h_bar,
    improvement_upper_bound,
    laplace_expectation,
    msd_at,
    optimal_beta_approx,
    optimal_beta_exact_k1,
    optimal_beta_naive_taylor,
    optimal_beta_numeric,
    small_v_rule_of_thumb,
    stability_limit,
    theory_trajectory,
    v_threshold,
)
from .montecarlo import (
    ComparisonReport,
    EnsembleConfig,
    EnsembleStats,
    compare_to_theory,
    draw_true_skills,
    run_ensemble,
    simulate_outcome,
)
from .data_io import (
    ParseError,
    SeasonDataset,
    SeasonSummary,
    cross_season_average,
    format_summary_table,
    generate_synthetic_season,
    load_table1,
    parse_season_csv,
    read_season_csv,
    serialize_season_csv,
    summarize_season,
    tail_mean,
)
