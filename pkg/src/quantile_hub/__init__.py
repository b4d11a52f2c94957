"""Collaborative quantile-forecasting platform.

Collects weekly five-quantile forecasts for financial and weather
targets, validates the submission wire format, generates benchmark /
EMOS / combined forecasts, scores everything with proper scoring rules
and publishes rank-based leaderboards through files, a CLI and a
read-only JSON API.
"""

from .core import (
    ALL_TARGETS,
    DAX_TARGET,
    DEFAULT_LEVELS,
    Horizon,
    Observation,
    ObservationStatus,
    QuantileForecast,
    QuantileLevels,
    RoundSpec,
    Target,
    TargetKind,
    resolve_valid_time,
    TEMPERATURE_TARGET,
    WIND_TARGET,
    target_for_name,
)
from .submissions import (
    ErrorCode,
    RESERVED_ALIASES,
    SubmissionFile,
    ValidationReport,
    parse_submission,
    parse_submission_filename,
    serialize_submission,
    submission_filename,
)
from .ingestion import (
    EnsembleNwpForecast,
    ObservationSeries,
    PriceSeries,
    compute_return,
    dax_outcome,
    load_nwp_file,
    load_observations,
    load_prices,
)
from .benchmarks import (
    DistributionFamily,
    EmosParams,
    RollingWindowConfig,
    crps_closed_form,
    dax_benchmark,
    emos_fit,
    emos_predict,
    empirical_quantiles,
    raw_ensemble_benchmark,
)
from .scoring import (
    AggregateScore,
    ScoreRecord,
    aggregate,
    coverage_rate,
    crps_approx,
    interval_metrics,
    quantile_score,
    score_forecast,
    skill_score,
)
from .ensemble import EnsembleMethod, EnsembleSpec, combine
from .ranking import (
    LeaderboardEntry,
    RankMatrix,
    TiebreakLevel,
    impute_missing,
    overall_ranking,
    rank_cells,
    share_beating_benchmark,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
