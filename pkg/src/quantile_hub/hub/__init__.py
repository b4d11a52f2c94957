"""Challenge orchestration: file store, round lifecycle, CLI and JSON API."""

from .pipeline import Hub, IngestSummary, ScoreSummary
from .state import ChallengeConfig, Store, StoreError, parse_config_text

__all__ = [
    "ChallengeConfig",
    "Hub",
    "IngestSummary",
    "ScoreSummary",
    "Store",
    "StoreError",
    "parse_config_text",
]
