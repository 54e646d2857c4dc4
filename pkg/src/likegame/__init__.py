"""Repeated content-sharing game: simulator, exact small-game oracle and metrics."""

from likegame.engine import RunTrace, cheap_talk, run_game, sample_visibility, step_round
from likegame.model import (
    ActionKind,
    ActionRecord,
    BeliefState,
    ContentItem,
    GameConfig,
    GameState,
    InfoMode,
    PersonalMode,
    PlayerSpec,
    PolicySpec,
    legal_actions,
    validate_config,
)
from likegame.utility import combined_utility, personal_utility, social_gain, social_utility

__all__ = [
    "ActionKind",
    "ActionRecord",
    "BeliefState",
    "ContentItem",
    "GameConfig",
    "GameState",
    "InfoMode",
    "PersonalMode",
    "PlayerSpec",
    "PolicySpec",
    "RunTrace",
    "cheap_talk",
    "combined_utility",
    "legal_actions",
    "personal_utility",
    "run_game",
    "sample_visibility",
    "social_gain",
    "social_utility",
    "step_round",
    "validate_config",
]
