"""Personal, social and combined utility.

Personal utility scores how close the community's shared content sits to a
player's ideal point. Social utility is the discounted accrual of weighted
likes and reshares received, normalised by the largest accrual the rest of
the population could feasibly have produced by the same round.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

from likegame.ledger import EngagementLedger, visibility_probabilities
from likegame.model import GameConfig, GameState, PersonalMode, PlayerSpec


@dataclass(frozen=True)
class UtilityBreakdown:
    personal: float
    social: float
    combined: float
    round: int


def distance(a: Sequence[float], b: Sequence[float]) -> float:
    return math.sqrt(sum((x - y) ** 2 for x, y in zip(a, b)))


def closeness(vector: Sequence[float], ideal: Sequence[float], d_max: float) -> float:
    return 1.0 - distance(vector, ideal) / d_max


def personal_score(ideal, vectors, d_max: float, weights=None) -> float:
    if not vectors:
        raise ValueError("personal utility needs at least one shared content item")
    scores = [closeness(v, ideal, d_max) for v in vectors]
    if weights is None:
        return sum(scores) / len(scores)
    total = sum(weights)
    return sum(w * s for w, s in zip(weights, scores)) / total


def personal_utility(
    player: PlayerSpec,
    state: GameState,
    config: GameConfig,
    mode: Optional[PersonalMode] = None,
) -> float:
    mode = config.personal_mode if mode is None else mode
    shared = state.shared_content()
    if not shared:
        raise ValueError("personal utility needs at least one shared content item")
    vectors = [config.content(cid).vector for cid in shared]
    if mode is PersonalMode.STATIC:
        return personal_score(player.ideal, vectors, config.d_max)
    # experimental: weight each item by its current visibility probability
    engagement = state.ledger.content_engagement(config.like_weight, config.reshare_weight)
    probs = visibility_probabilities(engagement, config.visibility_floor)
    weights = [probs.get(cid, config.visibility_floor) for cid in shared]
    return personal_score(player.ideal, vectors, config.d_max, weights)


def social_gain(player: int, round: int, ledger: EngagementLedger, config: GameConfig) -> float:
    if round < 1:
        return 0.0
    return ledger.received(player, round, config.like_weight, config.reshare_weight)


def accrued_social(player: int, round: int, ledger: EngagementLedger, config: GameConfig) -> float:
    s = 0.0
    for t in range(1, round + 1):
        s = config.discount * s + social_gain(player, t, ledger, config)
    return s


def max_accrual(player: int, round: int, ledger: EngagementLedger, config: GameConfig) -> float:
    """Largest S(round) the other players could have produced for ``player``.

    Each other player may act once per round and may Like and Reshare each
    of ``player``'s (content, sharer) pairs once, from the round after the
    pair appeared, never on content they authored. That is an assignment of
    engagement tokens to rounds, solved exactly per group of players that
    share the same exclusions.
    """
    if round < 1:
        return 0.0
    tokens = []  # (weight, introduced, author)
    for (cid, sharer), rec in ledger.pairs.items():
        if sharer != player or rec.introduced >= round:
            continue
        author = config.content(cid).author
        tokens.append((config.like_weight, rec.introduced, author))
        tokens.append((config.reshare_weight, rec.introduced, author))
    if not tokens:
        return 0.0

    groups: dict[tuple[int, ...], int] = {}
    for j in config.player_ids:
        if j == player:
            continue
        usable = tuple(i for i, (_, _, author) in enumerate(tokens) if author != j)
        groups[usable] = groups.get(usable, 0) + 1

    rounds = np.arange(1, round + 1)
    decay = config.discount ** (round - rounds).astype(float)
    total = 0.0
    for usable, count in groups.items():
        if not usable:
            continue
        w = np.array([tokens[i][0] for i in usable])
        intro = np.array([tokens[i][1] for i in usable])
        value = np.where(rounds[None, :] > intro[:, None], w[:, None] * decay[None, :], 0.0)
        rows, cols = linear_sum_assignment(value, maximize=True)
        total += count * float(value[rows, cols].sum())
    return total


def social_utility(player: int, round: int, ledger: EngagementLedger, config: GameConfig) -> float:
    top = max_accrual(player, round, ledger, config)
    if top <= 0.0:
        return 0.0
    return accrued_social(player, round, ledger, config) / top


def mix(gamma: float, personal: float, social: float) -> float:
    value = gamma * personal + (1.0 - gamma) * social
    # guard the convex-combination bounds against one-ulp rounding
    return min(max(value, min(personal, social)), max(personal, social))


def combined_utility(
    player: PlayerSpec,
    state: GameState,
    config: GameConfig,
    round: Optional[int] = None,
) -> UtilityBreakdown:
    r = state.last_round if round is None else round
    personal = personal_utility(player, state, config)
    social = social_utility(player.id, r, state.ledger, config)
    return UtilityBreakdown(personal, social, mix(player.gamma, personal, social), r)
