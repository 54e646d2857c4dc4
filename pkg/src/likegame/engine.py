"""Round-by-round execution of the repeated game.

Random stream consumption order, per run (one ``numpy`` PCG64 stream seeded
with the run seed):

1. cheap talk (currently draws nothing; displays are deterministic);
2. round 0: policy draws in player-id order;
3. each round r >= 1: visibility draws in player-id order, one uniform per
   candidate pair in (content id, sharer id) order, skipped for pairs whose
   probability is 1; then policy draws in player-id order.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Mapping, Optional

import numpy as np

from likegame.ledger import EngagementLedger, visibility_probabilities
from likegame.model import (
    ActionRecord,
    BeliefState,
    GameConfig,
    GameState,
    IllegalActionError,
    InfoMode,
    Pair,
    ValidationReport,
    initial_state,
    legal_actions,
    perfect_visible_sets,
    validate_config,
)
from likegame.policies import choose_action, display_item
from likegame.utility import UtilityBreakdown, combined_utility


class ConfigError(ValueError):
    def __init__(self, report: ValidationReport):
        self.report = report
        super().__init__("; ".join(v.message for v in report.fatal))


@dataclass(frozen=True)
class VisibilityModel:
    mode: InfoMode = InfoMode.PERFECT
    floor: float = 1.0

    @classmethod
    def from_config(cls, config: GameConfig) -> "VisibilityModel":
        return cls(config.info_mode, config.visibility_floor)


@dataclass
class RoundRecord:
    round: int
    actions: tuple[ActionRecord, ...]
    visible: dict[int, tuple[Pair, ...]]
    utilities: dict[int, UtilityBreakdown]
    notes: tuple[str, ...] = ()


@dataclass
class RunTrace:
    config: GameConfig
    seed: int
    beliefs: dict[int, BeliefState]
    displays: Optional[dict[int, str]] = None
    rounds: list[RoundRecord] = field(default_factory=list)
    metrics: Optional[object] = None  # MetricsBlock
    ledger: Optional[EngagementLedger] = None  # as maintained during the run; not serialized

    def history(self, up_to: Optional[int] = None) -> list[ActionRecord]:
        return [
            a for rec in self.rounds for a in rec.actions
            if up_to is None or a.round <= up_to
        ]

    def total_utility(self, player: int) -> float:
        return sum(rec.utilities[player].combined for rec in self.rounds)


# ---------------------------------------------------------------------------


def _mean(vectors):
    k = len(vectors[0])
    return tuple(sum(v[i] for v in vectors) / len(vectors) for i in range(k))


def cheap_talk(config: GameConfig, rng: Optional[np.random.Generator] = None) -> dict[int, BeliefState]:
    """Beliefs formed from one public display per player.

    Each player's level-1 estimate is the mean display of everybody else;
    the level-2 estimate is the mean of all players' level-1 estimates.
    """
    displays = {p.id: display_item(p, config).vector for p in config.players}
    ids = config.player_ids
    level1: dict[int, Optional[tuple]] = {}
    for pid in ids:
        others = [displays[q] for q in ids if q != pid]
        level1[pid] = _mean(others) if others else None
    known = [v for v in level1.values() if v is not None]
    level2 = _mean(known) if known else None
    return {
        p.id: BeliefState(
            majority_centroid=level1[p.id],
            majority_centroid_of_centroid=level2 if level1[p.id] is not None else None,
            gamma_type_beliefs=p.belief.gamma_type_beliefs,
        )
        for p in config.players
    }


def sample_visibility(
    state: GameState,
    model: VisibilityModel,
    rng: np.random.Generator,
    config: GameConfig,
) -> dict[int, frozenset[Pair]]:
    if state.round < 1:
        raise ValueError("visibility is only sampled from round 1 on")
    perfect = perfect_visible_sets(state.ledger, config, state.round)
    if model.mode is InfoMode.PERFECT:
        return perfect
    engagement = state.ledger.content_engagement(config.like_weight, config.reshare_weight, state.round)
    probs = visibility_probabilities(engagement, model.floor)
    out = {}
    for pid in config.player_ids:
        seen = []
        for pair in sorted(perfect[pid]):
            p = probs[pair[0]]
            if p >= 1.0 or rng.random() < p:
                seen.append(pair)
        out[pid] = frozenset(seen)
    return out


def step_round(
    state: GameState,
    chosen: Mapping[int, ActionRecord],
    config: GameConfig,
    check: bool = True,
) -> GameState:
    """Apply one round of simultaneous moves and advance the round counter."""
    actions = sorted(chosen.values(), key=ActionRecord.sort_key)
    if check:
        for a in actions:
            if a.round != state.round:
                raise IllegalActionError(a, f"expected round {state.round}")
            if a not in legal_actions(state, a.actor, config):
                raise IllegalActionError(a)
    ledger = state.ledger.copy()
    ledger.apply_round(actions, {a.actor: config.player(a.actor).audience_multiplier for a in actions})
    nxt = state.round + 1
    return GameState(
        round=nxt,
        history=state.history + tuple(actions),
        ledger=ledger,
        visible_sets=perfect_visible_sets(ledger, config, nxt),
        beliefs=state.beliefs,
    )


def run_game(config: GameConfig, seed: Optional[int] = None) -> RunTrace:
    report = validate_config(config)
    if not report.ok:
        raise ConfigError(report)
    seed = config.rng_seed if seed is None else int(seed)
    rng = np.random.default_rng(seed)
    model = VisibilityModel.from_config(config)

    if config.cheap_talk:
        beliefs = cheap_talk(config, rng)
        displays = {p.id: display_item(p, config).id for p in config.players}
    else:
        beliefs = {p.id: p.belief for p in config.players}
        displays = None
    trace = RunTrace(config=config, seed=seed, beliefs=beliefs, displays=displays)
    state = initial_state(config, beliefs)

    for r in range(config.horizon + 1):
        if r >= 1:
            state = replace(state, visible_sets=sample_visibility(state, model, rng, config))
        notes: list[str] = []
        chosen = {}
        for pid in config.player_ids:
            player = config.player(pid)
            legal = legal_actions(state, pid, config)
            action = choose_action(player, state, legal, config, rng, notes)
            if action not in legal:
                raise IllegalActionError(action, f"returned by policy {player.policy.label()}")
            chosen[pid] = action
        visible = {pid: tuple(sorted(state.visible_sets[pid])) for pid in config.player_ids}
        state = step_round(state, chosen, config, check=False)
        utilities = {
            pid: combined_utility(config.player(pid), state, config, round=r)
            for pid in config.player_ids
        }
        trace.rounds.append(
            RoundRecord(r, tuple(sorted(chosen.values(), key=ActionRecord.sort_key)), visible, utilities, tuple(notes))
        )

    from likegame.metrics import compute_metrics

    trace.ledger = state.ledger
    trace.metrics = compute_metrics(trace)
    return trace


def replay_states(trace: RunTrace, check: bool = True):
    """Re-apply a trace round by round using its recorded visible sets.

    Yields the state each round was played from; with ``check`` every
    recorded action must be in the legal set of that state.
    """
    config = trace.config
    state = initial_state(config, trace.beliefs)
    for rec in trace.rounds:
        if rec.round != state.round:
            raise ValueError(f"trace skips from round {state.round} to {rec.round}")
        visible = {pid: frozenset(rec.visible.get(pid, ())) for pid in config.player_ids}
        state = replace(state, visible_sets=visible)
        yield state
        state = step_round(state, {a.actor: a for a in rec.actions}, config, check=check)
    yield state


def replay(trace: RunTrace, check: bool = True) -> GameState:
    """Final state after replaying ``trace``."""
    state = None
    for state in replay_states(trace, check):
        pass
    return state
