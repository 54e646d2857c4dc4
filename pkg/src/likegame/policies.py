"""Strategy library.

Every policy maps (player, state, legal actions, config, rng) to one element
of the legal set. Ties are broken by lowest content id, then lowest source id.
"""

from __future__ import annotations

from typing import Optional, Sequence

import numpy as np

from likegame.model import (
    ActionKind,
    ActionRecord,
    BeliefState,
    ContentItem,
    GameConfig,
    GameState,
    PersonalMode,
    PlayerSpec,
    history_key,
)
from likegame.utility import distance, mix, personal_utility, social_utility

STOCHASTIC_POLICIES = frozenset({"uniform_mixer"})

# policies whose cheap-talk display is their own taste rather than the salient type
IDEAL_DISPLAY_POLICIES = frozenset({"idealist", "influencer_reposter", "noop", "reactor", "open_loop", "contingent"})


def closest_item(items: Sequence[ContentItem], point) -> ContentItem:
    return min(items, key=lambda c: (distance(c.vector, point), c.id))


def _closest_action(actions: Sequence[ActionRecord], point, config: GameConfig) -> ActionRecord:
    return min(
        actions,
        key=lambda a: (distance(config.content(a.content).vector, point), a.content, a.source),
    )


def _of_kind(legal: Sequence[ActionRecord], kind: ActionKind) -> list[ActionRecord]:
    return [a for a in legal if a.kind is kind]


def _noop_in(legal: Sequence[ActionRecord]) -> ActionRecord:
    for a in legal:
        if a.kind is ActionKind.NOOP:
            return a
    raise ValueError("legal set has no Noop")


def _share_closest(legal: Sequence[ActionRecord], point, config: GameConfig) -> ActionRecord:
    shares = _of_kind(legal, ActionKind.SHARE)
    return _closest_action(shares, point, config)


def display_item(player: PlayerSpec, config: GameConfig) -> ContentItem:
    """Pool item a player shows during cheap talk."""
    pool = config.pool(player.id)
    if player.policy.name == "level_k" and player.policy.params.get("depth", 0) == 0:
        return closest_item(pool, player.ideal)
    if player.policy.name in IDEAL_DISPLAY_POLICIES or config.salient_type is None:
        return closest_item(pool, player.ideal)
    return closest_item(pool, config.type_centroids[config.salient_type])


# ---------------------------------------------------------------------------


def idealist_choice(player: PlayerSpec, state: GameState, legal, config: GameConfig) -> ActionRecord:
    if state.round == 0:
        return _share_closest(legal, player.ideal, config)
    social = social_utility(player.id, state.last_round, state.ledger, config)
    noop = _noop_in(legal)
    base = mix(player.gamma, personal_utility(player, state, config), social)
    best, best_value = noop, base
    static = config.personal_mode is PersonalMode.STATIC
    for a in legal:
        if a.kind is ActionKind.NOOP or (static and a.kind is not ActionKind.SHARE):
            continue
        value = mix(player.gamma, personal_utility(player, _after(state, a, config), config), social)
        if value > best_value + 1e-12:
            best, best_value = a, value
    return best


def _after(state: GameState, action: ActionRecord, config: GameConfig) -> GameState:
    """State with ``action`` applied alone; used for one-step look-ahead."""
    from dataclasses import replace

    ledger = state.ledger.copy()
    ledger.apply_round([action], {action.actor: config.player(action.actor).audience_multiplier})
    return replace(state, history=state.history + (action,), ledger=ledger)


def _engagers(state: GameState, player: int, r: int, config: GameConfig) -> dict[int, float]:
    out: dict[int, float] = {}
    for a in state.history:
        if a.round == r and a.source == player and a.kind in (ActionKind.LIKE, ActionKind.RESHARE):
            out[a.actor] = out.get(a.actor, 0.0) + config.weight(a.kind)
    return out


def _engage_partner(me: int, partner: int, state: GameState, legal, kinds) -> Optional[ActionRecord]:
    """Cheapest unplayed action on the partner's most recent content."""
    theirs = [
        (rec.introduced, cid)
        for (cid, sharer), rec in state.ledger.pairs.items()
        if sharer == partner
    ]
    theirs.sort(key=lambda t: (-t[0], t[1]))
    legal_set = set(legal)
    for _, cid in theirs:
        for kind in kinds:
            cand = ActionRecord(state.round, me, kind, cid, partner)
            if cand in legal_set:
                return cand
    return None


def _burned(state: GameState, player: int) -> set[int]:
    """Partners that left one of our engagements unanswered for two rounds."""
    out = set()
    last = state.round - 1
    for a in state.history:
        if a.actor != player or a.kind not in (ActionKind.LIKE, ActionKind.RESHARE):
            continue
        t = a.round
        if t + 1 > last:
            continue
        answered = any(
            b.actor == a.source and b.source == player and b.round in (t, t + 1)
            and b.kind in (ActionKind.LIKE, ActionKind.RESHARE)
            for b in state.history
        )
        if not answered:
            out.add(a.source)
    return out


def quid_pro_quo_choice(player: PlayerSpec, state: GameState, legal, config: GameConfig) -> ActionRecord:
    """Reciprocate engagement, retaliate against silence.

    Opens by liking a partner's latest content, answers the largest engager
    of the previous round with the cheapest action not yet played on their
    latest content, and otherwise stays silent. With new content allowed, a
    fresh item is introduced every third round.
    """
    r = state.round
    if r == 0:
        return _share_closest(legal, player.ideal, config)
    noop = _noop_in(legal)
    grim = bool(player.policy.params.get("grim", False))
    kinds = (ActionKind.LIKE, ActionKind.RESHARE)

    if config.allow_new_content and r % 3 == 0:
        shares = _of_kind(legal, ActionKind.SHARE)
        if shares:
            return _closest_action(shares, player.ideal, config)

    opening = r == 1 or (config.allow_new_content and r % 3 == 1)
    engagers = _engagers(state, player.id, r - 1, config)
    burned = _burned(state, player.id) if grim else set()
    for pid in burned:
        engagers.pop(pid, None)
    if engagers:
        partner = min(engagers, key=lambda pid: (-engagers[pid], pid))
        return _engage_partner(player.id, partner, state, legal, kinds) or noop
    if opening:
        for partner in config.player_ids:
            if partner == player.id or partner in burned:
                continue
            move = _engage_partner(player.id, partner, state, legal, (ActionKind.LIKE,))
            if move is not None:
                return move
    return noop


def uniform_mixer_choice(player: PlayerSpec, state: GameState, legal, rng: np.random.Generator) -> ActionRecord:
    return legal[int(rng.integers(len(legal)))]


def level_k_target(player: PlayerSpec, beliefs: BeliefState, depth: int, notes: Optional[list] = None):
    """Point the reasoner aims at, falling back one level when a belief is missing."""
    while depth > 0:
        est = beliefs.majority_centroid if depth == 1 else beliefs.majority_centroid_of_centroid
        if est is not None:
            return depth, est
        if notes is not None:
            notes.append(f"player {player.id}: level-{depth} estimate absent, falling back to level {depth - 1}")
        depth -= 1
    return 0, player.ideal


def level_k_choice(
    player: PlayerSpec,
    state: GameState,
    beliefs: BeliefState,
    legal,
    config: GameConfig,
    depth: int,
    notes: Optional[list] = None,
) -> ActionRecord:
    depth, target = level_k_target(player, beliefs, depth, notes)
    if depth == 0:
        return idealist_choice(player, state, legal, config)
    if state.round == 0:
        return _share_closest(legal, target, config)
    for kind in (ActionKind.RESHARE, ActionKind.LIKE):
        options = _of_kind(legal, kind)
        if options:
            return _closest_action(options, target, config)
    return _noop_in(legal)


def influencer_seeker_choice(player: PlayerSpec, state: GameState, legal, config: GameConfig, target: int) -> ActionRecord:
    influencer = config.player(target)
    if state.round == 0:
        return _share_closest(legal, influencer.ideal, config)
    for kind in (ActionKind.LIKE, ActionKind.RESHARE):
        options = [
            a for a in legal
            if a.kind is kind and (a.source == target or config.content(a.content).author == target)
        ]
        if options:
            return min(options, key=lambda a: (a.source != target, a.content, a.source))
    return _noop_in(legal)


def influencer_reposter_choice(player: PlayerSpec, state: GameState, legal, config: GameConfig, radius: float) -> ActionRecord:
    if state.round == 0:
        return _share_closest(legal, player.ideal, config)
    near = [
        a for a in _of_kind(legal, ActionKind.RESHARE)
        if distance(config.content(a.content).vector, player.ideal) <= radius
    ]
    if near:
        return _closest_action(near, player.ideal, config)
    return _noop_in(legal)


def reactor_choice(player: PlayerSpec, state: GameState, legal, config: GameConfig, radius: Optional[float]) -> ActionRecord:
    """Like-only responder: likes content near its ideal, or anything when ``radius`` is None."""
    if state.round == 0:
        return _share_closest(legal, player.ideal, config)
    likes = _of_kind(legal, ActionKind.LIKE)
    if radius is None:
        return likes[0] if likes else _noop_in(legal)
    near = [a for a in likes if distance(config.content(a.content).vector, player.ideal) <= radius]
    if near:
        return _closest_action(near, player.ideal, config)
    return _noop_in(legal)


def open_loop_choice(player: PlayerSpec, state: GameState, legal, config: GameConfig) -> ActionRecord:
    """Fixed action script; rounds past the end of the script are Noop.

    The scripted move is returned even when it is not legal, so that the
    engine reports the broken sequence.
    """
    script = player.policy.params.get("actions", ())
    r = state.round
    if r >= len(script):
        return ActionRecord(r, player.id, ActionKind.NOOP)
    step = script[r]
    return ActionRecord(r, player.id, ActionKind(step["kind"]), step.get("content"), step.get("source"))


def contingent_choice(player: PlayerSpec, state: GameState) -> ActionRecord:
    """Look the move up in a plan keyed by the full history so far."""
    key = history_key(state.history)
    step = player.policy.params["plan"].get(key)
    if step is None:
        raise ValueError(f"player {player.id}: plan has no move for history {key!r}")
    return ActionRecord(state.round, player.id, ActionKind(step["kind"]), step.get("content"), step.get("source"))


def choose_action(
    player: PlayerSpec,
    state: GameState,
    legal,
    config: GameConfig,
    rng: np.random.Generator,
    notes: Optional[list] = None,
) -> ActionRecord:
    name, params = player.policy.name, player.policy.params
    if name == "idealist":
        return idealist_choice(player, state, legal, config)
    if name == "quid_pro_quo":
        return quid_pro_quo_choice(player, state, legal, config)
    if name == "uniform_mixer":
        return uniform_mixer_choice(player, state, legal, rng)
    if name == "level_k":
        beliefs = state.beliefs.get(player.id, player.belief)
        return level_k_choice(player, state, beliefs, legal, config, int(params.get("depth", 0)), notes)
    if name == "influencer_seeker":
        return influencer_seeker_choice(player, state, legal, config, params["target"])
    if name == "influencer_reposter":
        return influencer_reposter_choice(player, state, legal, config, float(params.get("radius", 0.0)))
    if name == "reactor":
        return reactor_choice(player, state, legal, config, params.get("radius"))
    if name == "noop":
        if state.round == 0:
            return _share_closest(legal, player.ideal, config)
        return _noop_in(legal)
    if name == "open_loop":
        return open_loop_choice(player, state, legal, config)
    if name == "contingent":
        return contingent_choice(player, state)
    raise ValueError(f"unknown policy {name!r}")
