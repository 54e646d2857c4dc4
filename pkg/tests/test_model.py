from dataclasses import replace

import pytest

from likegame.engine import replay_states, run_game, step_round
from likegame.model import (
    ActionKind,
    ActionRecord,
    BeliefState,
    ContentItem,
    IllegalActionError,
    InfoMode,
    PolicySpec,
    initial_state,
    is_legal,
    legal_actions,
    noop,
    validate_config,
)
from likegame.scenarios import random_instance, two_player


def shared(config):
    return step_round(
        initial_state(config),
        {0: ActionRecord(0, 0, ActionKind.SHARE, "ci0"), 1: ActionRecord(0, 1, ActionKind.SHARE, "cj0")},
        config,
    )


# --- validation


def test_reference_config_is_clean():
    assert len(validate_config(two_player())) == 0


def test_gamma_out_of_range():
    config = two_player()
    bad = config.with_player(replace(config.player(0), gamma=1.2))
    rep = validate_config(bad)
    assert not rep.ok
    assert any("gamma out of [0,1]" in m for m in rep.messages())


def test_degenerate_weights():
    rep = validate_config(two_player().replace(like_weight=0.0, reshare_weight=0.0))
    assert any("degenerate engagement weights" in v.message for v in rep.fatal)


@pytest.mark.parametrize(
    "change, fragment",
    [
        (dict(n_players=0), "n_players must be positive"),
        (dict(n_players=3), "does not match n_players"),
        (dict(horizon=0), "horizon"),
        (dict(discount=1.5), "discount"),
        (dict(info_mode=InfoMode.IMPERFECT, visibility_floor=0.0), "visibility_floor"),
        (dict(salient_type=2), "salient_type"),
    ],
)
def test_config_level_violations(change, fragment):
    rep = validate_config(two_player().replace(**change))
    assert any(fragment in m for m in rep.messages())


def test_content_and_player_violations():
    config = two_player()
    pools = dict(config.initial_content_pool)
    pools[0] = (ContentItem("ci0", (1.5, 0.0), 0),)
    pools[1] = (ContentItem("ci0", (0.0, 0.0), 1, round_introduced=2),)
    rep = validate_config(config.replace(initial_content_pool=pools))
    msgs = " | ".join(rep.messages())
    assert "out of [-1,1]" in msgs
    assert "not unique" in msgs
    assert "round_introduced" in msgs

    p = replace(config.player(0), audience_multiplier=0.5, belief=BeliefState(None, (0.0, 0.0)))
    msgs = " | ".join(validate_config(config.with_player(p)).messages())
    assert "audience_multiplier" in msgs
    assert "level-2 estimate present without level-1" in msgs


def test_perfect_mode_ignores_floor():
    assert validate_config(two_player().replace(visibility_floor=0.0)).ok


def test_unknown_policy_and_seeker_warning():
    config = two_player()
    rep = validate_config(config.with_player(replace(config.player(0), policy=PolicySpec("bogus"))))
    assert not rep.ok
    seek = replace(config.player(0), policy=PolicySpec("influencer_seeker", {"target": 1}))
    rep = validate_config(config.with_player(seek))
    assert rep.ok and len(rep) == 1  # warning only


# --- legal actions


def test_round_zero_offers_only_shares():
    config = two_player()
    legal = legal_actions(initial_state(config), 0, config)
    assert legal == [ActionRecord(0, 0, ActionKind.SHARE, "ci0")]


def test_round_one_two_player_set():
    config = two_player()
    state = shared(config)
    assert set(legal_actions(state, 0, config)) == {
        noop(1, 0),
        ActionRecord(1, 0, ActionKind.LIKE, "cj0", 1),
        ActionRecord(1, 0, ActionKind.RESHARE, "cj0", 1),
    }


def test_used_kind_is_removed():
    config = two_player()
    state = shared(config)
    state = step_round(state, {0: ActionRecord(1, 0, ActionKind.LIKE, "cj0", 1), 1: noop(1, 1)}, config)
    legal = legal_actions(state, 0, config)
    assert ActionRecord(2, 0, ActionKind.LIKE, "cj0", 1) not in legal
    assert ActionRecord(2, 0, ActionKind.RESHARE, "cj0", 1) in legal


def test_reshared_copy_of_own_content_is_not_engageable():
    config = two_player(horizon=3)
    state = shared(config)
    state = step_round(state, {0: noop(1, 0), 1: ActionRecord(1, 1, ActionKind.RESHARE, "ci0", 0)}, config)
    legal = legal_actions(state, 0, config)
    # (ci0, 1) is a copy of player 0's own item
    assert all(a.content != "ci0" for a in legal)


def test_unknown_player_and_horizon():
    config = two_player(horizon=1)
    with pytest.raises(KeyError):
        legal_actions(initial_state(config), 9, config)
    state = shared(config)
    state = step_round(state, {0: noop(1, 0), 1: noop(1, 1)}, config)
    with pytest.raises(ValueError):
        legal_actions(state, 0, config)


def test_new_content_shares_appear_only_when_allowed():
    config = two_player(pool_size=2, allow_new_content=True, horizon=2)
    state = shared(config)
    kinds = {a.kind for a in legal_actions(state, 0, config)}
    assert ActionKind.SHARE in kinds
    off = two_player(pool_size=2, horizon=2)
    state = step_round(
        initial_state(off),
        {0: ActionRecord(0, 0, ActionKind.SHARE, "ci0"), 1: ActionRecord(0, 1, ActionKind.SHARE, "cj0")},
        off,
    )
    assert ActionKind.SHARE not in {a.kind for a in legal_actions(state, 0, off)}


def test_is_legal_and_step_round_rejection():
    config = two_player()
    state = shared(config)
    bad = ActionRecord(1, 0, ActionKind.LIKE, "ci0", 0)
    assert not is_legal(bad, state, config)
    assert not is_legal(ActionRecord(5, 0, ActionKind.NOOP), state, config)
    with pytest.raises(IllegalActionError):
        step_round(state, {0: bad, 1: noop(1, 1)}, config)


def test_perfect_mode_legal_sets_cover_all_prior_pairs():
    config = random_instance(3, 3, 2, 3, policy="uniform_mixer").replace(allow_new_content=True)
    trace = run_game(config)
    for state in list(replay_states(trace))[1:-1]:
        for pid in config.player_ids:
            engageable = {
                (a.content, a.source) for a in legal_actions(state, pid, config)
                if a.kind in (ActionKind.LIKE, ActionKind.RESHARE)
            }
            done = {(a.kind, a.content, a.source) for a in state.history if a.actor == pid}
            for (cid, sharer), rec in state.ledger.pairs.items():
                if rec.introduced >= state.round or sharer == pid or config.content(cid).author == pid:
                    continue
                exhausted = all((k, cid, sharer) in done for k in (ActionKind.LIKE, ActionKind.RESHARE))
                assert ((cid, sharer) in engageable) != exhausted


def test_action_record_order_and_describe():
    a = ActionRecord(1, 0, ActionKind.RESHARE, "c", 1)
    b = ActionRecord(1, 0, ActionKind.LIKE, "c", 1)
    assert sorted([a, b], key=ActionRecord.sort_key) == [b, a]
    assert a.describe() == "Reshare(c, 1)"
    assert noop(2, 0).describe() == "Noop"
    assert a.at_round(3).round == 3
