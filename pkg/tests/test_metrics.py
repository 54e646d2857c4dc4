import math

import pytest

from likegame.engine import RoundRecord, RunTrace, run_game
from likegame.io import trace_from_lines, trace_lines
from likegame.metrics import (
    ContentTyping,
    amplification_curve,
    compute_metrics,
    engagement_concentration,
    entropy,
    exposure_alignment,
    false_consensus_index,
    ideal_mass,
    mean_alignment,
)
from likegame.model import ActionKind, ActionRecord, ContentItem, GameConfig, PlayerSpec
from likegame.scenarios import QUADRANTS, two_player

A = ActionRecord
K = ActionKind


def fake_trace(ideals, items, rounds, visible=None):
    """Trace with hand-written actions; ``items`` maps content id -> (author, vector)."""
    players = tuple(PlayerSpec(i, 0.0, v) for i, v in enumerate(ideals))
    pools = {i: tuple(ContentItem(cid, vec, i) for cid, (a, vec) in items.items() if a == i) for i in range(len(ideals))}
    config = GameConfig(len(ideals), 2, len(rounds) - 1, players, pools, type_centroids=QUADRANTS)
    trace = RunTrace(config, 0, {})
    for r, acts in enumerate(rounds):
        vis = (visible or {}).get(r, {})
        trace.rounds.append(RoundRecord(r, tuple(acts), {i: tuple(vis.get(i, ())) for i in range(len(ideals))}, {}))
    return trace


TYPING = ContentTyping(QUADRANTS)


def test_typing_assigns_nearest_and_breaks_ties_low():
    assert TYPING.assign((0.5, 0.7)) == 0
    assert TYPING.assign((-0.5, -0.7)) == 2
    assert TYPING.assign((0.0, 0.0)) == 0


def test_fci_zero_when_reshares_mirror_ideals():
    ideals = [(0.6, 0.6), (-0.6, 0.6)]
    items = {"a": (0, (0.6, 0.5)), "b": (1, (-0.6, 0.5))}
    rounds = [
        [A(0, 0, K.SHARE, "a"), A(0, 1, K.SHARE, "b")],
        [A(1, 0, K.RESHARE, "b", 1), A(1, 1, K.RESHARE, "a", 0)],
    ]
    trace = fake_trace(ideals, items, rounds)
    assert [false_consensus_index(trace, TYPING, t, 1) for t in range(4)] == [0.0] * 4


def test_fci_one_when_all_reshares_hit_an_absent_type():
    ideals = [(-0.6, -0.6), (-0.6, 0.6)]
    items = {"a": (0, (0.6, 0.6)), "b": (1, (0.5, 0.6))}
    rounds = [
        [A(0, 0, K.SHARE, "a"), A(0, 1, K.SHARE, "b")],
        [A(1, 0, K.RESHARE, "b", 1), A(1, 1, K.RESHARE, "a", 0)],
    ]
    trace = fake_trace(ideals, items, rounds)
    assert false_consensus_index(trace, TYPING, 0, 1) == 1.0
    assert false_consensus_index(trace, TYPING, 0, 0) == 0.0  # nothing reshared yet
    with pytest.raises(ValueError):
        false_consensus_index(trace, TYPING, 9, 1)


def test_fci_sums_to_zero_and_ideal_mass_constant(salient_trace):
    block = salient_trace.metrics
    for r in block.rounds:
        assert sum(block.fci[r]) == pytest.approx(0.0, abs=1e-12)
    masses = [ideal_mass(salient_trace.config, TYPING, t) for t in range(4)]
    assert sum(masses) == pytest.approx(1.0)


def test_salient_fci_rises(salient_trace):
    series = [salient_trace.metrics.fci[r][0] for r in range(1, 11)]
    assert all(b > a for a, b in zip(series, series[1:]))
    assert series[-1] > 0


def test_entropy_endpoints():
    items = {f"c{i}": (i, (0.1 * i, 0.0)) for i in range(3)}
    ideals = [(0.0, 0.0)] * 4
    items["d"] = (3, (0.0, 0.1))
    rounds = [
        [A(0, i, K.SHARE, c) for i, c in enumerate(["c0", "c1", "c2", "d"])],
        [A(1, 3, K.LIKE, "c0", 0), A(1, 0, K.LIKE, "c1", 1), A(1, 1, K.LIKE, "c2", 2)],
    ]
    trace = fake_trace(ideals, items, rounds)
    assert engagement_concentration(trace, 1) == pytest.approx(math.log(3))
    one = fake_trace(ideals, items, [rounds[0], [A(1, 3, K.LIKE, "c0", 0), A(1, 1, K.RESHARE, "c0", 0)]])
    assert engagement_concentration(one, 1) == 0.0
    assert entropy([]) == 0.0
    with pytest.raises(ValueError):
        engagement_concentration(trace, 5)


def test_alignment_cases():
    ideals = [(0.0, 0.0), (0.9, 0.9)]
    items = {"a": (0, (0.0, 0.0)), "b": (1, (0.1, 0.0))}
    rounds = [[A(0, 0, K.SHARE, "a"), A(0, 1, K.SHARE, "b")], [A(1, 0, K.NOOP), A(1, 1, K.NOOP)]]
    trace = fake_trace(ideals, items, rounds, visible={1: {0: [("b", 1)], 1: []}})
    assert exposure_alignment(trace, 0, 1) == 1.0
    assert exposure_alignment(trace, 1, 1) == 0.0
    block = compute_metrics(trace)
    assert block.visible_count[1] == {0: 1, 1: 0}
    far = fake_trace(ideals, items, rounds, visible={1: {0: [("b", 1)], 1: [("a", 0)]}})
    assert exposure_alignment(far, 1, 1, radius=1.0) == 1.0
    assert exposure_alignment(far, 1, 1) == 0.0


def test_echo_chamber_alignment_grows(salient_trace):
    block = salient_trace.metrics
    assert mean_alignment(block, 10) > mean_alignment(block, 1)


def test_amplification_cases():
    ideals = [(0.0, 0.0), (0.5, 0.5)]
    items = {"a": (0, (0.0, 0.0)), "b": (1, (0.5, 0.5))}
    rounds = [
        [A(0, 0, K.SHARE, "a"), A(0, 1, K.SHARE, "b")],
        [A(1, 0, K.NOOP), A(1, 1, K.LIKE, "a", 0)],
        [A(2, 0, K.NOOP), A(2, 1, K.NOOP)],
    ]
    trace = fake_trace(ideals, items, rounds)
    assert amplification_curve(trace, "a") == [(0, 0.0), (1, 1.0), (2, 1.0)]
    assert [v for _, v in amplification_curve(trace, "b")] == [0.0, 0.0, 0.0]
    with pytest.raises(KeyError):
        amplification_curve(trace, "zzz")


def test_amplification_non_decreasing(salient_trace):
    for series in salient_trace.metrics.amplification.values():
        assert all(b >= a for a, b in zip(series, series[1:]))


def test_boosted_run_concentrates_and_dominates_after_boost(influencer_pair):
    boosted, control = influencer_pair
    last = boosted.metrics.rounds[-1]
    assert boosted.metrics.engagement_entropy[last] <= control.metrics.engagement_entropy[last]
    boost_round = min(a.round for a in boosted.history() if a.actor == 1 and a.kind is K.RESHARE and a.content == "seek_0")
    b = boosted.metrics.amplification["seek_0"]
    c = control.metrics.amplification["seek_0"]
    assert all(x >= y for x, y in zip(b[boost_round:], c[boost_round:]))


def test_metrics_recompute_from_serialized_trace(salient_trace):
    again = trace_from_lines(list(trace_lines(salient_trace)))
    assert again.metrics == salient_trace.metrics
    assert compute_metrics(salient_trace) == salient_trace.metrics


def test_alignment_in_perfect_mode_uses_full_catalogue():
    trace = run_game(two_player(horizon=1))
    assert exposure_alignment(trace, 0, 1) == 1.0  # cj0 sits 0.4*sqrt(2)/d_max = 0.2 from player 0's ideal
