"""Canned claim checks run by ``likegame verify`` and the acceptance tests."""

from __future__ import annotations

import time
from dataclasses import dataclass, replace
from typing import Callable, Iterable, Optional

import numpy as np

from likegame import utility
from likegame.engine import replay_states, run_game, step_round
from likegame.model import (
    ActionKind,
    ActionRecord,
    BeliefState,
    GameConfig,
    IllegalActionError,
    InfoMode,
    initial_state,
    legal_actions,
)
from likegame.oracle import (
    Verdict,
    build_normal_form,
    find_pure_nash,
    policy_menu,
    share_menu,
    weak_dominance,
)
from likegame.policies import choose_action
from likegame.scenarios import dominance_instance, random_instance, two_player


@dataclass
class ClaimResult:
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0


# ---------------------------------------------------------------------------
# shared fixtures


def random_states(count: int, seed: int = 0):
    """``count`` (state, player, config) triples from short random-play games."""
    rng = np.random.default_rng(seed)
    out = []
    game = 0
    while len(out) < count:
        n = int(rng.integers(2, 5))
        config = random_instance(seed * 1000 + game, n, int(rng.integers(1, 4)), 4, policy="uniform_mixer")
        config = config.replace(
            allow_new_content=bool(rng.integers(2)),
            info_mode=InfoMode.IMPERFECT if rng.integers(2) else InfoMode.PERFECT,
            discount=float(rng.choice([1.0, 0.9, 0.5])),
        )
        game += 1
        trace = run_game(config)
        for state in list(replay_states(trace, check=False))[1:]:
            for pid in config.player_ids:
                out.append((state, config.player(pid), config))
    return out[:count]


def _timed(name: str, fn: Callable[[], tuple[bool, str]]) -> ClaimResult:
    t0 = time.perf_counter()
    try:
        ok, detail = fn()
    except Exception as exc:  # a crash is a failed claim, reported by name
        ok, detail = False, f"{type(exc).__name__}: {exc}"
    return ClaimResult(name, ok, detail, time.perf_counter() - t0)


# ---------------------------------------------------------------------------
# claims


def endpoint_reduction(n_states: int = 1000, n_gammas: int = 1000, seed: int = 0) -> tuple[bool, str]:
    """gamma=1 gives personal utility, gamma=0 gives social, anything between stays between."""
    samples = random_states(n_states, seed)
    bad = 0
    parts = []
    for state, player, config in samples:
        p = utility.personal_utility(player, state, config)
        s = utility.social_utility(player.id, state.last_round, state.ledger, config)
        parts.append((p, s))
        for g, expect in ((1.0, p), (0.0, s)):
            got = utility.combined_utility(replace(player, gamma=g), state, config).combined
            if got != expect:
                bad += 1
    rng = np.random.default_rng(seed + 1)
    out_of_bounds = 0
    for i, g in enumerate(rng.uniform(0, 1, n_gammas)):
        p, s = parts[i % len(parts)]
        v = utility.mix(float(g), p, s)
        if not min(p, s) <= v <= max(p, s):
            out_of_bounds += 1
    ok = bad == 0 and out_of_bounds == 0
    return ok, f"{len(samples)} states, {bad} endpoint mismatches, {out_of_bounds} bound violations"


def idealist_family(seeds: Iterable[int] = (0, 1)) -> list[GameConfig]:
    out = []
    for n in (1, 2, 3):
        for pool in (1, 2, 3):
            for horizon in (1, 2):
                for seed in seeds:
                    out.append(random_instance(seed * 97 + n * 13 + pool * 5 + horizon, n, pool, horizon))
    return out


def idealist_equilibrium(seeds: Iterable[int] = (0, 1)) -> tuple[bool, str]:
    """All-idealist profile is a pure Nash profile of every small gamma=1 game.

    Each player's menu is every "share item x, then stay silent" script plus
    the idealist policy, which sits last. Checked for the round-0 payoff
    and for the horizon total.
    """
    family = idealist_family(seeds)
    failures = []
    for config in family:
        menus = [share_menu(config, pid) + policy_menu("idealist") for pid in config.player_ids]
        target = tuple(len(m) - 1 for m in menus)
        for reading in ("initial", "total"):
            game = build_normal_form(config, menus, payoff_rounds=reading)
            if target not in find_pure_nash(game):
                failures.append(f"n={config.n_players} seed={config.rng_seed} ({reading})")
    return not failures, f"{len(family)} instances, failures: {failures or 'none'}"


def belief_irrelevance(perturbations: int = 100, seed: int = 0) -> tuple[bool, str]:
    """An idealist's round-0 share does not move with its beliefs."""
    rng = np.random.default_rng(seed)
    changed = 0
    instances = idealist_family((seed,))
    for config in instances:
        state = initial_state(config)
        for pid in config.player_ids:
            player = config.player(pid)
            legal = legal_actions(state, pid, config)
            base = choose_action(player, state, legal, config, np.random.default_rng(0))
            for _ in range(perturbations):
                belief = BeliefState(
                    majority_centroid=tuple(rng.uniform(-1, 1, config.k_dims)),
                    majority_centroid_of_centroid=tuple(rng.uniform(-1, 1, config.k_dims)),
                    gamma_type_beliefs={0: float(rng.uniform()), 1: float(rng.uniform())},
                )
                moved = replace(state, beliefs={**state.beliefs, pid: belief})
                if choose_action(replace(player, belief=belief), moved, legal, config, np.random.default_rng(0)) != base:
                    changed += 1
    return changed == 0, f"{len(instances)} instances x {perturbations} perturbations, {changed} changed choices"


def _qpq_profile_check(config: GameConfig) -> tuple[bool, str]:
    game = build_normal_form(config, [policy_menu("quid_pro_quo", "noop")] * 2)
    mutual = game.payoffs[0, 0]
    dev0 = game.payoffs[1, 0][0]
    dev1 = game.payoffs[0, 1][1]
    ok = mutual[0] > dev0 and mutual[1] > dev1
    return ok, f"mutual {mutual[0]:.4f}/{mutual[1]:.4f}, deviation {dev0:.4f}/{dev1:.4f}"


def quid_pro_quo() -> tuple[bool, str]:
    """Mutual reciprocation beats a unilateral switch to silence; the engine shows Like then Reshare."""
    ok2, d2 = _qpq_profile_check(two_player(horizon=2))
    ok3, d3 = _qpq_profile_check(two_player(horizon=3, allow_new_content=True, pool_size=2))
    trace = run_game(two_player(horizon=2))
    kinds = [sorted(a.kind.value for a in rec.actions) for rec in trace.rounds]
    seq_ok = kinds[1:] == [["like", "like"], ["reshare", "reshare"]]
    return ok2 and ok3 and seq_ok, f"horizon 2: {d2}; horizon 3 cycle: {d3}; sequence {kinds[1:]}"


def weak_dominance_claim() -> tuple[bool, str]:
    """Sharing toward the majority weakly dominates sharing toward one's own taste."""
    config, menus = dominance_instance()
    rel = weak_dominance(build_normal_form(config, menus), 0, 0, 1)
    config_b, menus_b = dominance_instance(blind=True)
    control = weak_dominance(build_normal_form(config_b, menus_b), 0, 0, 1)
    ok = (
        rel.verdict is Verdict.WEAKLY_DOMINATES
        and len(rel.strict_witnesses) >= 1
        and control.verdict is Verdict.INCOMPARABLE
    )
    return ok, (
        f"{rel.verdict.value} ({len(rel.strict_witnesses)} strict witnesses); "
        f"blind control {control.verdict.value}"
    )


def legality(games: int = 20, seed: int = 0) -> tuple[bool, str]:
    """No legal set offers engagement with one's own content or own shares, and the engine rejects it."""
    offending = 0
    for i in range(games):
        config = random_instance(seed + i, 3, 2, 3, policy="uniform_mixer").replace(allow_new_content=True)
        trace = run_game(config)
        for state in list(replay_states(trace))[:-1]:
            for pid in config.player_ids:
                for a in legal_actions(state, pid, config):
                    if a.kind in (ActionKind.LIKE, ActionKind.RESHARE) and (
                        a.source == pid or config.content(a.content).author == pid
                    ):
                        offending += 1
    # a direct self-like must be refused
    config = two_player(horizon=2)
    state = step_round(initial_state(config), {0: ActionRecord(0, 0, ActionKind.SHARE, "ci0"),
                                               1: ActionRecord(0, 1, ActionKind.SHARE, "cj0")}, config)
    refused = False
    try:
        step_round(state, {0: ActionRecord(1, 0, ActionKind.LIKE, "ci0", 0),
                           1: ActionRecord(1, 1, ActionKind.NOOP)}, config)
    except IllegalActionError:
        refused = True
    return offending == 0 and refused, f"{offending} self-engagements offered; direct self-like refused: {refused}"


CLAIMS: dict[str, Callable[[], tuple[bool, str]]] = {
    "endpoint_reduction": endpoint_reduction,
    "idealist_equilibrium": idealist_equilibrium,
    "belief_irrelevance": belief_irrelevance,
    "quid_pro_quo": quid_pro_quo,
    "weak_dominance": weak_dominance_claim,
    "legality": legality,
}


def run_claims(names: Optional[Iterable[str]] = None) -> list[ClaimResult]:
    names = list(CLAIMS) if names is None else list(names)
    return [_timed(n, CLAIMS[n]) for n in names]


def format_table(results: list[ClaimResult]) -> str:
    width = max(len(r.name) for r in results)
    lines = [f"{'claim'.ljust(width)}  result  seconds  detail"]
    for r in results:
        lines.append(f"{r.name.ljust(width)}  {'PASS' if r.passed else 'FAIL'}    {r.seconds:7.2f}  {r.detail}")
    return "\n".join(lines)
