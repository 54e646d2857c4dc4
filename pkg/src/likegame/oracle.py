"""Exact solver for small instances.

Every strategy profile of a finite menu game is evaluated by a deterministic
Perfect-information engine run; best responses, pure Nash profiles and
weak dominance are then read off the payoff tensor. Equilibria are always
relative to the supplied menus.
"""

from __future__ import annotations

import itertools
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Optional, Sequence

import numpy as np

from likegame.engine import run_game, step_round
from likegame.model import (
    ActionKind,
    ActionRecord,
    GameConfig,
    InfoMode,
    PolicySpec,
    history_key,
    initial_state,
    legal_actions,
)
from likegame.policies import STOCHASTIC_POLICIES

Profile = tuple[int, ...]

DEFAULT_CAP = 10**6
ATOL = 1e-12


class OracleError(ValueError):
    pass


class Verdict(Enum):
    STRICTLY_DOMINATES = "StrictlyDominates"
    WEAKLY_DOMINATES = "WeaklyDominates"
    INCOMPARABLE = "Incomparable"


@dataclass
class NormalFormGame:
    """Payoff tensor over per-player menus.

    ``payoffs[profile]`` holds one payoff per player, in ``player_ids`` order.
    """

    player_ids: tuple[int, ...]
    menus: tuple[tuple[PolicySpec, ...], ...]
    payoffs: np.ndarray
    labels: tuple[tuple[str, ...], ...] = ()

    def __post_init__(self):
        if not self.labels:
            self.labels = tuple(tuple(s.label() for s in menu) for menu in self.menus)
        shape = tuple(len(m) for m in self.menus) + (len(self.menus),)
        if self.payoffs.shape != shape:
            raise OracleError(f"payoff tensor shape {self.payoffs.shape} does not match menus {shape}")

    @property
    def n(self) -> int:
        return len(self.menus)

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(len(m) for m in self.menus)

    def profiles(self):
        return itertools.product(*(range(s) for s in self.sizes))

    def index(self, player: int) -> int:
        try:
            return self.player_ids.index(player)
        except ValueError:
            raise KeyError(f"unknown player {player}") from None

    def strategy_index(self, player: int, strategy) -> int:
        """Accepts a menu index, a label or a PolicySpec."""
        i = self.index(player)
        if isinstance(strategy, (int, np.integer)):
            if not 0 <= strategy < self.sizes[i]:
                raise KeyError(f"player {player} has no strategy {strategy}")
            return int(strategy)
        if isinstance(strategy, PolicySpec):
            for j, s in enumerate(self.menus[i]):
                if s == strategy:
                    return j
        elif strategy in self.labels[i]:
            return self.labels[i].index(strategy)
        raise KeyError(f"player {player} has no strategy {strategy!r}")

    def payoff(self, profile: Profile, player: int) -> float:
        return float(self.payoffs[tuple(profile)][self.index(player)])

    def describe(self, profile: Profile) -> str:
        return " / ".join(self.labels[i][s] for i, s in enumerate(profile))


@dataclass
class DominanceRelation:
    player: int
    a: int
    b: int
    verdict: Verdict
    weak_witnesses: list[Profile] = field(default_factory=list)  # profiles where a >= b
    strict_witnesses: list[Profile] = field(default_factory=list)  # profiles where a > b


# ---------------------------------------------------------------------------
# construction


def _check_menus(config: GameConfig, menus) -> tuple[tuple[PolicySpec, ...], ...]:
    if config.info_mode is not InfoMode.PERFECT:
        raise OracleError("exact oracle needs Perfect information mode")
    if len(menus) != config.n_players:
        raise OracleError(f"expected {config.n_players} menus, got {len(menus)}")
    out = []
    for pid, menu in zip(config.player_ids, menus):
        menu = tuple(menu)
        if not menu:
            raise OracleError(f"player {pid} has an empty menu")
        for s in menu:
            if s.name in STOCHASTIC_POLICIES:
                raise OracleError("stochastic strategy in exact oracle")
        out.append(menu)
    return tuple(out)


def profile_config(config: GameConfig, menus, profile: Profile) -> GameConfig:
    players = {p.id: p for p in config.players}
    for pid, menu, s in zip(config.player_ids, menus, profile):
        players[pid] = replace(players[pid], policy=menu[s])
    return config.replace(players=tuple(players[p.id] for p in config.players))


def evaluate_profile(config: GameConfig, menus, profile: Profile, payoff_rounds: str = "total") -> list[float]:
    trace = run_game(profile_config(config, menus, profile))
    if payoff_rounds == "total":
        return [trace.total_utility(pid) for pid in config.player_ids]
    if payoff_rounds == "initial":
        return [trace.rounds[0].utilities[pid].combined for pid in config.player_ids]
    raise ValueError(f"unknown payoff_rounds {payoff_rounds!r}")


def _evaluate_chunk(args):
    config, menus, profiles, payoff_rounds = args
    return [evaluate_profile(config, menus, p, payoff_rounds) for p in profiles]


def build_normal_form(
    config: GameConfig,
    menus: Sequence[Sequence[PolicySpec]],
    cap: int = DEFAULT_CAP,
    payoff_rounds: str = "total",
    workers: Optional[int] = None,
) -> NormalFormGame:
    """Evaluate every profile of ``menus`` (one menu per player, in id order).

    ``payoff_rounds="total"`` sums combined utility over all rounds;
    ``"initial"`` scores the round-0 subgame only. Open-loop scripts that
    break the rules raise ``IllegalActionError``.
    """
    menus = _check_menus(config, menus)
    sizes = tuple(len(m) for m in menus)
    count = math.prod(sizes)
    if count > cap:
        raise OracleError(f"{count} profiles exceed the cap of {cap}")
    profiles = list(itertools.product(*(range(s) for s in sizes)))
    payoffs = np.zeros(sizes + (len(sizes),))
    if workers is None or workers <= 1 or count < 2 * (workers or 1):
        rows = _evaluate_chunk((config, menus, profiles, payoff_rounds))
    else:
        chunks = [profiles[i::workers] for i in range(workers)]
        with ProcessPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(_evaluate_chunk, [(config, menus, c, payoff_rounds) for c in chunks]))
        rows = [None] * count
        for i, part in enumerate(parts):
            rows[i::workers] = part
    for prof, row in zip(profiles, rows):
        payoffs[prof] = row
    return NormalFormGame(config.player_ids, menus, payoffs)


def default_workers() -> int:
    env = os.environ.get("LIKEGAME_WORKERS")
    return int(env) if env else (os.cpu_count() or 1)


# ---------------------------------------------------------------------------
# queries


def best_responses(game: NormalFormGame, profile: Profile, player: int, atol: float = ATOL) -> set[int]:
    i = game.index(player)
    profile = tuple(profile)
    values = []
    for s in range(game.sizes[i]):
        alt = profile[:i] + (s,) + profile[i + 1:]
        values.append(game.payoffs[alt][i])
    top = max(values)
    return {s for s, v in enumerate(values) if v >= top - atol}


def find_pure_nash(game: NormalFormGame, atol: float = ATOL) -> set[Profile]:
    """Profiles where no player gains more than ``atol`` by deviating within its menu."""
    out = set()
    for prof in game.profiles():
        stable = True
        for i in range(game.n):
            here = game.payoffs[prof][i]
            column = game.payoffs[prof[:i] + (slice(None),) + prof[i + 1:]][:, i]
            if column.max() > here + atol:
                stable = False
                break
        if stable:
            out.add(prof)
    return out


def weak_dominance(game: NormalFormGame, player: int, a, b, atol: float = ATOL) -> DominanceRelation:
    """Compare strategies ``a`` and ``b`` of ``player`` over every opponent combination."""
    i = game.index(player)
    ia, ib = game.strategy_index(player, a), game.strategy_index(player, b)
    others = [range(s) for j, s in enumerate(game.sizes) if j != i]
    weak, strict, worse = [], [], False
    for rest in itertools.product(*others):
        pa = rest[:i] + (ia,) + rest[i:]
        pb = rest[:i] + (ib,) + rest[i:]
        va, vb = game.payoffs[pa][i], game.payoffs[pb][i]
        if va > vb + atol:
            strict.append(pa)
            weak.append(pa)
        elif va >= vb - atol:
            weak.append(pa)
        else:
            worse = True
    total = math.prod(len(r) for r in others)
    if worse or not strict:
        verdict = Verdict.INCOMPARABLE
    elif len(strict) == total:
        verdict = Verdict.STRICTLY_DOMINATES
    else:
        verdict = Verdict.WEAKLY_DOMINATES
    return DominanceRelation(player, ia, ib, verdict, weak, strict)


# ---------------------------------------------------------------------------
# menus


def step(kind: ActionKind | str, content: Optional[str] = None, source: Optional[int] = None) -> dict:
    kind = ActionKind(kind)
    return {"kind": kind.value, "content": content, "source": source}


def script(*steps: dict) -> PolicySpec:
    return PolicySpec("open_loop", {"actions": tuple(steps)})


def share_menu(config: GameConfig, player: int) -> list[PolicySpec]:
    """One open-loop strategy per pool item: share it at round 0, then stay silent."""
    tail = [step(ActionKind.NOOP)] * config.horizon
    return [script(step(ActionKind.SHARE, c.id), *tail) for c in sorted(config.pool(player), key=lambda c: c.id)]


def policy_menu(*names: str) -> list[PolicySpec]:
    return [PolicySpec(n) for n in names]


# ---------------------------------------------------------------------------
# full contingent plans (tiny games only)


def contingent_plans(config: GameConfig, player: int, cap: int = 10_000, state_cap: int = 10_000) -> list[PolicySpec]:
    """Every pure contingent plan of ``player`` over histories reachable under legal play.

    A plan fixes one action per own information set (full history so far).
    Limited to horizon <= 2, Perfect information, and hard caps on both the
    number of reachable states and the number of plans.
    """
    if config.horizon > 2:
        raise OracleError("contingent plans are limited to horizon <= 2")
    if config.info_mode is not InfoMode.PERFECT:
        raise OracleError("contingent plans need Perfect information mode")
    ids = config.player_ids
    root = initial_state(config)
    layers = [[root]]
    n_states = 1
    for _ in range(config.horizon):
        nxt = []
        for st in layers[-1]:
            options = [legal_actions(st, pid, config) for pid in ids]
            for combo in itertools.product(*options):
                nxt.append(step_round(st, dict(zip(ids, combo)), config, check=False))
                n_states += 1
                if n_states > state_cap:
                    raise OracleError(f"more than {state_cap} reachable states")
        layers.append(nxt)

    plans: list[dict[str, ActionRecord]] = [{}]
    for r, layer in enumerate(layers):
        grown = []
        for plan in plans:
            info_sets = {}
            for st in layer:
                if all(plan.get(history_key(st.history[: _prefix(st.history, t)])) == _own(st.history, player, t)
                       for t in range(r)):
                    info_sets.setdefault(history_key(st.history), st)
            keys = sorted(info_sets)
            choices = [legal_actions(info_sets[k], player, config) for k in keys]
            if len(grown) + math.prod(len(c) for c in choices) > cap:
                raise OracleError(f"more than {cap} contingent plans")
            for combo in itertools.product(*choices):
                grown.append({**plan, **dict(zip(keys, combo))})
        plans = grown
    return [
        PolicySpec("contingent", {"plan": {k: step(a.kind, a.content, a.source) for k, a in sorted(p.items())}})
        for p in plans
    ]


def _prefix(history: Sequence[ActionRecord], r: int) -> int:
    """Length of the part of ``history`` strictly before round ``r``."""
    return sum(1 for a in history if a.round < r)


def _own(history: Sequence[ActionRecord], player: int, r: int) -> Optional[ActionRecord]:
    for a in history:
        if a.round == r and a.actor == player:
            return a
    return None
