"""Domain types, game configuration, and action legality."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Mapping, Optional, Sequence

from likegame.ledger import EngagementLedger

Vector = tuple[float, ...]
Pair = tuple[str, int]  # (content id, sharer id)


class ActionKind(Enum):
    NOOP = "noop"
    SHARE = "share"
    LIKE = "like"
    RESHARE = "reshare"


# canonical ordering of action kinds when listing legal actions
KIND_ORDER = {ActionKind.NOOP: 0, ActionKind.SHARE: 1, ActionKind.LIKE: 2, ActionKind.RESHARE: 3}


class InfoMode(Enum):
    PERFECT = "perfect"
    IMPERFECT = "imperfect"


class PersonalMode(Enum):
    STATIC = "static"
    EXPOSURE_WEIGHTED = "exposure_weighted"


class IllegalActionError(ValueError):
    """A policy or caller supplied an action outside the actor's legal set."""

    def __init__(self, action: "ActionRecord", reason: str = "not in legal set"):
        self.action = action
        super().__init__(
            f"illegal action by player {action.actor} at round {action.round}: "
            f"{action.describe()} ({reason})"
        )


@dataclass(frozen=True)
class ContentItem:
    id: str
    vector: Vector
    author: int
    round_introduced: int = 0


@dataclass(frozen=True)
class BeliefState:
    majority_centroid: Optional[Vector] = None
    majority_centroid_of_centroid: Optional[Vector] = None
    gamma_type_beliefs: Optional[Mapping[int, float]] = None


@dataclass(frozen=True)
class PolicySpec:
    name: str
    params: Mapping[str, object] = field(default_factory=dict)

    def label(self) -> str:
        if not self.params:
            return self.name
        inner = ",".join(f"{k}={self.params[k]}" for k in sorted(self.params) if k != "actions")
        if "actions" in self.params:
            inner = (inner + "," if inner else "") + f"actions={len(self.params['actions'])}"
        return f"{self.name}({inner})"


@dataclass(frozen=True)
class PlayerSpec:
    id: int
    gamma: float
    ideal: Vector
    policy: PolicySpec = PolicySpec("idealist")
    audience_multiplier: float = 1.0
    belief: BeliefState = BeliefState()


@dataclass(frozen=True)
class ActionRecord:
    round: int
    actor: int
    kind: ActionKind
    content: Optional[str] = None
    source: Optional[int] = None

    def sort_key(self):
        return (
            self.round,
            self.actor,
            KIND_ORDER[self.kind],
            self.content or "",
            -1 if self.source is None else self.source,
        )

    def describe(self) -> str:
        if self.kind is ActionKind.NOOP:
            return "Noop"
        if self.kind is ActionKind.SHARE:
            return f"Share({self.content})"
        return f"{self.kind.value.capitalize()}({self.content}, {self.source})"

    def at_round(self, r: int) -> "ActionRecord":
        return ActionRecord(r, self.actor, self.kind, self.content, self.source)


def noop(round: int, actor: int) -> ActionRecord:
    return ActionRecord(round, actor, ActionKind.NOOP)


@dataclass(frozen=True)
class GameConfig:
    n_players: int
    k_dims: int
    horizon: int
    players: tuple[PlayerSpec, ...]
    initial_content_pool: Mapping[int, tuple[ContentItem, ...]]
    allow_new_content: bool = False
    info_mode: InfoMode = InfoMode.PERFECT
    visibility_floor: float = 0.1
    like_weight: float = 1.0
    reshare_weight: float = 2.0
    discount: float = 1.0
    cheap_talk: bool = False
    type_centroids: Optional[tuple[Vector, ...]] = None
    salient_type: Optional[int] = None
    rng_seed: int = 0
    personal_mode: PersonalMode = PersonalMode.STATIC
    alignment_radius: float = 0.25

    @cached_property
    def player_map(self) -> dict[int, PlayerSpec]:
        return {p.id: p for p in self.players}

    @cached_property
    def content_map(self) -> dict[str, ContentItem]:
        return {c.id: c for pool in self.initial_content_pool.values() for c in pool}

    @cached_property
    def player_ids(self) -> tuple[int, ...]:
        return tuple(sorted(p.id for p in self.players))

    @property
    def d_max(self) -> float:
        return 2.0 * math.sqrt(self.k_dims)

    def player(self, pid: int) -> PlayerSpec:
        try:
            return self.player_map[pid]
        except KeyError:
            raise KeyError(f"unknown player id {pid!r}") from None

    def content(self, cid: str) -> ContentItem:
        try:
            return self.content_map[cid]
        except KeyError:
            raise KeyError(f"unknown content id {cid!r}") from None

    def pool(self, pid: int) -> tuple[ContentItem, ...]:
        return tuple(self.initial_content_pool.get(pid, ()))

    def weight(self, kind: ActionKind) -> float:
        if kind is ActionKind.LIKE:
            return self.like_weight
        if kind is ActionKind.RESHARE:
            return self.reshare_weight
        return 0.0

    def replace(self, **changes) -> "GameConfig":
        import dataclasses

        return dataclasses.replace(self, **changes)

    def with_player(self, player: PlayerSpec) -> "GameConfig":
        players = tuple(player if p.id == player.id else p for p in self.players)
        return self.replace(players=players)


# ---------------------------------------------------------------------------
# validation


@dataclass(frozen=True)
class Violation:
    severity: str  # "fatal" or "warning"
    message: str

    def __str__(self) -> str:
        return f"[{self.severity}] {self.message}"


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)

    @property
    def fatal(self) -> list[Violation]:
        return [v for v in self.violations if v.severity == "fatal"]

    @property
    def ok(self) -> bool:
        return not self.fatal

    def __bool__(self) -> bool:
        return bool(self.violations)

    def __len__(self) -> int:
        return len(self.violations)

    def __iter__(self):
        return iter(self.violations)

    def messages(self) -> list[str]:
        return [v.message for v in self.violations]

    def add(self, message: str, severity: str = "fatal") -> None:
        self.violations.append(Violation(severity, message))


KNOWN_POLICIES = {
    "idealist",
    "quid_pro_quo",
    "uniform_mixer",
    "level_k",
    "influencer_seeker",
    "influencer_reposter",
    "noop",
    "reactor",
    "open_loop",
    "contingent",
}


def _in_cube(v: Sequence[float]) -> bool:
    return all(-1.0 <= x <= 1.0 for x in v)


def validate_config(config: GameConfig) -> ValidationReport:
    """Collect every invariant violation in ``config``.

    Nothing is raised. The report is empty iff the config is clean; it is
    runnable iff it carries no fatal entries.
    """
    rep = ValidationReport()
    if config.n_players <= 0:
        rep.add("n_players must be positive")
    if config.k_dims <= 0:
        rep.add("k_dims must be positive")
    if config.horizon <= 0:
        rep.add("horizon must be a positive number of rounds")
    if len(config.players) != config.n_players:
        rep.add(f"|players| = {len(config.players)} does not match n_players = {config.n_players}")
    ids = [p.id for p in config.players]
    if len(set(ids)) != len(ids):
        rep.add("duplicate player ids")
    if config.like_weight < 0 or config.reshare_weight < 0:
        rep.add("engagement weights must be non-negative")
    if config.like_weight + config.reshare_weight <= 0:
        rep.add("degenerate engagement weights: w_like + w_share must be positive")
    if not 0.0 <= config.discount <= 1.0:
        rep.add("discount out of [0,1]")
    if config.info_mode is InfoMode.IMPERFECT and not 0.0 < config.visibility_floor <= 1.0:
        rep.add("visibility_floor out of (0,1]")
    if not 0 <= config.rng_seed < 2**64:
        rep.add("rng_seed must be a 64-bit unsigned integer")
    if config.alignment_radius < 0:
        rep.add("alignment_radius must be non-negative")

    k = config.k_dims
    seen_content: set[str] = set()
    for p in config.players:
        if not 0.0 <= p.gamma <= 1.0:
            rep.add(f"player {p.id}: gamma out of [0,1] ({p.gamma})")
        if p.audience_multiplier < 1.0:
            rep.add(f"player {p.id}: audience_multiplier must be >= 1")
        if len(p.ideal) != k:
            rep.add(f"player {p.id}: ideal has {len(p.ideal)} coordinates, expected {k}")
        elif not _in_cube(p.ideal):
            rep.add(f"player {p.id}: ideal coordinates out of [-1,1]")
        _validate_belief(rep, p, k)
        _validate_policy(rep, p, config)
        pool = config.initial_content_pool.get(p.id, ())
        if not pool:
            rep.add(f"player {p.id}: content pool is empty")
        for c in pool:
            if c.id in seen_content:
                rep.add(f"content id {c.id!r} is not unique")
            seen_content.add(c.id)
            if c.author != p.id:
                rep.add(f"content {c.id!r}: author {c.author} differs from pool owner {p.id}")
            if len(c.vector) != k:
                rep.add(f"content {c.id!r}: {len(c.vector)} coordinates, expected {k}")
            elif not _in_cube(c.vector):
                rep.add(f"content {c.id!r}: coordinates out of [-1,1]")
            if c.round_introduced != 0 and not config.allow_new_content:
                rep.add(f"content {c.id!r}: round_introduced must be 0 without allow_new_content")
    extra = set(config.initial_content_pool) - set(ids)
    if extra:
        rep.add(f"content pool for unknown players {sorted(extra)}")

    if config.type_centroids is not None:
        if not config.type_centroids:
            rep.add("type_centroids must hold at least one centroid")
        for i, c in enumerate(config.type_centroids):
            if len(c) != k:
                rep.add(f"type centroid {i} has {len(c)} coordinates, expected {k}")
    if config.salient_type is not None:
        if config.type_centroids is None or not 0 <= config.salient_type < len(config.type_centroids):
            rep.add("salient_type does not index a type centroid")
    return rep


def _validate_belief(rep: ValidationReport, p: PlayerSpec, k: int) -> None:
    b = p.belief
    if b.majority_centroid_of_centroid is not None and b.majority_centroid is None:
        rep.add(f"player {p.id}: level-2 estimate present without level-1 estimate")
    for est in (b.majority_centroid, b.majority_centroid_of_centroid):
        if est is not None and len(est) != k:
            rep.add(f"player {p.id}: belief estimate has wrong dimension")
    if b.gamma_type_beliefs:
        for q in b.gamma_type_beliefs.values():
            if not 0.0 <= q <= 1.0:
                rep.add(f"player {p.id}: gamma-type belief probability out of [0,1]")


def _validate_policy(rep: ValidationReport, p: PlayerSpec, config: GameConfig) -> None:
    name, params = p.policy.name, p.policy.params
    if name not in KNOWN_POLICIES:
        rep.add(f"player {p.id}: unknown policy {name!r}")
        return
    if name == "level_k" and params.get("depth", 0) not in (0, 1, 2):
        rep.add(f"player {p.id}: level_k depth must be 0, 1 or 2")
    if name in ("influencer_reposter", "reactor"):
        radius = params.get("radius", 0.0)
        if radius is not None and radius < 0:
            rep.add(f"player {p.id}: radius must be >= 0")
    if name == "influencer_seeker":
        target = params.get("target")
        if target not in config.player_map:
            rep.add(f"player {p.id}: influencer target {target!r} is unknown")
        elif config.player_map[target].audience_multiplier <= 1.0:
            rep.add(
                f"player {p.id}: influencer target {target} has audience_multiplier <= 1",
                severity="warning",
            )
    if name == "open_loop" and len(params.get("actions", ())) < 1:
        rep.add(f"player {p.id}: open_loop policy needs at least the round-0 action")
    if name == "contingent" and not isinstance(params.get("plan"), dict):
        rep.add(f"player {p.id}: contingent policy needs a plan")


# ---------------------------------------------------------------------------
# state and legality


@dataclass(frozen=True)
class GameState:
    """Snapshot between rounds; ``round`` is the next round to be played."""

    round: int
    history: tuple[ActionRecord, ...]
    ledger: EngagementLedger
    visible_sets: Mapping[int, frozenset[Pair]]
    beliefs: Mapping[int, BeliefState]

    @property
    def last_round(self) -> int:
        """Most recently completed round (0 before anything is played)."""
        return max(self.round - 1, 0)

    def actions_at(self, r: int) -> list[ActionRecord]:
        return [a for a in self.history if a.round == r]

    def shared_content(self) -> list[str]:
        return [a.content for a in self.history if a.kind is ActionKind.SHARE]


def initial_state(config: GameConfig, beliefs: Optional[Mapping[int, BeliefState]] = None) -> GameState:
    if beliefs is None:
        beliefs = {p.id: p.belief for p in config.players}
    return GameState(
        round=0,
        history=(),
        ledger=EngagementLedger(),
        visible_sets={pid: frozenset() for pid in config.player_ids},
        beliefs=dict(beliefs),
    )


def _is_self_engagement(player: int, author: int, sharer: int) -> bool:
    return sharer == player or author == player


def candidate_pairs(ledger: EngagementLedger, player: int, config: GameConfig, before_round: int) -> list[Pair]:
    """All (content, sharer) pairs created before ``before_round`` that ``player`` may engage."""
    out = []
    for (cid, sharer), rec in ledger.pairs.items():
        if rec.introduced >= before_round:
            continue
        if _is_self_engagement(player, config.content(cid).author, sharer):
            continue
        out.append((cid, sharer))
    out.sort()
    return out


def perfect_visible_sets(ledger: EngagementLedger, config: GameConfig, before_round: int) -> dict[int, frozenset[Pair]]:
    return {
        pid: frozenset(candidate_pairs(ledger, pid, config, before_round))
        for pid in config.player_ids
    }


def history_key(history: Sequence[ActionRecord]) -> str:
    return ";".join(
        f"{a.round}:{a.actor}:{a.kind.value}:{a.content or ''}:{'' if a.source is None else a.source}"
        for a in sorted(history, key=ActionRecord.sort_key)
    )


def performed(history: Sequence[ActionRecord], player: int) -> set[tuple]:
    return {(a.kind, a.content, a.source) for a in history if a.actor == player}


def legal_actions(state: GameState, player: int, config: GameConfig) -> list[ActionRecord]:
    """Legal moves for ``player`` at ``state.round``, in canonical order.

    Round 0 offers only ``Share`` over the pool. Later rounds offer ``Noop``
    plus a ``Like`` and a ``Reshare`` per visible pair not yet used by the
    player for that kind, and fresh ``Share`` moves when new content is allowed.
    """
    config.player(player)
    r = state.round
    if r > config.horizon:
        raise ValueError(f"round {r} is beyond the horizon {config.horizon}")
    pool = config.pool(player)
    if r == 0:
        return [ActionRecord(0, player, ActionKind.SHARE, c.id) for c in sorted(pool, key=lambda c: c.id)]

    done = performed(state.history, player)
    out = [noop(r, player)]
    if config.allow_new_content:
        for c in sorted(pool, key=lambda c: c.id):
            if (ActionKind.SHARE, c.id, None) not in done:
                out.append(ActionRecord(r, player, ActionKind.SHARE, c.id))
    for cid, sharer in sorted(state.visible_sets.get(player, ())):
        if _is_self_engagement(player, config.content(cid).author, sharer):
            continue
        for kind in (ActionKind.LIKE, ActionKind.RESHARE):
            if (kind, cid, sharer) not in done:
                out.append(ActionRecord(r, player, kind, cid, sharer))
    out.sort(key=ActionRecord.sort_key)
    return out


def is_legal(action: ActionRecord, state: GameState, config: GameConfig) -> bool:
    if action.round != state.round:
        return False
    try:
        return action in legal_actions(state, action.actor, config)
    except (KeyError, ValueError):
        return False
