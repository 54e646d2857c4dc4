"""Trace-level observables: false consensus, concentration, exposure, amplification."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

from likegame.model import ActionKind, ActionRecord, GameConfig
from likegame.utility import distance


@dataclass(frozen=True)
class ContentTyping:
    centroids: tuple[tuple[float, ...], ...]

    def __post_init__(self):
        if not self.centroids:
            raise ValueError("content typing needs at least one centroid")

    def assign(self, vector: Sequence[float]) -> int:
        return min(range(len(self.centroids)), key=lambda i: (distance(vector, self.centroids[i]), i))

    @classmethod
    def from_config(cls, config: GameConfig) -> Optional["ContentTyping"]:
        if not config.type_centroids:
            return None
        return cls(tuple(tuple(c) for c in config.type_centroids))


@dataclass
class MetricsBlock:
    rounds: list[int] = field(default_factory=list)
    fci: dict[int, list[float]] = field(default_factory=dict)  # round -> per type
    reshare_entropy: dict[int, float] = field(default_factory=dict)
    engagement_entropy: dict[int, float] = field(default_factory=dict)
    alignment: dict[int, dict[int, float]] = field(default_factory=dict)  # round -> player -> value
    dissent: dict[int, dict[int, float]] = field(default_factory=dict)
    visible_count: dict[int, dict[int, int]] = field(default_factory=dict)
    amplification: dict[str, list[float]] = field(default_factory=dict)  # content -> per round


def entropy(masses: Sequence[float]) -> float:
    total = sum(masses)
    if total <= 0:
        return 0.0
    h = 0.0
    for m in masses:
        if m > 0:
            p = m / total
            h -= p * math.log(p)
    return max(h, 0.0)


def _check_round(trace, r: int) -> None:
    if not 0 <= r < len(trace.rounds):
        raise ValueError(f"round {r} not in trace (0..{len(trace.rounds) - 1})")


# ---------------------------------------------------------------------------
# false consensus


def ideal_mass(config: GameConfig, typing: ContentTyping, t: int) -> float:
    hits = sum(1 for p in config.players if typing.assign(p.ideal) == t)
    return hits / len(config.players)


def share_mass(config: GameConfig, history: Sequence[ActionRecord], typing: ContentTyping, t: int, r: int) -> Optional[float]:
    reshares = [a for a in history if a.kind is ActionKind.RESHARE and a.round <= r]
    if not reshares:
        return None
    hits = sum(1 for a in reshares if typing.assign(config.content(a.content).vector) == t)
    return hits / len(reshares)


def false_consensus_index(trace, typing: ContentTyping, t: int, r: int) -> float:
    """Reshare mass of type ``t`` up to round ``r`` minus the share of players whose ideal is type ``t``.

    Zero when nothing has been reshared yet.
    """
    if not 0 <= t < len(typing.centroids):
        raise ValueError(f"unknown type {t}")
    config = trace.config
    mass = share_mass(config, trace.history(r), typing, t, r)
    if mass is None:
        return 0.0
    return mass - ideal_mass(config, typing, t)


def reshare_entropy(trace, typing: ContentTyping, r: int) -> float:
    config = trace.config
    counts = [0] * len(typing.centroids)
    for a in trace.history(r):
        if a.kind is ActionKind.RESHARE:
            counts[typing.assign(config.content(a.content).vector)] += 1
    return entropy(counts)


# ---------------------------------------------------------------------------


def content_engagement_at(config: GameConfig, history: Sequence[ActionRecord], r: int) -> dict[str, float]:
    out: dict[str, float] = {}
    for a in history:
        if a.round <= r and a.kind in (ActionKind.LIKE, ActionKind.RESHARE):
            out[a.content] = out.get(a.content, 0.0) + config.weight(a.kind)
    return out


def engagement_concentration(trace, r: int) -> float:
    """Shannon entropy (nats) of cumulative weighted engagement across content at round ``r``."""
    _check_round(trace, r)
    masses = content_engagement_at(trace.config, trace.history(r), r)
    return entropy([masses[c] for c in sorted(masses)])


def exposure_alignment(trace, player: int, r: int, radius: Optional[float] = None) -> float:
    """Fraction of the player's visible pairs at ``r`` within normalised distance ``radius`` of their ideal.

    An empty visible set yields 0.0; ``visible_count`` in the metrics block flags it.
    """
    _check_round(trace, r)
    config = trace.config
    radius = config.alignment_radius if radius is None else radius
    ideal = config.player(player).ideal
    visible = trace.rounds[r].visible.get(player, ())
    if not visible:
        return 0.0
    near = sum(1 for cid, _ in visible if distance(config.content(cid).vector, ideal) / config.d_max <= radius)
    return near / len(visible)


def dissent_exposure(trace, player: int, r: int, radius: Optional[float] = None) -> float:
    return 1.0 - exposure_alignment(trace, player, r, radius)


def amplification_curve(trace, content: str) -> list[tuple[int, float]]:
    config = trace.config
    config.content(content)
    out = []
    acc = 0.0
    for rec in trace.rounds:
        for a in rec.actions:
            if a.content == content and a.kind in (ActionKind.LIKE, ActionKind.RESHARE):
                acc += config.weight(a.kind)
        out.append((rec.round, acc))
    return out


# ---------------------------------------------------------------------------


def compute_metrics(trace, radius: Optional[float] = None) -> MetricsBlock:
    config = trace.config
    typing = ContentTyping.from_config(config)
    block = MetricsBlock()
    for rec in trace.rounds:
        r = rec.round
        block.rounds.append(r)
        if typing is not None:
            block.fci[r] = [false_consensus_index(trace, typing, t, r) for t in range(len(typing.centroids))]
            block.reshare_entropy[r] = reshare_entropy(trace, typing, r)
        block.engagement_entropy[r] = engagement_concentration(trace, r)
        block.alignment[r] = {}
        block.dissent[r] = {}
        block.visible_count[r] = {}
        for pid in config.player_ids:
            a = exposure_alignment(trace, pid, r, radius)
            block.alignment[r][pid] = a
            block.dissent[r][pid] = 1.0 - a
            block.visible_count[r][pid] = len(rec.visible.get(pid, ()))
    for cid in sorted(config.content_map):
        block.amplification[cid] = [v for _, v in amplification_curve(trace, cid)]
    return block


def mean_alignment(block: MetricsBlock, r: int) -> float:
    vals = list(block.alignment[r].values())
    return sum(vals) / len(vals) if vals else 0.0
