"""Engagement bookkeeping per (content, sharer) pair."""

from __future__ import annotations

import copy
from dataclasses import dataclass, field


@dataclass
class PairRecord:
    introduced: int
    likes: dict[int, int] = field(default_factory=dict)
    reshares: dict[int, int] = field(default_factory=dict)
    # (round, kind, actor, audience multiplier of actor)
    engagements: list[tuple[int, str, int, float]] = field(default_factory=list)


@dataclass
class EngagementLedger:
    pairs: dict[tuple[str, int], PairRecord] = field(default_factory=dict)

    def copy(self) -> "EngagementLedger":
        return copy.deepcopy(self)

    def introduce(self, content: str, sharer: int, round: int) -> None:
        if (content, sharer) not in self.pairs:
            self.pairs[(content, sharer)] = PairRecord(introduced=round)

    def engage(self, kind: str, content: str, source: int, actor: int, round: int, multiplier: float) -> None:
        rec = self.pairs[(content, source)]
        counts = rec.likes if kind == "like" else rec.reshares
        counts[round] = counts.get(round, 0) + 1
        rec.engagements.append((round, kind, actor, multiplier))

    @classmethod
    def from_history(cls, history, multipliers: dict[int, float]) -> "EngagementLedger":
        ledger = cls()
        for r in sorted({a.round for a in history}):
            ledger.apply_round([a for a in history if a.round == r], multipliers)
        return ledger

    def apply_round(self, batch, multipliers: dict[int, float]) -> None:
        """Apply one round of simultaneous actions (ActionRecords, duck-typed)."""
        # engagements first: every action in a round is evaluated against the pre-round pairs
        for a in batch:
            if a.kind.value in ("like", "reshare"):
                self.engage(a.kind.value, a.content, a.source, a.actor, a.round, multipliers[a.actor])
        for a in batch:
            if a.kind.value in ("share", "reshare"):
                self.introduce(a.content, a.actor, a.round)

    # ------------------------------------------------------------------
    # aggregate queries

    def received(self, player: int, round: int, w_like: float, w_share: float) -> float:
        total = 0.0
        for (_, sharer), rec in self.pairs.items():
            if sharer != player:
                continue
            total += w_like * rec.likes.get(round, 0) + w_share * rec.reshares.get(round, 0)
        return total

    def totals(self, kind: str, up_to: int | None = None) -> int:
        n = 0
        for rec in self.pairs.values():
            counts = rec.likes if kind == "like" else rec.reshares
            n += sum(v for r, v in counts.items() if up_to is None or r <= up_to)
        return n

    def content_engagement(self, w_like: float, w_share: float, before_round: int | None = None) -> dict[str, float]:
        """Audience-weighted engagement E(c), aggregated over all sharers of c."""
        out: dict[str, float] = {}
        for (cid, _), rec in self.pairs.items():
            acc = out.get(cid, 0.0)
            for r, kind, _actor, mult in rec.engagements:
                if before_round is not None and r >= before_round:
                    continue
                acc += (w_like if kind == "like" else w_share) * mult
            out[cid] = acc
        return out

    def content_weighted_counts(self, w_like: float, w_share: float, up_to: int) -> dict[str, float]:
        """Plain w_like*likes + w_share*reshares per content up to and including ``up_to``."""
        out: dict[str, float] = {}
        for (cid, _), rec in self.pairs.items():
            likes = sum(v for r, v in rec.likes.items() if r <= up_to)
            reshares = sum(v for r, v in rec.reshares.items() if r <= up_to)
            out[cid] = out.get(cid, 0.0) + w_like * likes + w_share * reshares
        return out


def visibility_probabilities(engagement: dict[str, float], floor: float) -> dict[str, float]:
    """Affine floor-plus-share map: p(c) = floor + (1 - floor) * E(c) / max E."""
    top = max(engagement.values(), default=0.0)
    if top <= 0.0:
        return {c: floor for c in engagement}
    return {c: floor + (1.0 - floor) * e / top for c, e in engagement.items()}
