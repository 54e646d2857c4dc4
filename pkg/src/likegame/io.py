"""JSON config, JSONL trace, CSV metrics and JSON summary formats.

All writers emit UTF-8 with LF line endings and a fixed field order; floats
are written by ``repr`` (shortest round-trip decimal).
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Iterable, Optional

from likegame.engine import RoundRecord, RunTrace
from likegame.metrics import MetricsBlock, compute_metrics, mean_alignment
from likegame.model import (
    ActionKind,
    ActionRecord,
    BeliefState,
    ContentItem,
    GameConfig,
    InfoMode,
    PersonalMode,
    PlayerSpec,
    PolicySpec,
)
from likegame.utility import UtilityBreakdown

SCHEMA_VERSION = 1


class ConfigFormatError(ValueError):
    """Config JSON is structurally unusable (as opposed to failing validation)."""


def dumps(obj: Any) -> str:
    return json.dumps(obj, separators=(",", ":"), ensure_ascii=False, allow_nan=False)


def _vec(v) -> Optional[list[float]]:
    return None if v is None else [float(x) for x in v]


def _tuple(v) -> Optional[tuple[float, ...]]:
    return None if v is None else tuple(float(x) for x in v)


# ---------------------------------------------------------------------------
# config


def belief_to_dict(b: BeliefState) -> dict:
    return {
        "majority_centroid": _vec(b.majority_centroid),
        "majority_centroid_of_centroid": _vec(b.majority_centroid_of_centroid),
        "gamma_type_beliefs": None if b.gamma_type_beliefs is None
        else {str(k): float(v) for k, v in sorted(b.gamma_type_beliefs.items())},
    }


def belief_from_dict(d: Optional[dict]) -> BeliefState:
    if not d:
        return BeliefState()
    gtb = d.get("gamma_type_beliefs")
    return BeliefState(
        majority_centroid=_tuple(d.get("majority_centroid")),
        majority_centroid_of_centroid=_tuple(d.get("majority_centroid_of_centroid")),
        gamma_type_beliefs=None if gtb is None else {int(k): float(v) for k, v in gtb.items()},
    )


def config_to_dict(config: GameConfig) -> dict:
    players = []
    for p in sorted(config.players, key=lambda p: p.id):
        players.append({
            "id": p.id,
            "gamma": p.gamma,
            "ideal": _vec(p.ideal),
            "audience_multiplier": p.audience_multiplier,
            "policy": {"name": p.policy.name, "params": dict(p.policy.params)},
            "belief": belief_to_dict(p.belief),
            "pool": [
                {"id": c.id, "vector": _vec(c.vector), "round_introduced": c.round_introduced}
                for c in config.pool(p.id)
            ],
        })
    return {
        "schema_version": SCHEMA_VERSION,
        "n_players": config.n_players,
        "k_dims": config.k_dims,
        "horizon": config.horizon,
        "allow_new_content": config.allow_new_content,
        "info_mode": config.info_mode.value,
        "visibility_floor": config.visibility_floor,
        "like_weight": config.like_weight,
        "reshare_weight": config.reshare_weight,
        "discount": config.discount,
        "cheap_talk": config.cheap_talk,
        "type_centroids": None if config.type_centroids is None else [_vec(c) for c in config.type_centroids],
        "salient_type": config.salient_type,
        "rng_seed": config.rng_seed,
        "personal_mode": config.personal_mode.value,
        "alignment_radius": config.alignment_radius,
        "players": players,
    }


def config_from_dict(d: dict) -> GameConfig:
    if not isinstance(d, dict):
        raise ConfigFormatError("config must be a JSON object")
    version = d.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise ConfigFormatError(f"unsupported schema_version {version!r}")
    try:
        players, pools = [], {}
        for pd in d.get("players", []):
            pid = int(pd["id"])
            pol = pd.get("policy", {"name": "idealist"})
            if isinstance(pol, str):
                pol = {"name": pol}
            players.append(PlayerSpec(
                id=pid,
                gamma=float(pd["gamma"]),
                ideal=_tuple(pd["ideal"]),
                policy=PolicySpec(pol["name"], dict(pol.get("params") or {})),
                audience_multiplier=float(pd.get("audience_multiplier", 1.0)),
                belief=belief_from_dict(pd.get("belief")),
            ))
            pools[pid] = tuple(
                ContentItem(str(c["id"]), _tuple(c["vector"]), pid, int(c.get("round_introduced", 0)))
                for c in pd.get("pool", [])
            )
        centroids = d.get("type_centroids")
        return GameConfig(
            n_players=int(d.get("n_players", len(players))),
            k_dims=int(d["k_dims"]),
            horizon=int(d["horizon"]),
            players=tuple(players),
            initial_content_pool=pools,
            allow_new_content=bool(d.get("allow_new_content", False)),
            info_mode=InfoMode(d.get("info_mode", "perfect")),
            visibility_floor=float(d.get("visibility_floor", 0.1)),
            like_weight=float(d.get("like_weight", 1.0)),
            reshare_weight=float(d.get("reshare_weight", 2.0)),
            discount=float(d.get("discount", 1.0)),
            cheap_talk=bool(d.get("cheap_talk", False)),
            type_centroids=None if centroids is None else tuple(_tuple(c) for c in centroids),
            salient_type=d.get("salient_type"),
            rng_seed=int(d.get("rng_seed", 0)),
            personal_mode=PersonalMode(d.get("personal_mode", "static")),
            alignment_radius=float(d.get("alignment_radius", 0.25)),
        )
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ConfigFormatError):
            raise
        raise ConfigFormatError(f"malformed config: {exc!r}") from exc


def load_config(path) -> GameConfig:
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigFormatError(f"{path}: invalid JSON: {exc}") from exc
    return config_from_dict(data)


def save_config(config: GameConfig, path) -> None:
    Path(path).write_text(json.dumps(config_to_dict(config), indent=2) + "\n", encoding="utf-8", newline="\n")


# ---------------------------------------------------------------------------
# trace


def action_to_dict(a: ActionRecord) -> dict:
    return {
        "type": "action",
        "round": a.round,
        "actor": a.actor,
        "kind": a.kind.value,
        "content": a.content,
        "source": a.source,
    }


def trace_lines(trace: RunTrace) -> Iterable[str]:
    yield dumps({
        "type": "header",
        "schema_version": SCHEMA_VERSION,
        "seed": trace.seed,
        "config": config_to_dict(trace.config),
        "beliefs": {str(pid): belief_to_dict(b) for pid, b in sorted(trace.beliefs.items())},
        "displays": None if trace.displays is None else {str(k): v for k, v in sorted(trace.displays.items())},
    })
    for rec in trace.rounds:
        for pid in sorted(rec.visible):
            yield dumps({
                "type": "visibility",
                "round": rec.round,
                "player": pid,
                "visible": [[c, s] for c, s in rec.visible[pid]],
            })
        for a in rec.actions:
            yield dumps(action_to_dict(a))
        for pid in sorted(rec.utilities):
            u = rec.utilities[pid]
            yield dumps({
                "type": "utility",
                "round": rec.round,
                "player": pid,
                "personal": u.personal,
                "social": u.social,
                "combined": u.combined,
            })
        for note in rec.notes:
            yield dumps({"type": "note", "round": rec.round, "text": note})


def trace_to_jsonl(trace: RunTrace) -> str:
    return "".join(line + "\n" for line in trace_lines(trace))


def trace_from_lines(lines: Iterable[str]) -> RunTrace:
    records = [json.loads(line) for line in lines if line.strip()]
    if not records or records[0].get("type") != "header":
        raise ValueError("trace has no header line")
    head = records[0]
    config = config_from_dict(head["config"])
    trace = RunTrace(
        config=config,
        seed=int(head["seed"]),
        beliefs={int(k): belief_from_dict(v) for k, v in head["beliefs"].items()},
        displays=None if head.get("displays") is None else {int(k): v for k, v in head["displays"].items()},
    )
    by_round: dict[int, dict] = {}

    def slot(r):
        return by_round.setdefault(r, {"visible": {}, "actions": [], "utilities": {}, "notes": []})

    for rec in records[1:]:
        kind = rec["type"]
        s = slot(rec["round"])
        if kind == "visibility":
            s["visible"][rec["player"]] = tuple((c, int(y)) for c, y in rec["visible"])
        elif kind == "action":
            s["actions"].append(ActionRecord(rec["round"], rec["actor"], ActionKind(rec["kind"]), rec["content"], rec["source"]))
        elif kind == "utility":
            s["utilities"][rec["player"]] = UtilityBreakdown(rec["personal"], rec["social"], rec["combined"], rec["round"])
        elif kind == "note":
            s["notes"].append(rec["text"])
    for r in sorted(by_round):
        s = by_round[r]
        trace.rounds.append(RoundRecord(r, tuple(s["actions"]), s["visible"], s["utilities"], tuple(s["notes"])))
    trace.metrics = compute_metrics(trace)
    return trace


def read_trace(path) -> RunTrace:
    with open(path, encoding="utf-8") as fh:
        return trace_from_lines(fh)


# ---------------------------------------------------------------------------
# metrics and summary


def _num(v) -> str:
    return repr(float(v)) if isinstance(v, float) else str(v)


def metrics_rows(block: MetricsBlock) -> list[tuple]:
    rows = []
    for r in block.rounds:
        for t, v in enumerate(block.fci.get(r, [])):
            rows.append((r, "fci", str(t), v))
        if r in block.reshare_entropy:
            rows.append((r, "reshare_entropy", "", block.reshare_entropy[r]))
        rows.append((r, "engagement_entropy", "", block.engagement_entropy[r]))
        for pid, v in sorted(block.alignment[r].items()):
            rows.append((r, "alignment", str(pid), v))
        for pid, v in sorted(block.dissent[r].items()):
            rows.append((r, "dissent", str(pid), v))
        for pid, v in sorted(block.visible_count[r].items()):
            rows.append((r, "visible_count", str(pid), v))
    for cid, series in sorted(block.amplification.items()):
        for r, v in zip(block.rounds, series):
            rows.append((r, "amplification", cid, v))
    return rows


def metrics_csv(block: MetricsBlock) -> str:
    out = ["round,metric,key,value"]
    for r, metric, key, value in metrics_rows(block):
        out.append(f"{r},{metric},{key},{_num(value)}")
    return "\n".join(out) + "\n"


def summary(trace: RunTrace) -> dict:
    block = trace.metrics if trace.metrics is not None else compute_metrics(trace)
    final = block.rounds[-1]
    history = trace.history()
    utilities = trace.rounds[-1].utilities
    return {
        "schema_version": SCHEMA_VERSION,
        "seed": trace.seed,
        "n_players": trace.config.n_players,
        "horizon": trace.config.horizon,
        "final_round": final,
        "fci": [float(v) for v in block.fci.get(final, [])],
        "reshare_entropy": block.reshare_entropy.get(final),
        "engagement_entropy": block.engagement_entropy[final],
        "mean_alignment": mean_alignment(block, final),
        "mean_combined_utility": sum(u.combined for _, u in sorted(utilities.items())) / len(utilities),
        "total_likes": sum(1 for a in history if a.kind is ActionKind.LIKE),
        "total_reshares": sum(1 for a in history if a.kind is ActionKind.RESHARE),
    }


def write_text(path, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def write_run(trace: RunTrace, out_dir) -> dict:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_text(out / "trace.jsonl", trace_to_jsonl(trace))
    write_text(out / "metrics.csv", metrics_csv(trace.metrics))
    summ = summary(trace)
    write_text(out / "summary.json", json.dumps(summ, indent=2) + "\n")
    return summ
