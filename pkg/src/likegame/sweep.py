"""Parameter sweeps: cross product of swept values and seeds, run in worker processes."""

from __future__ import annotations

import copy
import itertools
import json
import os
import traceback
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Optional, Union

import numpy as np

from likegame.engine import ConfigError, run_game
from likegame.io import config_from_dict, write_run, write_text

Value = Union[int, float, str]


class SweepSpecError(ValueError):
    pass


@dataclass
class SweepSpec:
    base_config: Path
    parameters: dict[str, list[Value]]
    seeds: list[int]
    out_dir: Path

    def combos(self) -> list[tuple[tuple[Value, ...], int]]:
        """Every (parameter values, seed) pair in aggregation order."""
        paths = list(self.parameters)
        grids = [sorted(self.parameters[p], key=_order_key) for p in paths]
        pairs = [(vals, seed) for vals in itertools.product(*grids) for seed in self.seeds]
        pairs.sort(key=lambda t: (tuple(_order_key(v) for v in t[0]), t[1]))
        return pairs


def _order_key(v: Value):
    return (0, float(v), "") if isinstance(v, (int, float)) and not isinstance(v, bool) else (1, 0.0, str(v))


def parse_range(text: str) -> list[float]:
    """``"start:stop:step"``, both ends inclusive."""
    try:
        start, stop, step = (float(x) for x in text.split(":"))
    except ValueError:
        raise SweepSpecError(f"bad range {text!r}; expected start:stop:step") from None
    if step <= 0 or stop < start:
        raise SweepSpecError(f"bad range {text!r}; need step > 0 and stop >= start")
    count = int(np.floor((stop - start) / step + 1e-9)) + 1
    return [round(start + i * step, 12) for i in range(count)]


def derive_seeds(count: int, master_seed: int) -> list[int]:
    return [
        int(np.random.SeedSequence(entropy=master_seed, spawn_key=(i,)).generate_state(1, np.uint64)[0] >> np.uint64(1))
        for i in range(count)
    ]


def load_spec(path) -> SweepSpec:
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise SweepSpecError(f"{path}: invalid JSON: {exc}") from exc
    return spec_from_dict(raw, path.parent)


def spec_from_dict(raw: dict, root: Path = Path(".")) -> SweepSpec:
    for key in ("base_config", "parameters", "seeds", "out_dir"):
        if key not in raw:
            raise SweepSpecError(f"sweep spec is missing {key!r}")
    params = {}
    for p, v in raw["parameters"].items():
        values = parse_range(v) if isinstance(v, str) and v.count(":") == 2 else v
        if not isinstance(values, list) or not values:
            raise SweepSpecError(f"parameter {p!r} needs a range string or a non-empty list")
        params[p] = values
    seeds = raw["seeds"]
    if isinstance(seeds, int):
        seeds = derive_seeds(seeds, int(raw.get("master_seed", 0)))
    if not isinstance(seeds, list) or not seeds:
        raise SweepSpecError("sweep needs at least one seed")
    return SweepSpec(root / raw["base_config"], params, [int(s) for s in seeds], root / raw["out_dir"])


# ---------------------------------------------------------------------------
# paths into the config dict


def _expand(path: str, doc: dict) -> list[str]:
    # bare player field names apply to every player
    head = path.split(".")[0]
    if head not in doc and doc.get("players") and head in doc["players"][0]:
        return ["players.*." + path]
    return [path]


def set_path(doc: dict, path: str, value: Value) -> None:
    for full in _expand(path, doc):
        _set(doc, full.split("."), value, full)


def _set(node: Any, parts: list[str], value: Value, full: str) -> None:
    key = parts[0]
    if key == "*":
        if not isinstance(node, list):
            raise SweepSpecError(f"{full}: '*' needs a list")
        for item in node:
            _set(item, parts[1:], value, full)
        return
    if isinstance(node, list):
        try:
            child_key: Any = int(key)
            node[child_key]
        except (ValueError, IndexError):
            raise SweepSpecError(f"{full}: no list element {key!r}") from None
    elif isinstance(node, dict) and key in node:
        child_key = key
    else:
        raise SweepSpecError(f"{full}: unknown field {key!r}")
    if len(parts) > 1:
        _set(node[child_key], parts[1:], value, full)
        return
    current = node[child_key]
    if isinstance(current, (dict, list)) or (current is not None and isinstance(current, bool)):
        raise SweepSpecError(f"{full}: not a numeric or enum field")
    node[child_key] = value


# ---------------------------------------------------------------------------


def _run_one(args) -> dict:
    index, doc, seed, run_dir = args
    try:
        config = config_from_dict(doc)
        trace = run_game(config, seed)
        summ = write_run(trace, run_dir)
        return {"status": "ok", "summary": summ}
    except ConfigError as exc:
        return {"status": "error", "error": f"config: {exc}"}
    except Exception as exc:  # recorded per row
        return {"status": "error", "error": f"{type(exc).__name__}: {exc}", "trace": traceback.format_exc()}


def worker_count() -> int:
    env = os.environ.get("LIKEGAME_WORKERS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


SUMMARY_COLUMNS = (
    "final_round",
    "reshare_entropy",
    "engagement_entropy",
    "mean_alignment",
    "mean_combined_utility",
    "total_likes",
    "total_reshares",
)


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def run_sweep(spec: SweepSpec, workers: Optional[int] = None) -> tuple[list[dict], Path]:
    """Execute the sweep; returns the per-run rows and the aggregate path."""
    base = json.loads(Path(spec.base_config).read_text(encoding="utf-8"))
    jobs = []
    combos = spec.combos()
    for i, (values, seed) in enumerate(combos):
        doc = copy.deepcopy(base)
        for path, v in zip(spec.parameters, values):
            set_path(doc, path, v)
        doc["rng_seed"] = seed
        jobs.append((i, doc, seed, str(spec.out_dir / f"run_{i:04d}")))

    spec.out_dir.mkdir(parents=True, exist_ok=True)
    workers = worker_count() if workers is None else workers
    if workers <= 1:
        results = [_run_one(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(_run_one, jobs))

    n_types = max((len(r["summary"]["fci"]) for r in results if r["status"] == "ok"), default=0)
    header = ["run", *spec.parameters, "seed", "status", *SUMMARY_COLUMNS, *(f"fci_{t}" for t in range(n_types)), "error"]
    lines = [",".join(header)]
    rows = []
    for (i, _, seed, _), (values, _), res in zip(jobs, combos, results):
        row = {"run": f"run_{i:04d}", **dict(zip(spec.parameters, values)), "seed": seed, "status": res["status"]}
        summ = res.get("summary") or {}
        for col in SUMMARY_COLUMNS:
            row[col] = summ.get(col)
        fci = summ.get("fci") or []
        for t in range(n_types):
            row[f"fci_{t}"] = fci[t] if t < len(fci) else None
        row["error"] = res.get("error", "").replace(",", ";").replace("\n", " ")
        rows.append(row)
        lines.append(",".join(_cell(row[h]) for h in header))
    agg = spec.out_dir / "aggregate.csv"
    write_text(agg, "\n".join(lines) + "\n")
    return rows, agg
