"""Self-contained SVG line charts of trace metrics or sweep aggregates."""

from __future__ import annotations

import csv
import io
from pathlib import Path
from typing import Sequence
from xml.sax.saxutils import escape

from likegame.io import trace_from_lines

TRACE_METRICS = (
    "fci",
    "amplification",
    "alignment",
    "dissent",
    "visible_count",
    "reshare_entropy",
    "engagement_entropy",
)

PALETTE = (
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
)

WIDTH, HEIGHT = 640, 400
MARGIN = {"left": 60, "right": 150, "top": 30, "bottom": 40}

Series = tuple[str, list[tuple[float, float]]]


class PlotError(Exception):
    def __init__(self, message: str, code: int = 5):
        super().__init__(message)
        self.code = code


def trace_series(text: str, metric: str) -> list[Series]:
    if metric not in TRACE_METRICS:
        raise PlotError(f"unknown metric {metric!r}")
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise PlotError("no data for metric")
    trace = trace_from_lines(lines)
    block = trace.metrics
    if not block.rounds:
        raise PlotError("no data for metric")
    rounds = block.rounds
    out: list[Series] = []
    if metric == "fci":
        if not block.fci:
            raise PlotError("no data for metric")
        n_types = len(block.fci[rounds[0]])
        for t in range(n_types):
            out.append((f"type {t}", [(r, block.fci[r][t]) for r in rounds]))
    elif metric == "amplification":
        for cid, vals in sorted(block.amplification.items()):
            if any(vals):
                out.append((cid, list(zip(rounds, vals))))
    elif metric in ("alignment", "dissent", "visible_count"):
        table = getattr(block, metric)
        for pid in sorted(table[rounds[0]]):
            out.append((f"player {pid}", [(r, table[r][pid]) for r in rounds]))
    else:
        table = getattr(block, metric)
        if not table:
            raise PlotError("no data for metric")
        out.append((metric, [(r, table[r]) for r in rounds]))
    if not out:
        raise PlotError("no data for metric")
    return out


def aggregate_series(text: str, metric: str) -> list[Series]:
    rows = list(csv.DictReader(io.StringIO(text)))
    if not rows:
        raise PlotError("no data for metric")
    if metric not in rows[0]:
        raise PlotError(f"unknown metric {metric!r}")
    points = []
    for i, row in enumerate(rows):
        if row[metric] not in ("", None):
            points.append((float(i), float(row[metric])))
    if not points:
        raise PlotError("no data for metric")
    return [(metric, points)]


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def render_svg(series: Sequence[Series], title: str, x_label: str) -> str:
    xs = [x for _, pts in series for x, _ in pts]
    ys = [y for _, pts in series for _, y in pts]
    x0, x1 = min(xs), max(xs)
    y0, y1 = min(min(ys), 0.0), max(ys)
    if x1 == x0:
        x1 = x0 + 1
    if y1 == y0:
        y1 = y0 + 1
    pw = WIDTH - MARGIN["left"] - MARGIN["right"]
    ph = HEIGHT - MARGIN["top"] - MARGIN["bottom"]

    def sx(x):
        return MARGIN["left"] + (x - x0) / (x1 - x0) * pw

    def sy(y):
        return MARGIN["top"] + ph - (y - y0) / (y1 - y0) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">',
        '<rect width="100%" height="100%" fill="white"/>',
        f'<text x="{WIDTH // 2}" y="18" text-anchor="middle" font-family="sans-serif" font-size="14">{escape(title)}</text>',
        f'<line x1="{MARGIN["left"]}" y1="{_fmt(sy(y0))}" x2="{MARGIN["left"] + pw}" y2="{_fmt(sy(y0))}" stroke="black"/>',
        f'<line x1="{MARGIN["left"]}" y1="{MARGIN["top"]}" x2="{MARGIN["left"]}" y2="{MARGIN["top"] + ph}" stroke="black"/>',
    ]
    for frac in (0.0, 0.5, 1.0):
        yv = y0 + frac * (y1 - y0)
        out.append(
            f'<text x="{MARGIN["left"] - 6}" y="{_fmt(sy(yv) + 4)}" text-anchor="end" '
            f'font-family="sans-serif" font-size="10">{yv:.3g}</text>'
        )
        xv = x0 + frac * (x1 - x0)
        out.append(
            f'<text x="{_fmt(sx(xv))}" y="{MARGIN["top"] + ph + 14}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="10">{xv:.3g}</text>'
        )
    out.append(
        f'<text x="{MARGIN["left"] + pw // 2}" y="{HEIGHT - 6}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="11">{escape(x_label)}</text>'
    )
    for i, (name, pts) in enumerate(series):
        color = PALETTE[i % len(PALETTE)]
        coords = " ".join(f"{_fmt(sx(x))},{_fmt(sy(y))}" for x, y in pts)
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{coords}"><title>{escape(name)}</title></polyline>')
        ly = MARGIN["top"] + 12 + 14 * i
        if ly < HEIGHT - MARGIN["bottom"]:
            lx = MARGIN["left"] + pw + 10
            out.append(f'<line x1="{lx}" y1="{ly - 4}" x2="{lx + 16}" y2="{ly - 4}" stroke="{color}" stroke-width="2"/>')
            out.append(f'<text x="{lx + 20}" y="{ly}" font-family="sans-serif" font-size="10">{escape(name)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def plot_file(in_path, metric: str, out_path) -> int:
    """Render ``metric`` from a trace (.jsonl) or a sweep aggregate (.csv); returns the number of series."""
    try:
        text = Path(in_path).read_text(encoding="utf-8")
    except OSError as exc:
        raise PlotError(f"cannot read {in_path}: {exc}", code=2) from exc
    if str(in_path).endswith(".csv"):
        series = aggregate_series(text, metric)
        x_label = "run"
    else:
        series = trace_series(text, metric)
        x_label = "round"
    svg = render_svg(series, metric, x_label)
    try:
        with open(out_path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(svg)
    except OSError as exc:
        raise PlotError(f"cannot write {out_path}: {exc}", code=2) from exc
    return len(series)
