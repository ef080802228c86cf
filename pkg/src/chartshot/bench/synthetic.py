"""Seeded synthetic SVG charts with ground-truth tables, for extraction tests.

Colors are palette entries nudged by a few units per channel, kept only when
a plain linear scan still finds the intended entry as the unique nearest
one; some marks use exact override hexes instead.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from decimal import Decimal
from pathlib import Path
from xml.sax.saxutils import escape, quoteattr

import numpy as np

from ..chart_data import (
    ChartType,
    DataTable,
    Orientation,
    VisualDataTable,
    format_number,
    render_vdt_text,
)
from ..vdt_builder import css3_palette, default_overrides, rgb_to_hex
from ..vdt_builder.builder import DEFAULT_STUB_HEADER

GENERATOR_VERSION = 1
WIDTH, HEIGHT = 640, 400
BASELINE = 340
PLOT_TOP = 60
CHART_TYPES = ("bar", "grouped_bar", "line", "pie")

COUNTRIES = (
    "Argentina", "Brazil", "Canada", "Chile", "Denmark", "Egypt", "France", "Germany", "India",
    "Japan", "Kenya", "Mexico", "Norway", "Peru", "Spain", "Sweden", "Turkey", "Vietnam",
)
SERIES = (
    "Men", "Women", "Urban", "Rural", "Online", "In store", "Imports", "Exports",
    "Democrats", "Republicans", "Nominal", "Real terms",
)
SINGLE_SERIES = ("Share of respondents", "Revenue in million USD", "Number of users", "Index score")
TOPICS = ("internet usage", "trade balance", "public opinion", "retail sales", "energy prices", "survey results")
AXIS_TITLES = {"bar": "Country", "grouped_bar": "Country", "line": "Year"}

JITTER = 6
OVERRIDE_RATE = 0.2


@dataclass(frozen=True)
class SyntheticChart:
    chart_id: str
    chart_type: str
    svg: str
    vdt: VisualDataTable

    @property
    def vdt_text(self) -> str:
        return render_vdt_text(self.vdt)

    @property
    def table(self) -> DataTable:
        return self.vdt.table


def _canonical_palette():
    # one entry per distinct rgb, named by its smallest name (as the lookup does)
    by_rgb = {}
    for name, rgb in css3_palette().entries:
        if rgb not in by_rgb or name < by_rgb[rgb]:
            by_rgb[rgb] = name
    return sorted((name, rgb) for rgb, name in by_rgb.items())


def _strictly_nearest(rgb, target, canon) -> bool:
    dists = sorted((sum((a - b) ** 2 for a, b in zip(rgb, c)), c) for _, c in canon)
    return dists[0][1] == target and dists[0][0] < dists[1][0]


def _pick_colors(rng, k: int) -> list[tuple[str, str]]:
    """``k`` (hex, expected name) pairs with distinct names."""
    canon = _canonical_palette()
    overrides = default_overrides()
    override_items = sorted(overrides.mappings.items())
    out, used = [], set()
    while len(out) < k:
        if rng.random() < OVERRIDE_RATE:
            hex_color, name = override_items[int(rng.integers(len(override_items)))]
            if name not in used:
                out.append((hex_color, name))
                used.add(name)
            continue
        name, rgb = canon[int(rng.integers(len(canon)))]
        if name in used:
            continue
        for _ in range(8):
            cand = tuple(int(min(255, max(0, c + d))) for c, d in zip(rgb, rng.integers(-JITTER, JITTER + 1, size=3)))
            if rgb_to_hex(cand) not in overrides and _strictly_nearest(cand, rgb, canon):
                break
        else:
            cand = rgb  # an exact palette color is always its own nearest
        if rgb_to_hex(cand) in overrides:
            continue
        out.append((rgb_to_hex(cand), name))
        used.add(name)
    return out


def _values(rng, n: int) -> list[Decimal]:
    return [Decimal(int(v)).scaleb(-1) for v in rng.integers(10, 1000, size=n)]


def _choose(rng, pool, k):
    idx = rng.choice(len(pool), size=k, replace=False)
    return [pool[int(i)] for i in idx]


def _text(x, y, s, role=None, anchor="middle", size=12):
    role_attr = f" data-role={quoteattr(role)}" if role else ""
    return f'<text x="{x:.2f}" y="{y:.2f}" font-size="{size}" text-anchor="{anchor}"{role_attr}>{escape(s)}</text>'


def _mark_attrs(series, category, value, hex_color):
    cat = f" data-category={quoteattr(category)}" if category is not None else ""
    return f'class="mark" data-series={quoteattr(series)}{cat} data-value="{format_number(value)}" fill="#{hex_color}"'


def _svg(chart_type: str, title: str, body: list[str]) -> str:
    head = (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" data-chart-type="{chart_type}">'
    )
    return "\n".join([head, f"<title>{escape(title)}</title>", _text(WIDTH / 2, 28, title, "title", size=16), *body, "</svg>"]) + "\n"


def _legend(series, colors) -> list[str]:
    out = []
    step = (WIDTH - 120) / len(series)
    for i, (s, (hex_color, _)) in enumerate(zip(series, colors)):
        x = 60 + i * step
        out.append(f'<rect x="{x:.2f}" y="40" width="10" height="10" fill="#{hex_color}"/>')
        out.append(_text(x + 14, 50, s, "legend", anchor="start"))
    return out


def _bar_chart(rng, grouped: bool):
    n_cat = int(rng.integers(2, 7)) if grouped else int(rng.integers(3, 9))
    categories = _choose(rng, COUNTRIES, n_cat)
    series = _choose(rng, SERIES, int(rng.integers(2, 5))) if grouped else [SINGLE_SERIES[int(rng.integers(len(SINGLE_SERIES)))]]
    colors = _pick_colors(rng, len(series) if grouped else n_cat)
    values = {s: _values(rng, n_cat) for s in series}
    top = max(v for vs in values.values() for v in vs)
    scale = (BASELINE - PLOT_TOP - 20) / float(top)
    slot = (WIDTH - 120) / n_cat
    bar_w = slot * 0.7 / len(series)
    body = _legend(series, colors) if grouped else []
    for ci, c in enumerate(categories):
        x0 = 60 + ci * slot + slot * 0.15
        for si, s in enumerate(series):
            v = values[s][ci]
            h = float(v) * scale
            hex_color = colors[si][0] if grouped else colors[ci][0]
            body.append(
                f'<rect x="{x0 + si * bar_w:.2f}" y="{BASELINE - h:.2f}" width="{bar_w:.2f}" height="{h:.2f}" '
                f"{_mark_attrs(s, c, v, hex_color)}/>"
            )
        body.append(_text(60 + ci * slot + slot / 2, BASELINE + 18, c, "category"))
    return categories, series, values, colors, body


def _line_chart(rng):
    n_cat = int(rng.integers(4, 9))
    start = int(rng.integers(1990, 2015))
    categories = [str(start + i) for i in range(n_cat)]
    multi = bool(rng.random() < 0.5)
    series = _choose(rng, SERIES, int(rng.integers(2, 4))) if multi else [SINGLE_SERIES[int(rng.integers(len(SINGLE_SERIES)))]]
    colors = _pick_colors(rng, len(series))
    values = {s: _values(rng, n_cat) for s in series}
    top = max(v for vs in values.values() for v in vs)
    scale = (BASELINE - PLOT_TOP - 20) / float(top)
    step = (WIDTH - 120) / (n_cat - 1)
    body = _legend(series, colors) if multi else []
    for si, s in enumerate(series):
        pts = [(60 + ci * step, BASELINE - float(values[s][ci]) * scale) for ci in range(n_cat)]
        coords = " ".join(f"{x:.2f},{y:.2f}" for x, y in pts)
        body.append(f'<polyline points="{coords}" fill="none" stroke="#{colors[si][0]}"/>')
        for ci, (x, y) in enumerate(pts):
            body.append(f'<circle cx="{x:.2f}" cy="{y:.2f}" r="3" {_mark_attrs(s, categories[ci], values[s][ci], colors[si][0])}/>')
    for ci, c in enumerate(categories):
        body.append(_text(60 + ci * step, BASELINE + 18, c, "category"))
    return categories, series, values, colors, body, multi


def _pie_chart(rng):
    k = int(rng.integers(2, 7))
    labels = _choose(rng, COUNTRIES, k)
    colors = _pick_colors(rng, k)
    values = _values(rng, k)
    total = float(sum(values))
    cx, cy, r = 220.0, 210.0, 130.0
    body, angle = [], -math.pi / 2
    for i, (lbl, v) in enumerate(zip(labels, values)):
        sweep = 2 * math.pi * float(v) / total
        x1, y1 = cx + r * math.cos(angle), cy + r * math.sin(angle)
        angle += sweep
        x2, y2 = cx + r * math.cos(angle), cy + r * math.sin(angle)
        large = 1 if sweep > math.pi else 0
        d = f"M {cx:.2f} {cy:.2f} L {x1:.2f} {y1:.2f} A {r:.2f} {r:.2f} 0 {large} 1 {x2:.2f} {y2:.2f} Z"
        body.append(f'<path d="{d}" {_mark_attrs(lbl, None, v, colors[i][0])}/>')
        body.append(f'<rect x="440" y="{70 + i * 26:.2f}" width="10" height="10" fill="#{colors[i][0]}"/>')
        body.append(_text(456, 80 + i * 26, lbl, "category", anchor="start"))
    return labels, values, colors, body


def make_chart(rng, index: int, chart_type: str) -> SyntheticChart:
    title = f"Chart {index}: {TOPICS[int(rng.integers(len(TOPICS)))]}"
    axis_title = AXIS_TITLES.get(chart_type) if rng.random() < 0.5 else None
    stub = axis_title or DEFAULT_STUB_HEADER
    extra = [_text(WIDTH / 2, HEIGHT - 12, axis_title, "category-axis-title")] if axis_title else []

    if chart_type == "pie":
        labels, values, colors, body = _pie_chart(rng)
        table = DataTable.from_rows((stub, "Value"), [(lbl, [format_number(v)]) for lbl, v in zip(labels, values)], title)
        vdt = VisualDataTable(Orientation.HORIZONTAL, table, {lbl: name for lbl, (_, name) in zip(labels, colors)})
        svg_type = ChartType.PIE.value
    else:
        if chart_type == "line":
            categories, series, values, colors, body, multi = _line_chart(rng)
            svg_type = (ChartType.MULTI_LINE if multi else ChartType.LINE).value
        else:
            categories, series, values, colors, body = _bar_chart(rng, grouped=chart_type == "grouped_bar")
            svg_type = chart_type
        rows = [(c, [format_number(values[s][ci]) for s in series]) for ci, c in enumerate(categories)]
        table = DataTable.from_rows((stub, *series), rows, title)
        if len(series) == 1:
            # single-series bars color each category; a single line is one color
            if chart_type == "bar":
                label_colors = {c: name for c, (_, name) in zip(categories, colors)}
            else:
                label_colors = {c: colors[0][1] for c in categories}
            vdt = VisualDataTable(Orientation.HORIZONTAL, table, label_colors)
        else:
            vdt = VisualDataTable(Orientation.VERTICAL, table, {s: name for s, (_, name) in zip(series, colors)})
    svg = _svg(svg_type, title, body + extra)
    return SyntheticChart(f"chart_{index:04d}", svg_type, svg, vdt)


def _csv(table: DataTable) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(table.column_headers)
    for row in table.rows:
        w.writerow([row.label, *(c.raw for c in row.cells)])
    return buf.getvalue()


def generate_synthetic_charts(n: int, seed: int, out_dir: str | Path | None = None) -> dict:
    """Emit ``n`` charts; returns the manifest (and writes it when ``out_dir`` is set).

    The manifest's ``charts`` entries carry the in-memory :class:`SyntheticChart`
    under ``"chart"``; that key is dropped from the JSON file.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = np.random.default_rng(seed)
    charts = []
    for i in range(n):
        chart_type = CHART_TYPES[int(rng.integers(len(CHART_TYPES)))]
        charts.append(make_chart(rng, i, chart_type))
    manifest = {
        "generator_version": GENERATOR_VERSION,
        "seed": seed,
        "n": n,
        "charts": [
            {
                "id": c.chart_id,
                "chart_type": c.chart_type,
                "svg": f"{c.chart_id}.svg",
                "vdt": f"{c.chart_id}.vdt.txt",
                "table": f"{c.chart_id}.csv",
                "chart": c,
            }
            for c in charts
        ],
    }
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        for c in charts:
            (out / f"{c.chart_id}.svg").write_text(c.svg, encoding="utf-8")
            (out / f"{c.chart_id}.vdt.txt").write_text(c.vdt_text + "\n", encoding="utf-8")
            (out / f"{c.chart_id}.csv").write_text(_csv(c.table), encoding="utf-8")
        on_disk = {**manifest, "charts": [{k: v for k, v in e.items() if k != "chart"} for e in manifest["charts"]]}
        (out / "manifest.json").write_text(json.dumps(on_disk, indent=1, sort_keys=True) + "\n", encoding="utf-8")
    return manifest
