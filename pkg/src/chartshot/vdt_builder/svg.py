"""SVG chart ingestion.

Marks are ``rect``/``circle``/``path`` elements carrying ``data-value``
(or ``class="mark"``); each must name its series in ``data-series`` and may
name its category in ``data-category``. ``<text>`` elements may carry a
``data-role`` of ``title``, ``category``, ``legend`` or
``category-axis-title``.
"""

from __future__ import annotations

import re
import xml.etree.ElementTree as ET

from ..chart_data import BBox, ChartAnnotation, ChartType, Mark, TextElement, parse_number
from ..errors import MissingFill, UnresolvableLabel, ValidationError, XmlError
from .colors import css3_palette, rgb_to_hex

MARK_TAGS = {"rect", "circle", "path"}
_RGB_RE = re.compile(r"^rgba?\(\s*([^)]*)\)$", re.IGNORECASE)
_PATH_TOKEN_RE = re.compile(r"[MmLlHhVvZzAaCcSsQqTt]|[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?")
_PARAMS_PER_CMD = {"M": 2, "L": 2, "H": 1, "V": 1, "Z": 0, "A": 7, "C": 6, "S": 4, "Q": 4, "T": 2}


def _local(tag: str) -> str:
    return tag.rsplit("}", 1)[-1]


def normalize_color(value: str) -> str | None:
    """``#f00`` / ``#FF0000`` / ``rgb(255,0,0)`` / ``red`` -> ``ff0000``."""
    v = value.strip().lower()
    if not v or v in ("none", "transparent"):
        return None
    if v.startswith("#"):
        h = v[1:]
        if len(h) == 3:
            h = "".join(c * 2 for c in h)
        if re.fullmatch(r"[0-9a-f]{6}", h):
            return h
        return None
    m = _RGB_RE.match(v)
    if m:
        parts = [p.strip() for p in m.group(1).split(",")][:3]
        if len(parts) != 3:
            return None
        channels = []
        for p in parts:
            if p.endswith("%"):
                channels.append(round(float(p[:-1]) * 255 / 100))
            else:
                channels.append(round(float(p)))
        return rgb_to_hex(min(max(c, 0), 255) for c in channels)
    named = dict(css3_palette().entries).get(v)
    return rgb_to_hex(named) if named else None


def _style_fill(el) -> str | None:
    style = el.get("style") or ""
    for decl in style.split(";"):
        prop, _, val = decl.partition(":")
        if prop.strip().lower() == "fill":
            return val.strip()
    return el.get("fill")


def _num(el, name, default=0.0) -> float:
    raw = el.get(name)
    if raw is None:
        return default
    try:
        return float(re.sub(r"px$", "", raw.strip()))
    except ValueError as exc:
        raise XmlError(f"<{_local(el.tag)}> attribute {name}={raw!r} is not a number") from exc


def _path_points(d: str) -> list[tuple[float, float]]:
    tokens = _PATH_TOKEN_RE.findall(d or "")
    points, cur, start = [], (0.0, 0.0), (0.0, 0.0)
    i, cmd = 0, None
    while i < len(tokens):
        tok = tokens[i]
        if tok.isalpha():
            cmd = tok
            i += 1
            if cmd in "Zz":
                cur = start
            continue
        if cmd is None:
            raise XmlError(f"path data starts with a number: {d!r}")
        n = _PARAMS_PER_CMD[cmd.upper()]
        args = [float(t) for t in tokens[i : i + n]]
        if len(args) < n:
            raise XmlError(f"truncated path data: {d!r}")
        i += n
        rel = cmd.islower()
        c = cmd.upper()
        if c == "H":
            x, y = (cur[0] + args[0] if rel else args[0]), cur[1]
        elif c == "V":
            x, y = cur[0], (cur[1] + args[0] if rel else args[0])
        else:
            x, y = args[-2], args[-1]
            if rel:
                x, y = cur[0] + x, cur[1] + y
        cur = (x, y)
        if c == "M":
            start = cur
            cmd = "l" if rel else "L"  # implicit lineto after moveto
        points.append(cur)
    return points


def _mark_bbox(el) -> BBox:
    tag = _local(el.tag)
    if tag == "rect":
        return BBox(_num(el, "x"), _num(el, "y"), _num(el, "width"), _num(el, "height"))
    if tag == "circle":
        cx, cy, r = _num(el, "cx"), _num(el, "cy"), _num(el, "r")
        return BBox(cx - r, cy - r, 2 * r, 2 * r)
    pts = _path_points(el.get("d", ""))
    if not pts:
        raise XmlError("path mark without geometry")
    xs, ys = [p[0] for p in pts], [p[1] for p in pts]
    return BBox(min(xs), min(ys), max(xs) - min(xs), max(ys) - min(ys))


def _text_bbox(el, text: str) -> BBox:
    size = _num(el, "font-size", 12.0)
    w = 0.6 * size * len(text)
    x, y = _num(el, "x"), _num(el, "y")
    anchor = el.get("text-anchor", "start")
    if anchor == "middle":
        x -= w / 2
    elif anchor == "end":
        x -= w
    return BBox(x, y - size, w, size)  # y is the baseline


def parse_svg_chart(svg: str) -> ChartAnnotation:
    try:
        root = ET.fromstring(svg)
    except ET.ParseError as exc:
        raise XmlError(f"malformed SVG: {exc}") from exc

    title = ""
    axis_title = None
    texts, marks = [], []
    for el in root.iter():
        tag = _local(el.tag)
        if tag == "title" and not title:
            title = "".join(el.itertext()).strip()
        elif tag == "text":
            text = "".join(el.itertext()).strip()
            if not text:
                continue
            role = el.get("data-role")
            if role == "title":
                title = text
            elif role == "category-axis-title":
                axis_title = text
            texts.append(TextElement(text, _text_bbox(el, text), role))
        elif tag in MARK_TAGS and (el.get("data-value") is not None or "mark" in (el.get("class") or "").split()):
            series = el.get("data-series")
            if not series:
                raise UnresolvableLabel(f"<{tag}> mark has no data-series label")
            raw_value = el.get("data-value")
            if raw_value is None:
                raise UnresolvableLabel(f"<{tag}> mark for {series!r} has no data-value")
            value = parse_number(raw_value)
            if value is None:
                raise ValidationError(f"mark value {raw_value!r} is not numeric")
            fill_attr = _style_fill(el)
            hex_color = normalize_color(fill_attr) if fill_attr is not None else None
            if hex_color is None:
                raise MissingFill(f"<{tag}> mark {series!r}/{el.get('data-category')!r} has no usable fill")
            marks.append(Mark(series, el.get("data-category"), value, hex_color, _mark_bbox(el)))

    chart_type = root.get("data-chart-type")
    if chart_type is None:
        chart_type = _infer_chart_type(root, marks)
    return ChartAnnotation(ChartType(chart_type), title, tuple(texts), tuple(marks), axis_title)


def _infer_chart_type(root, marks) -> ChartType:
    tags = {_local(el.tag) for el in root.iter() if el.get("data-value") is not None}
    n_series = len({m.series_label for m in marks})
    if "circle" in tags:
        return ChartType.MULTI_LINE if n_series > 1 else ChartType.LINE
    if "path" in tags:
        return ChartType.PIE
    return ChartType.GROUPED_BAR if n_series > 1 else ChartType.BAR
