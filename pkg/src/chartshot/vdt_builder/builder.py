from __future__ import annotations

import math

from ..chart_data import (
    ChartAnnotation,
    DataTable,
    Orientation,
    VisualDataTable,
    format_number,
)
from ..errors import InconsistentSeries, ValidationError
from .colors import ColorPalette, OverrideTable, default_overrides, nearest_color

DEFAULT_STUB_HEADER = "Characteristic"


def _reading_key(bbox):
    # bucket y to whole pixels so sub-pixel jitter does not reorder a row
    return (math.floor(bbox.y + 0.5), bbox.x)


def sort_annotation(a: ChartAnnotation) -> ChartAnnotation:
    """Order marks and text elements top-to-bottom, then left-to-right."""
    marks = sorted(a.marks, key=lambda m: _reading_key(m.bbox))
    texts = sorted(a.text_elements, key=lambda t: _reading_key(t.bbox))
    return ChartAnnotation(a.chart_type, a.title, tuple(texts), tuple(marks), a.category_axis_title)


def _label_order(labels_in_mark_order: list[str], texts, role: str) -> list[str]:
    """Order labels by where their text first appears, falling back to mark order."""
    position = {}
    for preferred in (True, False):
        for i, t in enumerate(texts):
            if (t.role == role) != preferred:
                continue
            if t.text in labels_in_mark_order and t.text not in position:
                position[t.text] = i
    fallback = {label: i for i, label in reversed(list(enumerate(labels_in_mark_order)))}
    return sorted(
        dict.fromkeys(labels_in_mark_order),
        key=lambda lbl: (lbl not in position, position.get(lbl, 0), fallback[lbl]),
    )


def build_vdt(
    a: ChartAnnotation,
    palette: ColorPalette | None = None,
    overrides: OverrideTable | None = None,
) -> VisualDataTable:
    """Ground-truth visual data table for an annotated chart.

    Single-series charts become horizontal tables (one colored row per
    category); multi-series charts become vertical tables with one colored
    column per series. ``overrides`` defaults to the shipped override file;
    pass an empty :class:`OverrideTable` to disable it.
    """
    if overrides is None:
        overrides = default_overrides()
    if not a.marks:
        raise ValidationError("annotation has no marks")
    a = sort_annotation(a)
    stub = a.category_axis_title or DEFAULT_STUB_HEADER

    uncategorized = [m.category_label is None for m in a.marks]
    if any(uncategorized) and not all(uncategorized):
        raise InconsistentSeries("some marks have a category label and some do not")
    if all(uncategorized):
        # each mark is its own labeled item (e.g. pie slices without categories)
        labels = _label_order([m.series_label for m in a.marks], a.text_elements, "category")
        by_label = {m.series_label: m for m in a.marks}
        rows = tuple((lbl, (format_number(by_label[lbl].value),)) for lbl in labels)
        table = DataTable((stub, "Value"), rows, a.title or None)
        colors = {lbl: nearest_color(by_label[lbl].hex_color, palette, overrides) for lbl in labels}
        return VisualDataTable(Orientation.HORIZONTAL, table, colors)

    series = _label_order([m.series_label for m in a.marks], a.text_elements, "legend")
    categories = _label_order([m.category_label for m in a.marks], a.text_elements, "category")
    cells = {(m.series_label, m.category_label): m for m in a.marks}
    wanted = set(categories)
    for s in series:
        have = {c for (ss, c) in cells if ss == s}
        if have != wanted:
            missing = sorted(wanted - have)
            raise InconsistentSeries(f"series {s!r} lacks categories {missing!r}")

    if len(series) == 1:
        (s,) = series
        rows = tuple((c, (format_number(cells[s, c].value),)) for c in categories)
        table = DataTable((stub, s), rows, a.title or None)
        colors = {c: nearest_color(cells[s, c].hex_color, palette, overrides) for c in categories}
        return VisualDataTable(Orientation.HORIZONTAL, table, colors)

    rows = tuple((c, tuple(format_number(cells[s, c].value) for s in series)) for c in categories)
    table = DataTable((stub, *series), rows, a.title or None)
    first_mark = {}
    for m in a.marks:
        first_mark.setdefault(m.series_label, m)
    colors = {s: nearest_color(first_mark[s].hex_color, palette, overrides) for s in series}
    return VisualDataTable(Orientation.VERTICAL, table, colors)
