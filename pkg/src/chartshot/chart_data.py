"""Chart, table and OCR domain types plus their text formats.

Three line formats are handled here:

* visual data table (VDT) text: ``Country | Value <0x0A> Peru (gray) | 4.9``
* Chart-to-Text records: ``Year & Turnover <SEP> 2018 & 21890``
* OpenCQA OCR context: ``Title: ... Context: tok <s> tok <s> tok``
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from decimal import Context, Decimal, InvalidOperation, ROUND_HALF_EVEN
from typing import Iterable, Mapping, NamedTuple, Sequence

from .errors import EmptyInput, InconsistentArity, MalformedRow, ValidationError

FIELD_SEP = " | "
ROW_SEP = " <0x0A> "
ROW_TOKEN = "<0x0A>"
OCR_SEP = "<s>"
RECORD_SEP = "<SEP>"

_SIG_DIGITS = Context(prec=12, rounding=ROUND_HALF_EVEN)
_NUMBER_RE = re.compile(r"^[+-]?(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?$")
_HEX_RE = re.compile(r"^[0-9a-fA-F]{6}$")
_COLOR_SUFFIX_RE = re.compile(r"^(.*\S) \(([^()]+)\)$")


def parse_number(raw: str) -> Decimal | None:
    """Parse a table cell the way chart tables write numbers.

    Accepts thousands separators, ``$``/``£`` signs, a trailing ``%`` and
    scientific notation. Returns ``None`` for ``nan`` and anything that is not
    a number. Percentages keep their bare magnitude (``"47 %"`` -> 47).
    """
    s = raw.strip()
    if not s or s.lower() == "nan":
        return None
    sign = ""
    if s[0] in "+-":
        sign, s = s[0], s[1:].lstrip()
    s = s.lstrip("$£").strip()
    if s.endswith("%"):
        s = s[:-1].rstrip()
    s = s.replace(",", "")
    if not _NUMBER_RE.match(s):
        return None
    try:
        value = Decimal(sign + s)
    except InvalidOperation:  # pragma: no cover - regex already filters
        return None
    if len(value.as_tuple().digits) > 12:
        value = _SIG_DIGITS.plus(value)
    return value


def format_number(value: Decimal | int | float | str) -> str:
    """Plain positional notation, never exponent form."""
    d = value if isinstance(value, Decimal) else Decimal(str(value))
    return format(d, "f")


@dataclass(frozen=True)
class Cell:
    raw: str
    numeric: Decimal | None = field(init=False, compare=False)

    def __post_init__(self):
        if not isinstance(self.raw, str):
            raise ValidationError(f"cell raw text must be str, got {type(self.raw).__name__}")
        object.__setattr__(self, "numeric", parse_number(self.raw))

    @classmethod
    def of(cls, value) -> "Cell":
        if isinstance(value, Cell):
            return value
        if isinstance(value, str):
            return cls(value)
        return cls(format_number(value))

    def __repr__(self):
        return f"Cell({self.raw!r})"


class Row(NamedTuple):
    label: str
    cells: tuple[Cell, ...]


@dataclass(frozen=True)
class DataTable:
    """A chart's underlying table.

    ``column_headers[0]`` names the row-label column; every row carries one
    cell per remaining header.
    """

    column_headers: tuple[str, ...]
    rows: tuple[Row, ...] = ()
    title: str | None = None

    def __post_init__(self):
        headers = tuple(self.column_headers)
        rows = tuple(Row(r[0], tuple(Cell.of(c) for c in r[1])) for r in self.rows)
        object.__setattr__(self, "column_headers", headers)
        object.__setattr__(self, "rows", rows)
        for h in headers:
            if not isinstance(h, str) or not h.strip():
                raise ValidationError(f"empty column header in {headers!r}")
        if rows and not headers:
            raise ValidationError("rows given without column headers")
        width = max(len(headers) - 1, 0)
        for i, row in enumerate(rows):
            if not isinstance(row.label, str) or not row.label.strip():
                raise ValidationError(f"row {i} has an empty label")
            if len(row.cells) != width:
                raise MalformedRow(
                    f"row {i} ({row.label!r}) has {len(row.cells)} cells, expected {width}"
                )

    @classmethod
    def from_rows(cls, headers: Sequence[str], rows: Iterable[tuple[str, Sequence]], title=None):
        return cls(tuple(headers), tuple((label, tuple(cells)) for label, cells in rows), title)

    @property
    def value_headers(self) -> tuple[str, ...]:
        return self.column_headers[1:]

    @property
    def row_labels(self) -> tuple[str, ...]:
        return tuple(r.label for r in self.rows)

    def cells(self) -> Iterable[tuple[str, str, Cell]]:
        """Yield ``(row_label, column_header, cell)`` in row-major order."""
        for row in self.rows:
            for header, cell in zip(self.value_headers, row.cells):
                yield row.label, header, cell


class Orientation(str, enum.Enum):
    HORIZONTAL = "horizontal"
    VERTICAL = "vertical"


def _check_vdt_field(text: str, what: str, *, label: bool):
    if not text or text != text.strip():
        raise ValidationError(f"{what} {text!r} is empty or has surrounding whitespace")
    if "|" in (text[0], text[-1]) or FIELD_SEP in text or ROW_TOKEN in text:
        raise ValidationError(f"{what} {text!r} contains a separator")
    if label and ("(" in text or ")" in text):
        raise ValidationError(f"{what} {text!r} contains parentheses")


def default_orientation(table: DataTable) -> Orientation:
    return Orientation.VERTICAL if len(table.value_headers) > 1 else Orientation.HORIZONTAL


@dataclass(frozen=True)
class VisualDataTable:
    """A data table whose row or column labels carry color names.

    Horizontal tables color their row labels, vertical tables their column
    headers. An uncolored table cannot show its orientation in text, so its
    orientation is normalized to :func:`default_orientation`.
    """

    orientation: Orientation
    table: DataTable
    label_colors: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self):
        orientation = Orientation(self.orientation)
        colors = dict(self.label_colors)
        if not colors:
            orientation = default_orientation(self.table)
        object.__setattr__(self, "orientation", orientation)
        object.__setattr__(self, "label_colors", colors)

        t = self.table
        for h in t.column_headers:
            _check_vdt_field(h, "header", label=True)
        for row in t.rows:
            _check_vdt_field(row.label, "row label", label=True)
            for c in row.cells:
                _check_vdt_field(c.raw, "cell", label=False)
        allowed = set(t.row_labels if orientation is Orientation.HORIZONTAL else t.column_headers)
        for label, color in colors.items():
            if label not in allowed:
                raise ValidationError(
                    f"color key {label!r} is not a {'row label' if orientation is Orientation.HORIZONTAL else 'column header'}"
                )
            _check_vdt_field(color, "color name", label=True)


def _colored(label: str, colors: Mapping[str, str]) -> str:
    color = colors.get(label)
    return f"{label} ({color})" if color else label


def render_vdt_text(vdt: VisualDataTable) -> str:
    """Render a VDT as the single-line ``a | b <0x0A> c | d`` format."""
    t = vdt.table
    header_colors = vdt.label_colors if vdt.orientation is Orientation.VERTICAL else {}
    row_colors = vdt.label_colors if vdt.orientation is Orientation.HORIZONTAL else {}
    lines = [FIELD_SEP.join(_colored(h, header_colors) for h in t.column_headers)]
    for row in t.rows:
        fields = [_colored(row.label, row_colors)] + [c.raw for c in row.cells]
        lines.append(FIELD_SEP.join(fields))
    return ROW_SEP.join(lines)


def _split_color(text: str) -> tuple[str, str | None]:
    m = _COLOR_SUFFIX_RE.match(text)
    if m:
        return m.group(1), m.group(2).strip()
    return text, None


def parse_vdt_text(s: str) -> VisualDataTable:
    if not s or not s.strip():
        raise EmptyInput("empty visual data table text")
    lines = s.strip().split(ROW_SEP)
    header_fields = [f.strip() for f in lines[0].split(FIELD_SEP)]
    headers, header_colors = [], {}
    for f in header_fields:
        label, color = _split_color(f)
        headers.append(label)
        if color:
            header_colors[label] = color

    rows, row_colors = [], {}
    for i, line in enumerate(lines[1:], start=1):
        fields = [f.strip() for f in line.split(FIELD_SEP)]
        if len(fields) != len(headers):
            raise MalformedRow(
                f"row {i} has {len(fields)} fields but the header has {len(headers)}: {line!r}"
            )
        label, color = _split_color(fields[0])
        if color:
            if row_colors.get(label, color) != color:
                raise ValidationError(f"row label {label!r} carries two colors")
            row_colors[label] = color
        rows.append((label, tuple(Cell(f) for f in fields[1:])))

    if header_colors and row_colors:
        raise ValidationError("colors attached to both headers and row labels")
    table = DataTable(tuple(headers), tuple(rows))
    if header_colors:
        return VisualDataTable(Orientation.VERTICAL, table, header_colors)
    if row_colors:
        return VisualDataTable(Orientation.HORIZONTAL, table, row_colors)
    return VisualDataTable(default_orientation(table), table, {})


def parse_chart2text_input(s: str) -> tuple[str, DataTable]:
    """Split a Chart-to-Text input into its title and data table.

    ``"<title> Context: h1 & h2 <SEP> a & 1 <SEP> b & 2"``. Inputs without any
    ``&`` field separator are caption/OCR text; their first record becomes the
    title and the table is empty.
    """
    text = s.strip()
    title = ""
    if "Context:" in text:
        title, text = (p.strip() for p in text.split("Context:", 1))
    records = [r.strip() for r in text.split(RECORD_SEP)]
    records = [r for r in records if r]
    if records and records[-1].endswith(" ."):
        records[-1] = records[-1][:-2].rstrip()
    if not records:
        return title, DataTable((), (), title or None)
    if "&" not in text:
        title = title or records[0]
        return title, DataTable((), (), title or None)

    split = [[f.strip() for f in r.split("&")] for r in records]
    width = len(split[0])
    for i, fields in enumerate(split):
        if len(fields) != width:
            raise InconsistentArity(
                f"record {i} has {len(fields)} fields, expected {width}: {records[i]!r}"
            )
    rows = tuple((f[0], tuple(Cell(x) for x in f[1:])) for f in split[1:])
    return title, DataTable(tuple(split[0]), rows, title or None)


@dataclass(frozen=True)
class OcrDocument:
    title: str
    tokens: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "tokens", tuple(self.tokens))
        for tok in self.tokens:
            if OCR_SEP in tok:
                raise ValidationError(f"OCR token {tok!r} contains the separator {OCR_SEP!r}")


def _split_ocr(text: str) -> list[str]:
    return [t.strip() for t in text.split(OCR_SEP) if t.strip()]


def parse_opencqa_context(s: str) -> OcrDocument:
    """Parse ``[question] Title: T Context: a <s> b <s> c``.

    Without a ``Context:`` marker the title runs from ``Title:`` to the first
    ``<s>``; without either marker the whole string is OCR tokens.
    """
    text = s.strip()
    if "Title:" in text:
        text = text.split("Title:", 1)[1]
        if "Context:" in text:
            title, rest = text.split("Context:", 1)
            return OcrDocument(title.strip(), tuple(_split_ocr(rest)))
        head, _, rest = text.partition(OCR_SEP)
        return OcrDocument(head.strip(), tuple(_split_ocr(rest)))
    if "Context:" in text:
        text = text.split("Context:", 1)[1]
    return OcrDocument("", tuple(_split_ocr(text)))


def collect_numbers(t: DataTable) -> list[Decimal]:
    """Numeric cell values in row-major order; labels and headers are skipped."""
    return [c.numeric for _, _, c in t.cells() if c.numeric is not None]


# --- chart annotations -------------------------------------------------------


class BBox(NamedTuple):
    x: float
    y: float
    w: float
    h: float


class ChartType(str, enum.Enum):
    BAR = "bar"
    GROUPED_BAR = "grouped_bar"
    STACKED_BAR = "stacked_bar"
    LINE = "line"
    MULTI_LINE = "multi_line"
    PIE = "pie"


class TextElement(NamedTuple):
    text: str
    bbox: BBox
    role: str | None = None


class Mark(NamedTuple):
    series_label: str
    category_label: str | None
    value: Decimal
    hex_color: str
    bbox: BBox


def _check_bbox(b: BBox, what: str):
    if b.w < 0 or b.h < 0:
        raise ValidationError(f"{what} has a negative bbox dimension: {b}")


@dataclass(frozen=True)
class ChartAnnotation:
    """Parsed stand-in for a chart image: typed marks plus positioned text."""

    chart_type: ChartType
    title: str
    text_elements: tuple[TextElement, ...] = ()
    marks: tuple[Mark, ...] = ()
    category_axis_title: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "chart_type", ChartType(self.chart_type))
        object.__setattr__(
            self, "text_elements", tuple(TextElement(t[0], BBox(*t[1]), *t[2:]) for t in self.text_elements)
        )
        marks = tuple(
            Mark(m[0], m[1], m[2] if isinstance(m[2], Decimal) else Decimal(str(m[2])), m[3], BBox(*m[4]))
            for m in self.marks
        )
        object.__setattr__(self, "marks", marks)
        for t in self.text_elements:
            _check_bbox(t.bbox, f"text {t.text!r}")
        seen = set()
        for m in marks:
            _check_bbox(m.bbox, f"mark {m.series_label!r}/{m.category_label!r}")
            if not _HEX_RE.match(m.hex_color):
                raise ValidationError(f"mark hex color {m.hex_color!r} is not 6 hex digits")
            key = (m.series_label, m.category_label)
            if key in seen:
                raise ValidationError(f"duplicate mark for series/category {key!r}")
            seen.add(key)

    def to_dict(self) -> dict:
        return {
            "chart_type": self.chart_type.value,
            "title": self.title,
            "category_axis_title": self.category_axis_title,
            "text_elements": [
                {"text": t.text, "bbox": list(t.bbox), "role": t.role} for t in self.text_elements
            ],
            "marks": [
                {
                    "series": m.series_label,
                    "category": m.category_label,
                    "value": format_number(m.value),
                    "hex": m.hex_color,
                    "bbox": list(m.bbox),
                }
                for m in self.marks
            ],
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "ChartAnnotation":
        return cls(
            chart_type=d["chart_type"],
            title=d.get("title", ""),
            category_axis_title=d.get("category_axis_title"),
            text_elements=tuple(
                TextElement(t["text"], BBox(*t["bbox"]), t.get("role")) for t in d.get("text_elements", ())
            ),
            marks=tuple(
                Mark(m["series"], m.get("category"), Decimal(str(m["value"])), m["hex"], BBox(*m["bbox"]))
                for m in d.get("marks", ())
            ),
        )
