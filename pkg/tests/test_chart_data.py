from decimal import Decimal

import pytest
from hypothesis import given
from hypothesis import strategies as st

from chartshot.chart_data import (
    BBox,
    ChartAnnotation,
    DataTable,
    Mark,
    Orientation,
    TextElement,
    VisualDataTable,
    collect_numbers,
    format_number,
    parse_chart2text_input,
    parse_number,
    parse_opencqa_context,
    parse_vdt_text,
    render_vdt_text,
)
from chartshot.errors import EmptyInput, InconsistentArity, MalformedRow, ValidationError
from strategies import data_tables, visual_tables


@pytest.mark.parametrize(
    "raw, expected",
    [
        ("12", Decimal("12")),
        ("1,234.5", Decimal("1234.5")),
        ("$3.2", Decimal("3.2")),
        ("£40", Decimal("40")),
        ("47 %", Decimal("47")),
        ("-0.5%", Decimal("-0.5")),
        ("1e3", Decimal("1e3")),
        ("nan", None),
        ("", None),
        ("abc", None),
        ("2019/20", None),
    ],
)
def test_parse_number(raw, expected):
    assert parse_number(raw) == expected


def test_parse_number_rounds_to_twelve_significant_digits():
    assert parse_number("1.23456789012345") == Decimal("1.23456789012")


def test_format_number_never_uses_exponent():
    assert format_number(Decimal("1E+3")) == "1000"
    assert format_number(0.1) == "0.1"


def test_row_arity_checked():
    with pytest.raises(MalformedRow):
        DataTable.from_rows(("Year", "A", "B"), [("2019", ["1"])])


def test_row1_fixture_renders_like_reference_text(golden_dir):
    table = DataTable.from_rows(
        ("Country", "Human Rights Volations, 2012"),
        [
            ("Central African Republic", ["8.5"]),
            ("Iraq", ["8.3"]),
            ("Gabon", ["6.8"]),
            ("Suriname", ["5.3"]),
            ("Peru", ["4.9"]),
        ],
    )
    colors = {"Central African Republic": "red", "Iraq": "purple", "Gabon": "Teal", "Suriname": "orange", "Peru": "gray"}
    text = render_vdt_text(VisualDataTable(Orientation.HORIZONTAL, table, colors))
    assert text == (golden_dir / "vdt_row1.txt").read_text(encoding="utf-8").rstrip("\n")
    assert "Central African Republic (red) | 8.5" in text


def test_row2_fixture_parses_as_vertical(golden_dir):
    text = (golden_dir / "vdt_row2.txt").read_text(encoding="utf-8").strip()
    vdt = parse_vdt_text(text)
    assert vdt.orientation is Orientation.VERTICAL
    assert vdt.label_colors == {"Nominal": "blue", "Real Terms": "navy blue"}
    assert len(vdt.table.rows) == 24
    assert vdt.table.rows[-1] == ("1996/97", vdt.table.rows[-1].cells)
    assert [c.raw for c in vdt.table.rows[0].cells] == ["11.97", "12.11"]
    assert render_vdt_text(vdt) == text


@given(visual_tables())
def test_vdt_round_trip(vdt):
    assert parse_vdt_text(render_vdt_text(vdt)) == vdt


@pytest.mark.parametrize(
    "text, error",
    [
        ("", EmptyInput),
        ("   ", EmptyInput),
        ("A | B <0x0A> x | 1 | 2", MalformedRow),
        ("A (red) | B <0x0A> x (blue) | 1", ValidationError),
        ("A | B <0x0A> x (blue) | 1 <0x0A> x (red) | 2", ValidationError),
    ],
)
def test_parse_vdt_errors(text, error):
    with pytest.raises(error):
        parse_vdt_text(text)


def test_uncolored_vdt_orientation_follows_value_columns():
    one = VisualDataTable(Orientation.VERTICAL, DataTable.from_rows(("A", "B"), [("x", ["1"])]))
    assert one.orientation is Orientation.HORIZONTAL
    two = VisualDataTable(Orientation.HORIZONTAL, DataTable.from_rows(("A", "B", "C"), [("x", ["1", "2"])]))
    assert two.orientation is Orientation.VERTICAL


def test_vdt_rejects_separator_in_labels():
    with pytest.raises(ValidationError):
        VisualDataTable(Orientation.HORIZONTAL, DataTable.from_rows(("A", "B"), [("x | y", ["1"])]))
    with pytest.raises(ValidationError):
        VisualDataTable(Orientation.HORIZONTAL, DataTable.from_rows(("A", "B"), [("x (y)", ["1"])]))


def test_color_key_must_name_a_label():
    t = DataTable.from_rows(("A", "B"), [("x", ["1"])])
    with pytest.raises(ValidationError):
        VisualDataTable(Orientation.HORIZONTAL, t, {"nope": "red"})


def test_chart2text_input():
    title, t = parse_chart2text_input("Internet access Context: Year & Share <SEP> 2019 & 87 <SEP> 2020 & 91 .")
    assert title == "Internet access"
    assert t.column_headers == ("Year", "Share")
    assert [(r.label, r.cells[0].raw) for r in t.rows] == [("2019", "87"), ("2020", "91")]


def test_chart2text_caption_only_gives_empty_table():
    title, t = parse_chart2text_input("Most adults say voting will be easy <SEP> Easy Difficult 64 35")
    assert title == "Most adults say voting will be easy"
    assert t.rows == ()


def test_chart2text_arity_error():
    with pytest.raises(InconsistentArity):
        parse_chart2text_input("T Context: a & b <SEP> x & 1 & 2")


def test_opencqa_context():
    doc = parse_opencqa_context("What changed? Title: Views Context: Views <s> Good <s>  Bad  <s> 41")
    assert doc.title == "Views"
    assert doc.tokens == ("Views", "Good", "Bad", "41")


def test_collect_numbers_skips_labels():
    t = DataTable.from_rows(("Year", "A", "B"), [("2019", ["1", "n/a"]), ("2020", ["3%", "$4"])])
    assert collect_numbers(t) == [Decimal(1), Decimal(3), Decimal(4)]


@given(data_tables(numeric=True))
def test_collect_numbers_counts_every_numeric_cell(t):
    assert len(collect_numbers(t)) == sum(1 for _ in t.cells())


def test_annotation_dict_round_trip():
    a = ChartAnnotation(
        "bar",
        "T",
        (TextElement("x", BBox(0, 0, 5, 5), "category"),),
        (Mark("S", "x", Decimal("1.5"), "ff0000", BBox(0, 10, 5, 20)),),
        "Country",
    )
    assert ChartAnnotation.from_dict(a.to_dict()) == a


@pytest.mark.parametrize(
    "mark",
    [
        Mark("S", "x", Decimal(1), "ff00", BBox(0, 0, 1, 1)),
        Mark("S", "x", Decimal(1), "ff0000", BBox(0, 0, -1, 1)),
    ],
)
def test_annotation_rejects_bad_marks(mark):
    with pytest.raises(ValidationError):
        ChartAnnotation("bar", "T", (), (mark,))


def test_annotation_rejects_duplicate_series_category():
    m = Mark("S", "x", Decimal(1), "ff0000", BBox(0, 0, 1, 1))
    with pytest.raises(ValidationError):
        ChartAnnotation("bar", "T", (), (m, m))


@given(st.lists(st.integers(0, 10**6), max_size=5))
def test_number_cells_survive_formatting(values):
    t = DataTable.from_rows(("k", "v"), [(f"r{i}", [format_number(v)]) for i, v in enumerate(values)])
    assert collect_numbers(t) == [Decimal(v) for v in values]
