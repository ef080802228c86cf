"""Benchmark loaders.

Factoid QA directories hold one record file per split (``test_human.json``
and ``test_augmented.json``, or ``human.json``/``augmented.json``), each a
list of ``{"imgname", "query", "label"}`` records. A record may carry its
chart inline (``vdt`` text, ``annotation`` dict or ``svg`` markup); otherwise
``annotations/<stem>.json``, ``svgs/<stem>.svg`` or ``tables/<stem>.csv``
next to the record file supply it.

Long-form QA and summarization use a single JSON list or JSONL file of
records (or a directory holding ``test.json``/``test.jsonl``).
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from pathlib import Path

from ..chart_data import (
    ChartAnnotation,
    DataTable,
    OcrDocument,
    VisualDataTable,
    default_orientation,
    parse_chart2text_input,
    parse_opencqa_context,
    parse_vdt_text,
)
from ..errors import ChartshotError, SchemaError
from ..prompt_kit import CsSource, Task
from ..vdt_builder import build_vdt, parse_svg_chart

FCQA_SPLITS = ("augmented", "human")


@dataclass(frozen=True)
class FcqaSample:
    sample_id: str
    split: str
    question: str
    answer: str
    vdt: VisualDataTable | None = None

    @property
    def target_input(self) -> str:
        return self.question


@dataclass(frozen=True)
class LcqaSample:
    sample_id: str
    title: str
    ocr: OcrDocument
    question: str
    answer: str
    context: str

    @property
    def target_input(self) -> str:
        return f"{self.question} Title: {self.title} Context: {self.context}"


@dataclass(frozen=True)
class CsSample:
    sample_id: str
    source: CsSource
    title: str
    table: DataTable
    answer: str
    raw_input: str

    @property
    def target_input(self) -> str:
        return self.raw_input


def _read_records(path: Path) -> list:
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise SchemaError(f"cannot read records: {exc}", path) from exc
    try:
        if path.suffix == ".jsonl":
            return [json.loads(line) for line in text.splitlines() if line.strip()]
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc}", path) from exc
    if not isinstance(data, list):
        raise SchemaError("expected a list of records", path)
    return data


def _field(rec, name, path, index, *alts):
    for key in (name, *alts):
        value = rec.get(key) if isinstance(rec, dict) else None
        if isinstance(value, (int, float)) and not isinstance(value, bool):
            value = str(value)
        if isinstance(value, str) and value.strip():
            return value
    raise SchemaError(f"missing or empty field {name!r}", path, index)


def read_csv_table(text: str, title: str | None = None) -> DataTable:
    rows = [r for r in csv.reader(io.StringIO(text)) if r]
    if not rows:
        raise SchemaError("empty CSV table")
    headers, body = rows[0], rows[1:]
    return DataTable.from_rows(headers, [(r[0], r[1:]) for r in body], title)


def _uncolored(table: DataTable) -> VisualDataTable:
    return VisualDataTable(default_orientation(table), table, {})


def _chart_for(rec: dict, root: Path, path: Path, index: int) -> VisualDataTable | None:
    if rec.get("vdt"):
        return parse_vdt_text(rec["vdt"])
    if rec.get("annotation"):
        return build_vdt(ChartAnnotation.from_dict(rec["annotation"]))
    if rec.get("svg"):
        return build_vdt(parse_svg_chart(rec["svg"]))
    stem = Path(str(rec.get("imgname", ""))).stem
    if not stem:
        return None
    ann, svg, tbl = root / "annotations" / f"{stem}.json", root / "svgs" / f"{stem}.svg", root / "tables" / f"{stem}.csv"
    if ann.exists():
        return build_vdt(ChartAnnotation.from_dict(json.loads(ann.read_text(encoding="utf-8"))))
    if svg.exists():
        return build_vdt(parse_svg_chart(svg.read_text(encoding="utf-8")))
    if tbl.exists():
        return _uncolored(read_csv_table(tbl.read_text(encoding="utf-8")))
    return None


def _split_file(root: Path, split: str) -> Path | None:
    for name in (f"test_{split}.json", f"{split}.json", f"test_{split}.jsonl", f"{split}.jsonl"):
        if (root / name).exists():
            return root / name
    return None


def load_fcqa(path: str | Path, split: str = "all") -> list[FcqaSample]:
    root = Path(path)
    splits = FCQA_SPLITS if split == "all" else (split,)
    if split != "all" and split not in FCQA_SPLITS:
        raise SchemaError(f"unknown split {split!r}", root)
    samples = []
    found = False
    for s in splits:
        f = _split_file(root, s)
        if f is None:
            continue
        found = True
        for i, rec in enumerate(_read_records(f)):
            question = _field(rec, "query", f, i, "question")
            answer = _field(rec, "label", f, i, "answer")
            sid = str(rec.get("id") or f"{s}-{i}")
            try:
                vdt = _chart_for(rec, root, f, i)
            except ChartshotError as exc:
                raise SchemaError(f"bad chart data: {exc}", f, i) from exc
            samples.append(FcqaSample(sid, s, question, answer, vdt))
    if not found:
        raise SchemaError(f"no record file for split {split!r}", root)
    return samples


def _single_file(path: Path) -> Path:
    if path.is_dir():
        for name in ("test.json", "test.jsonl"):
            if (path / name).exists():
                return path / name
        raise SchemaError("no test.json or test.jsonl", path)
    return path


def load_lcqa(path: str | Path) -> list[LcqaSample]:
    f = _single_file(Path(path))
    samples = []
    for i, rec in enumerate(_read_records(f)):
        question = _field(rec, "question", f, i)
        answer = _field(rec, "answer", f, i, "abstractive_answer")
        context = _field(rec, "context", f, i, "ocr")
        title = rec.get("title") or ""
        samples.append(LcqaSample(str(rec.get("id") or i), title, parse_opencqa_context(context), question, answer, context))
    return samples


def _guess_source(raw: str) -> CsSource:
    # data tables ("a & b") come with the Statista half, OCR text with Pew
    return CsSource.STATISTA if "&" in raw.split("<SEP>", 1)[-1] else CsSource.PEW


def load_cs(path: str | Path) -> list[CsSample]:
    f = _single_file(Path(path))
    samples = []
    for i, rec in enumerate(_read_records(f)):
        raw = _field(rec, "input", f, i)
        summary = _field(rec, "summary", f, i, "target", "answer")
        try:
            title, table = parse_chart2text_input(raw)
            source = CsSource(rec["source"]) if rec.get("source") else _guess_source(raw)
        except (ChartshotError, ValueError) as exc:
            raise SchemaError(f"bad chart-to-text input: {exc}", f, i) from exc
        samples.append(CsSample(str(rec.get("id") or i), source, title, table, summary, raw))
    return samples


def load_dataset(task: Task | str, path: str | Path, split: str = "all") -> list:
    task = Task(task)
    if task is Task.FCQA:
        return load_fcqa(path, split)
    if split not in ("all", None):
        raise SchemaError("split only applies to factoid QA", path)
    return load_lcqa(path) if task is Task.LCQA else load_cs(path)
