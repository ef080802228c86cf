"""Report rendering: an accuracy table and one-record-per-line output."""

from __future__ import annotations

import json
from decimal import ROUND_HALF_EVEN, Decimal, localcontext
from fractions import Fraction

from ..answer_eval import MetricReport

TABLE_COLUMNS = ("Run", "N", "Errors", "Aug.", "Human", "Avg.", "Ref. sim.")
FORMATS = ("table", "records")


def _percent(x: Fraction | None) -> str:
    if x is None:
        return "-"
    with localcontext() as ctx:
        ctx.prec = 40
        d = Decimal(x.numerator) * 100 / Decimal(x.denominator)
    return str(d.quantize(Decimal("0.01"), rounding=ROUND_HALF_EVEN))


def split_average(*accuracies) -> Decimal:
    """Mean of per-split accuracies, exact in decimal (the Avg. column)."""
    values = [Decimal(str(a)) for a in accuracies]
    return sum(values) / len(values)


def split_accuracies(report: MetricReport) -> dict[str, Fraction]:
    out = {}
    for split in ("augmented", "human"):
        rows = [r for r in report.per_sample if r.split == split and r.match is not None]
        if rows:
            out[split] = Fraction(sum(bool(r.match) for r in rows), len(rows))
    return out


def _table(report: MetricReport, label: str) -> str:
    header = "| " + " | ".join(TABLE_COLUMNS) + " |"
    rule = "|" + "|".join("-" * (len(c) + 2) for c in TABLE_COLUMNS) + "|"
    if report.n_samples == 0:
        return f"{header}\n{rule}\n"
    acc = split_accuracies(report)
    avg = sum(acc.values(), Fraction(0)) / len(acc) if acc else None
    sims = [Fraction(r.reference_similarity) for r in report.per_sample if r.reference_similarity is not None]
    ref = sum(sims, Fraction(0)) / len(sims) if sims else None
    cells = (
        label,
        str(report.n_samples),
        str(report.n_errors),
        _percent(acc.get("augmented")),
        _percent(acc.get("human")),
        _percent(avg),
        _percent(ref),
    )
    return f"{header}\n{rule}\n| " + " | ".join(cells) + " |\n"


def _records(report: MetricReport) -> str:
    return "".join(json.dumps(r.to_dict(), sort_keys=True, ensure_ascii=False) + "\n" for r in report.per_sample)


def emit_report(report: MetricReport, fmt: str = "table", label: str = "run") -> str:
    if fmt == "table":
        return _table(report, label)
    if fmt == "records":
        return _records(report)
    raise ValueError(f"unknown report format {fmt!r}; expected one of {FORMATS}")
