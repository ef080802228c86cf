"""Answer extraction, relaxed accuracy, table-similarity metrics, consistency check."""

from __future__ import annotations

import enum
import logging
from dataclasses import asdict, dataclass, field
from decimal import Decimal
from fractions import Fraction
from typing import Sequence

import numpy as np
from rapidfuzz.distance import Levenshtein
from scipy.optimize import linear_sum_assignment

from .chart_data import DataTable, collect_numbers, parse_number
from .errors import GatewayError, ValidationError
from .prompt_kit.ccr import find_final_answer

log = logging.getLogger(__name__)

EPS = Fraction(1, 10**9)
DEFAULT_TOL = Decimal("0.05")
_QUOTES = "\"'“”‘’`"
_TRAILING = ".,;:!?"
_BOOLEANS = {"yes": True, "true": True, "no": False, "false": False}


class AnswerKind(str, enum.Enum):
    Numeric = "Numeric"
    Boolean = "Boolean"
    Text = "Text"


@dataclass(frozen=True)
class ExtractedAnswer:
    raw: str
    kind: AnswerKind
    value: Decimal | bool | str

    @classmethod
    def normalize(cls, raw: str) -> "ExtractedAnswer":
        text = raw.strip()
        for _ in range(3):  # quotes and punctuation can nest: '"5".'
            text = text.strip(_QUOTES).strip().rstrip(_TRAILING).strip()
        if text.lower() in _BOOLEANS:
            return cls(text, AnswerKind.Boolean, _BOOLEANS[text.lower()])
        num = parse_number(text)
        if num is not None:
            return cls(text, AnswerKind.Numeric, num)
        return cls(text, AnswerKind.Text, text)

    def __str__(self):
        if self.kind is AnswerKind.Boolean:
            return "Yes" if self.value else "No"
        return self.raw


def extract_final_answer(completion: str) -> ExtractedAnswer:
    """Last ``The answer is X`` in the completion, else its last non-empty line."""
    m = find_final_answer(completion)
    if m is not None:
        raw = m.group(1)
    else:
        lines = [ln for ln in completion.splitlines() if ln.strip()]
        raw = lines[-1] if lines else ""
    return ExtractedAnswer.normalize(raw)


def relaxed_match(pred: ExtractedAnswer | str, gold: str, tol: Decimal | str | float = DEFAULT_TOL) -> bool:
    """Relaxed-accuracy rule: numbers within ``tol`` of gold (relative), else string equality.

    A zero gold value needs an exact match. Arithmetic is exact decimal.
    """
    tol = Decimal(str(tol))
    if tol < 0:
        raise ValidationError("tolerance must be >= 0")
    if isinstance(pred, str):
        pred = ExtractedAnswer.normalize(pred)
    g = ExtractedAnswer.normalize(gold)
    if pred.kind is AnswerKind.Numeric and g.kind is AnswerKind.Numeric:
        if g.value == 0:
            return pred.value == 0
        return abs(pred.value - g.value) <= tol * abs(g.value)
    if pred.kind is AnswerKind.Boolean and g.kind is AnswerKind.Boolean:
        return pred.value == g.value
    return pred.raw.strip().lower() == g.raw.strip().lower()


# --- table similarity ---------------------------------------------------------------


def normalized_levenshtein(a: str, b: str) -> Fraction:
    longest = max(len(a), len(b))
    if longest == 0:
        return Fraction(0)
    return Fraction(Levenshtein.distance(a, b), longest)


def _relative_distance(p: Fraction, g: Fraction) -> Fraction:
    return min(Fraction(1), abs(p - g) / max(abs(g), EPS))


def _solve(matrix: list[list[Fraction]], maximize: bool) -> list[tuple[int, int]]:
    # float solve, then the caller rescores the chosen pairs exactly
    if not matrix or not matrix[0]:
        return []
    rows, cols = linear_sum_assignment(np.array(matrix, dtype=float), maximize=maximize)
    return list(zip(rows.tolist(), cols.tolist()))


def rnss(pred: DataTable, gold: DataTable) -> Fraction:
    """Relative number set similarity between the numeric cells of two tables."""
    P = [Fraction(x) for x in collect_numbers(pred)]
    G = [Fraction(x) for x in collect_numbers(gold)]
    n = max(len(P), len(G))
    if n == 0:
        return Fraction(1)
    one = Fraction(1)
    cost = [[_relative_distance(P[i], G[j]) if i < len(P) and j < len(G) else one for j in range(n)] for i in range(n)]
    total = sum((cost[i][j] for i, j in _solve(cost, maximize=False)), Fraction(0))
    return 1 - total / n


@dataclass(frozen=True)
class _Entry:
    key: str
    raw: str
    value: Fraction | None


def _entries(t: DataTable) -> list[_Entry]:
    return [
        _Entry(f"{row} {col}", cell.raw, Fraction(cell.numeric) if cell.numeric is not None else None)
        for row, col, cell in t.cells()
    ]


def entry_similarity(p: _Entry, g: _Entry) -> Fraction:
    key_sim = 1 - normalized_levenshtein(p.key, g.key)
    if p.value is not None and g.value is not None:
        value_sim = 1 - _relative_distance(p.value, g.value)
    else:
        value_sim = Fraction(int(p.raw.strip().lower() == g.raw.strip().lower()))
    return key_sim * value_sim


def rms_f1(pred: DataTable, gold: DataTable) -> tuple[Fraction, Fraction, Fraction]:
    """Relative mapping similarity as (precision, recall, f1).

    Entries are ``(row label, column header, value)``; keys compare as
    ``"row col"`` strings. Cells that are not numbers match only on equal text.
    """
    P, G = _entries(pred), _entries(gold)
    if not P and not G:
        return Fraction(1), Fraction(1), Fraction(1)
    if not P or not G:
        return Fraction(0), Fraction(0), Fraction(0)
    sim = [[entry_similarity(p, g) for g in G] for p in P]
    total = sum((sim[i][j] for i, j in _solve(sim, maximize=True)), Fraction(0))
    precision, recall = total / len(P), total / len(G)
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else Fraction(0)
    return precision, recall, f1


# --- per-sample records and aggregate report -----------------------------------------


@dataclass
class EvalRecord:
    sample_id: str
    prompt_hash: str
    completion: str | None
    extracted: str | None
    gold: str
    split: str | None = None
    match: bool | None = None
    rnss: float | None = None
    rms_precision: float | None = None
    rms_recall: float | None = None
    rms_f1: float | None = None
    reference_similarity: float | None = None
    error: str | None = None
    latency_ms: float | None = field(default=None, compare=False)

    def to_dict(self, with_timing: bool = False) -> dict:
        d = asdict(self)
        if not with_timing:
            d.pop("latency_ms")
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "EvalRecord":
        return cls(**d)


def _mean(values):
    values = [v for v in values if v is not None]
    return sum(values) / len(values) if values else None


@dataclass
class MetricReport:
    relaxed_accuracy: float | None
    rnss: float | None
    rms_precision: float | None
    rms_recall: float | None
    rms_f1: float | None
    n_samples: int
    per_sample: list[EvalRecord]

    @classmethod
    def from_records(cls, records: Sequence[EvalRecord]) -> "MetricReport":
        records = list(records)
        matches = [float(r.match) for r in records if r.match is not None]
        return cls(
            relaxed_accuracy=_mean(matches),
            rnss=_mean(r.rnss for r in records),
            rms_precision=_mean(r.rms_precision for r in records),
            rms_recall=_mean(r.rms_recall for r in records),
            rms_f1=_mean(r.rms_f1 for r in records),
            n_samples=len(records),
            per_sample=records,
        )

    def split_accuracy(self, split: str) -> float | None:
        return _mean(float(r.match) for r in self.per_sample if r.split == split and r.match is not None)

    @property
    def n_errors(self) -> int:
        return sum(r.error is not None for r in self.per_sample)


# --- demonstration consistency ---------------------------------------------------------


@dataclass(frozen=True)
class ConsistencyResult:
    demo_index: int
    similarity: float
    passed: bool
    source: str | None = None
    error: str | None = None


def _squash(s: str) -> str:
    return " ".join(s.split())


def text_similarity(a: str, b: str) -> Fraction:
    return 1 - normalized_levenshtein(_squash(a), _squash(b))


def consistency_check(task, backend, similarity_threshold: float = 0.9, model_id: str = "mock") -> list[ConsistencyResult]:
    """Ask the backend to answer each built-in demonstration's own input.

    ``backend`` is a :class:`CompletionClient` or a bare backend with
    ``send``. A failing call is recorded with similarity 0 and the batch
    continues.
    """
    from .llm_gateway import CompletionClient, CompletionRequest
    from .prompt_kit import Mode, Task, assemble_prompt, build_prompt_spec, builtin_demonstrations

    task = Task(task)
    client = backend if isinstance(backend, CompletionClient) else CompletionClient(backend, sleep=lambda _: None)
    out = []
    for demo in builtin_demonstrations(task):
        spec = build_prompt_spec(task, Mode.FewShot, demo.input_block, source=demo.source)
        req = CompletionRequest(model_id, assemble_prompt(spec))
        try:
            text = client.complete(req).text
        except GatewayError as exc:
            log.warning("demo %d: %s", demo.index, exc)
            out.append(ConsistencyResult(demo.index, 0.0, False, getattr(demo.source, "value", None), str(exc)))
            continue
        sim = text_similarity(text, demo.gold_output)
        out.append(ConsistencyResult(demo.index, float(sim), sim >= Fraction(str(similarity_threshold)), getattr(demo.source, "value", None)))
    return sorted(out, key=lambda r: r.demo_index)
