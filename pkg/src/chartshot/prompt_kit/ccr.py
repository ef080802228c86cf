"""Chain-of-chart-reasoning traces: element tagging, validation, arithmetic audit."""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from decimal import Decimal
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from ..errors import ParseError, ValidationError
from .taxonomy import FcqaCategory

FINAL_ANSWER_RE = re.compile(r"the answer is\b[ \t]*([^\n]*?)[ \t]*(?:\.(?=\s|$)|$)", re.IGNORECASE | re.MULTILINE)


class ElementKind(str, enum.Enum):
    OperandVisual = "OperandVisual"
    OperandPlain = "OperandPlain"
    Operator = "Operator"
    Reasoning = "Reasoning"
    Result = "Result"


@dataclass(frozen=True)
class CcrElement:
    kind: ElementKind
    span: tuple[int, int]

    def text_of(self, text: str) -> str:
        return text[self.span[0] : self.span[1]]


@dataclass(frozen=True)
class CcrTrace:
    text: str
    elements: tuple[CcrElement, ...]
    final_answer: str

    def kinds(self) -> set[ElementKind]:
        return {e.kind for e in self.elements}


def find_final_answer(text: str):
    """Last ``The answer is X`` match, or None."""
    last = None
    for last in FINAL_ANSWER_RE.finditer(text):
        pass
    return last


_NUM_RE = re.compile(r"\d")
_EXPR_EQ_RE = re.compile(r"[\d)]\s*[-+*/×÷−]\s*[\d(].*?=\s*-?\d")
_REASONING_RE = re.compile(
    r"^\s*(since|because|therefore|thus)\b|[<>≥≤]|\b(greater|less|more|fewer|higher|lower|larger|smaller) than\b",
    re.IGNORECASE,
)
_VISUAL_RE = re.compile(
    r"\b(red|green|blue|yellow|orange|purple|violet|pink|brown|black|white|gr[ae]y|teal|navy|cyan|"
    r"magenta|olive|maroon|gold|left(most)?|right(most)?|top|bottom|first|last|bars?|lines?|slices?|colou?r)\b",
    re.IGNORECASE,
)


def _sentences(text: str) -> Iterable[tuple[int, int]]:
    # split on sentence punctuation followed by whitespace; decimals stay intact
    start = 0
    for m in re.finditer(r"[.!?](?=\s|$)|\n", text):
        end = m.end() if text[m.start()] != "\n" else m.start()
        if text[start:end].strip():
            lead = len(text[start:end]) - len(text[start:end].lstrip())
            yield start + lead, end
        start = m.end()
    if text[start:].strip():
        lead = len(text[start:]) - len(text[start:].lstrip())
        yield start + lead, len(text.rstrip())


def tag_elements(text: str) -> list[CcrElement]:
    """Sentence-level heuristic tagging for untagged (e.g. generated) CCR text."""
    out = []
    for s, e in _sentences(text):
        sent = text[s:e]
        if FINAL_ANSWER_RE.search(sent):
            m = find_final_answer(sent)
            kind = ElementKind.Result
            s = s + m.start()
        elif _EXPR_EQ_RE.search(sent):
            kind = ElementKind.Operator
        elif _REASONING_RE.search(sent):
            kind = ElementKind.Reasoning
        elif _NUM_RE.search(sent):
            kind = ElementKind.OperandVisual if _VISUAL_RE.search(sent) else ElementKind.OperandPlain
        else:
            continue
        out.append(CcrElement(kind, (s, e)))
    return out


def parse_ccr(text: str, segments: Sequence[Mapping] | None = None) -> CcrTrace:
    """Build a trace from CCR text.

    ``segments`` are hand-annotated ``{"kind", "text"}`` pieces located in
    order within ``text``; without them the elements are tagged heuristically.
    """
    m = find_final_answer(text)
    if m is None:
        raise ParseError(f"no 'The answer is ...' sentence in {text[:80]!r}")
    if text[m.end() :].strip():
        raise ParseError("text continues after the final-answer sentence")
    if segments is None:
        elements = tag_elements(text)
    else:
        elements, cursor = [], 0
        for seg in segments:
            i = text.find(seg["text"], cursor)
            if i < 0:
                raise ValidationError(f"segment {seg['text']!r} not found in CCR text")
            cursor = i + len(seg["text"])
            elements.append(CcrElement(ElementKind(seg["kind"]), (i, cursor)))
    _check_spans(elements, text, m)
    return CcrTrace(text, tuple(elements), m.group(1).strip())


def _check_spans(elements, text, final_match):
    hard = sorted(e.span for e in elements if e.kind in (ElementKind.Operator, ElementKind.Result))
    for (a0, a1), (b0, b1) in zip(hard, hard[1:]):
        if b0 < a1:
            raise ValidationError(f"overlapping operator/result spans {(a0, a1)} and {(b0, b1)}")
    for e in elements:
        if e.kind is ElementKind.Result:
            if not (e.span[0] <= final_match.start() and final_match.start() < e.span[1]):
                raise ValidationError("result span does not cover the final-answer sentence")


# Element kinds each category must show. A frozenset lists alternatives:
# either operand kind satisfies categories whose format names both.
_ANY_OPERAND = frozenset({ElementKind.OperandVisual, ElementKind.OperandPlain})
_R = frozenset({ElementKind.Result})
_OP = frozenset({ElementKind.Operator})
_REASON = frozenset({ElementKind.Reasoning})
_VIS = frozenset({ElementKind.OperandVisual})
_PLAIN = frozenset({ElementKind.OperandPlain})

REQUIRED_ELEMENTS: dict[FcqaCategory, tuple[frozenset, ...]] = {
    FcqaCategory.VisualRetrieval: (_R,),
    FcqaCategory.NumericalRetrieval: (_R,),
    FcqaCategory.CompositionalRetrieval: (_R,),
    FcqaCategory.ComplexRetrieval: (_ANY_OPERAND, _REASON, _R),
    FcqaCategory.AddSubtract: (_PLAIN, _OP, _R),
    FcqaCategory.DivideMultiply: (_PLAIN, _OP, _R),
    FcqaCategory.VisualReasoning: (_VIS, _OP, _R),
    FcqaCategory.CompositionalReasoning: (_ANY_OPERAND, _OP, _R),
    FcqaCategory.Boolean: (_ANY_OPERAND, _OP, _REASON, _R),
}


@dataclass(frozen=True)
class MissingElement:
    kinds: tuple[ElementKind, ...]

    def __str__(self):
        return f"MissingElement({'|'.join(k.value for k in self.kinds)})"


def validate_ccr(category: FcqaCategory, trace: CcrTrace | str) -> list[MissingElement]:
    if isinstance(trace, str):
        trace = parse_ccr(trace)
    present = trace.kinds()
    violations = []
    for group in REQUIRED_ELEMENTS[FcqaCategory(category)]:
        if not group & present:
            violations.append(MissingElement(tuple(sorted(group, key=lambda k: list(ElementKind).index(k)))))
    return violations


# --- arithmetic audit --------------------------------------------------------

_STATED_RE = re.compile(r"=\s*(-?\d+(?:\.\d+)?)\s*%?")
_EXPR_CHARS = set("0123456789.()+-*/×÷− \t")
_TOKEN_RE = re.compile(r"\d+(?:\.\d+)?|\.\d+|[-+*/×÷−()]")


@dataclass(frozen=True)
class ArithmeticCheck:
    expression: str
    stated: Decimal
    computed: Fraction | None
    ok: bool
    skipped: bool = False


class _ExprParser:
    def __init__(self, text: str):
        stripped = re.sub(r"\s+", "", text)
        self.tokens = _TOKEN_RE.findall(stripped)
        if "".join(self.tokens) != stripped:
            raise ValueError("stray characters")
        self.i = 0
        self.n_ops = 0

    def parse(self) -> Fraction:
        value = self._sum()
        if self.i != len(self.tokens):
            raise ValueError("trailing tokens")
        return value

    def _peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def _take(self):
        tok = self._peek()
        if tok is None:
            raise ValueError("unexpected end")
        self.i += 1
        return tok

    def _sum(self):
        value = self._product()
        while self._peek() in ("+", "-", "−"):
            op = self._take()
            self.n_ops += 1
            rhs = self._product()
            value = value + rhs if op == "+" else value - rhs
        return value

    def _product(self):
        value = self._unary()
        while self._peek() in ("*", "/", "×", "÷"):
            op = self._take()
            self.n_ops += 1
            rhs = self._unary()
            if op in ("/", "÷"):
                if rhs == 0:
                    raise ValueError("division by zero")
                value = value / rhs
            else:
                value = value * rhs
        return value

    def _unary(self):
        if self._peek() in ("-", "−"):
            self._take()
            return -self._unary()
        tok = self._take()
        if tok == "(":
            value = self._sum()
            if self._take() != ")":
                raise ValueError("unbalanced parenthesis")
            return value
        if tok[0].isdigit() or tok[0] == ".":
            return Fraction(Decimal(tok))
        raise ValueError(f"unexpected token {tok!r}")


def _evaluate(candidate: str) -> tuple[str, Fraction] | None:
    """Longest suffix of ``candidate`` that parses with at least one operator."""
    tokens = candidate.split()
    for start in range(len(tokens)):
        expr = " ".join(tokens[start:])
        try:
            p = _ExprParser(expr)
            value = p.parse()
        except (ValueError, ZeroDivisionError):
            continue
        if p.n_ops:
            return expr, value
        return None
    return None


def verify_ccr_arithmetic(trace: CcrTrace | str) -> list[ArithmeticCheck]:
    """Check every ``<expression> = <number>`` claim in a CCR text.

    A claim passes when the exact value rounds to the stated number at its
    stated precision (within half a unit of the last stated decimal).
    Candidates without a parseable expression come back with ``skipped``.
    """
    text = trace.text if isinstance(trace, CcrTrace) else trace
    checks = []
    for m in _STATED_RE.finditer(text):
        j = m.start()
        while j > 0 and text[j - 1] in _EXPR_CHARS:
            j -= 1
        candidate = text[j : m.start()].strip()
        stated_raw = m.group(1)
        stated = Decimal(stated_raw)
        found = _evaluate(candidate) if candidate else None
        if found is None:
            checks.append(ArithmeticCheck(candidate, stated, None, False, skipped=True))
            continue
        expr, value = found
        decimals = len(stated_raw.split(".")[1]) if "." in stated_raw else 0
        tolerance = Fraction(1, 2 * 10**decimals)
        ok = abs(value - Fraction(stated)) <= tolerance
        checks.append(ArithmeticCheck(expr, stated, value, ok))
    return checks
