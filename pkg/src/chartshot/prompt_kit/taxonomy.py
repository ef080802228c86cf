"""Task kinds and the factoid question taxonomy."""

from __future__ import annotations

import enum
import re


class Task(str, enum.Enum):
    FCQA = "FCQA"  # factoid chart QA
    LCQA = "LCQA"  # long-form chart QA
    CS = "CS"  # chart summarization


class CsSource(str, enum.Enum):
    PEW = "Pew"
    STATISTA = "Statista"


class FcqaCategory(str, enum.Enum):
    VisualRetrieval = "VisualRetrieval"
    NumericalRetrieval = "NumericalRetrieval"
    CompositionalRetrieval = "CompositionalRetrieval"
    ComplexRetrieval = "ComplexRetrieval"
    AddSubtract = "AddSubtract"
    DivideMultiply = "DivideMultiply"
    VisualReasoning = "VisualReasoning"
    CompositionalReasoning = "CompositionalReasoning"
    Boolean = "Boolean"

    @property
    def needs_demonstration(self) -> bool:
        return self not in _ZERO_SHOT_CAPABLE


_ZERO_SHOT_CAPABLE = {
    FcqaCategory.VisualRetrieval,
    FcqaCategory.NumericalRetrieval,
    FcqaCategory.CompositionalRetrieval,
}


class LcqaType(str, enum.Enum):
    DescribeAndSummary = "DescribeAndSummary"
    Comparative = "Comparative"
    Discover = "Discover"


class CsType(str, enum.Enum):
    PerceptualAndCognitive = "PerceptualAndCognitive"
    StatisticalAndComparative = "StatisticalAndComparative"
    VisualEncoding = "VisualEncoding"


# Question classifier rule table. Used for reporting only; it never changes
# which demonstrations go into a prompt.
CLASSIFIER_RULES_VERSION = 1

_BOOLEAN_LEAD = r"^(is|are|was|were|does|do|did|can|could|has|have|had|will|would|should)\b"
_COLORS = (
    r"red|green|blue|yellow|orange|purple|violet|pink|brown|black|white|gr[ae]y|teal|"
    r"navy|cyan|magenta|olive|maroon|gold|beige|colou?r(ed|s)?"
)
_POSITIONS = r"left(most)?|right(most)?|top|bottom|first|second|third|last|middle|upper|lower"
_WORDS = {
    "visual": rf"\b({_COLORS}|{_POSITIONS})\b",
    "divide": r"\b(ratio|times|divided?|division|multipl(y|ied|ication)|product|fold|proportion)\b",
    "addsub": (
        r"\b(average|mean|sum|total|difference|differ|increase[ds]?|decrease[ds]?|"
        r"gap|add(ed)?|subtract(ed)?|minus|plus|combined|change[ds]?)\b"
    ),
    "compositional": r"\b(all|each|every|peak|highest|lowest|maximum|minimum|max|min|largest|smallest|most|least)\b",
    "count": r"\bhow many\b",
    "threshold": r"\b(above|below|over|under|more than|less than|greater than|fewer than|exceed\w*)\b",
}
_RE = {k: re.compile(v) for k, v in _WORDS.items()}
_BOOL_RE = re.compile(_BOOLEAN_LEAD)


def classify_fcqa_question(q: str) -> FcqaCategory:
    """Heuristic category for a factoid question.

    Priority: yes/no surface form, then arithmetic categories (visual and
    compositional cues refine them), then the retrieval categories.
    """
    text = " ".join(q.lower().split())
    has = {k: bool(r.search(text)) for k, r in _RE.items()}
    if _BOOL_RE.search(text):
        return FcqaCategory.Boolean
    if has["divide"] or has["addsub"]:
        if has["compositional"]:
            return FcqaCategory.CompositionalReasoning
        if has["visual"]:
            return FcqaCategory.VisualReasoning
        return FcqaCategory.DivideMultiply if has["divide"] else FcqaCategory.AddSubtract
    if has["count"] and has["threshold"]:
        return FcqaCategory.ComplexRetrieval
    if has["visual"]:
        return FcqaCategory.VisualRetrieval
    if has["compositional"]:
        return FcqaCategory.CompositionalRetrieval
    return FcqaCategory.NumericalRetrieval
