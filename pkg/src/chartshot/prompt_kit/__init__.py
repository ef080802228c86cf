"""Prompt construction: task taxonomy, CCR traces, demonstrations, assembly."""

from .assemble import (
    BLOCK_LABELS,
    INSTRUCTIONS,
    Mode,
    PromptSpec,
    assemble_prompt,
    build_prompt_spec,
    target_block,
)
from .ccr import (
    ArithmeticCheck,
    CcrElement,
    CcrTrace,
    ElementKind,
    MissingElement,
    find_final_answer,
    parse_ccr,
    tag_elements,
    validate_ccr,
    verify_ccr_arithmetic,
)
from .registry import Demonstration, builtin_demonstrations, lint_demonstrations
from .taxonomy import CsSource, CsType, FcqaCategory, LcqaType, Task, classify_fcqa_question

__all__ = [
    "ArithmeticCheck",
    "BLOCK_LABELS",
    "CcrElement",
    "CcrTrace",
    "CsSource",
    "CsType",
    "Demonstration",
    "ElementKind",
    "FcqaCategory",
    "INSTRUCTIONS",
    "LcqaType",
    "MissingElement",
    "Mode",
    "PromptSpec",
    "Task",
    "assemble_prompt",
    "build_prompt_spec",
    "builtin_demonstrations",
    "classify_fcqa_question",
    "find_final_answer",
    "lint_demonstrations",
    "parse_ccr",
    "tag_elements",
    "target_block",
    "validate_ccr",
    "verify_ccr_arithmetic",
]
