"""Built-in demonstration sets, loaded from the versioned JSON resources."""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

from ..errors import ValidationError
from .ccr import CcrTrace, parse_ccr
from .taxonomy import CsSource, CsType, FcqaCategory, LcqaType, Task

# LCQA answer-length bounds in words (principle: focused but complete answers)
LCQA_WORD_BOUNDS = (30, 220)


@dataclass(frozen=True)
class Demonstration:
    task: Task
    category: str
    input_block: str
    gold_output: str
    index: int = 0
    source: CsSource | None = None
    ccr: CcrTrace | None = None

    def __post_init__(self):
        if not self.input_block.strip() or not self.gold_output.strip():
            raise ValidationError("demonstration input and output must be non-empty")
        if self.task is Task.FCQA and self.ccr is None:
            object.__setattr__(self, "ccr", parse_ccr(self.gold_output))


_FILES = {Task.FCQA: "fcqa.json", Task.LCQA: "lcqa.json", Task.CS: "cs.json"}
_CATEGORY_ENUM = {Task.FCQA: FcqaCategory, Task.LCQA: LcqaType, Task.CS: CsType}


@lru_cache(maxsize=None)
def _load(task: Task) -> tuple[Demonstration, ...]:
    raw = json.loads(resources.files("chartshot.prompt_kit").joinpath("data", _FILES[task]).read_text("utf-8"))
    demos = []
    for d in raw["demonstrations"]:
        category = _CATEGORY_ENUM[task](d["category"]).value
        ccr = parse_ccr(d["output"], d["elements"]) if task is Task.FCQA else None
        demos.append(
            Demonstration(
                task=task,
                category=category,
                input_block=d["input"],
                gold_output=d["output"],
                index=d["index"],
                source=CsSource(d["source"]) if d.get("source") else None,
                ccr=ccr,
            )
        )
    return tuple(demos)


def builtin_demonstrations(task: Task | str, source: CsSource | str | None = None) -> list[Demonstration]:
    """Demonstrations in appendix-table order.

    For chart summarization, ``source`` picks the Pew or Statista triple;
    without it all six come back.
    """
    task = Task(task)
    demos = list(_load(task))
    if source is not None:
        if task is not Task.CS:
            raise ValidationError("only chart summarization demonstrations have a source")
        demos = [d for d in demos if d.source is CsSource(source)]
    return demos


def lint_demonstrations(task: Task | str, demos) -> list[str]:
    """Design-rule findings for a demonstration set (empty list = clean)."""
    task = Task(task)
    issues = []
    counts = Counter(d.category for d in demos)
    if task is Task.FCQA:
        needed = {c.value for c in FcqaCategory if c.needs_demonstration}
        for c in sorted(needed - set(counts)):
            issues.append(f"no demonstration for {c}")
    elif task is Task.LCQA:
        lo, hi = LCQA_WORD_BOUNDS
        for d in demos:
            n = len(d.gold_output.split())
            if not lo <= n <= hi:
                issues.append(f"demo {d.index}: answer has {n} words, outside [{lo}, {hi}]")
        for t in LcqaType:
            if counts[t.value] == 0:
                issues.append(f"no {t.value} question")
    else:
        for src in CsSource:
            have = {d.category for d in demos if d.source is src}
            if not have:
                continue
            for t in CsType:
                if t.value not in have:
                    issues.append(f"{src.value}: no {t.value} summary")
    return issues
