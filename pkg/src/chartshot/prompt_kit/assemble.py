"""Zero- and few-shot prompt assembly."""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass

from ..errors import SpecInvariantViolation
from .registry import Demonstration, builtin_demonstrations
from .taxonomy import CsSource, Task


class Mode(str, enum.Enum):
    ZeroShot = "ZeroShot"
    FewShot = "FewShot"


INSTRUCTIONS = {
    Task.FCQA: "Answer the following question step by step.",
    Task.LCQA: "Answer the following question step by step by a single paragraph.",
    Task.CS: "Summarize the trends in the chart step by step and write the summary.",
}

# (input label, output label) per task
BLOCK_LABELS = {
    Task.FCQA: ("Question", "Answer"),
    Task.LCQA: ("Question", "Answer"),
    Task.CS: ("Input", "Summary"),
}

CANONICAL_SHOTS = {Task.FCQA: 6, Task.LCQA: 6, Task.CS: 3}
TABLE_LABEL = "Table"


@dataclass(frozen=True)
class PromptSpec:
    """Everything that determines a prompt's bytes.

    ``shots`` records an explicit demonstration-count override; when it is
    None a few-shot spec must carry the canonical count for its task.
    ``table`` is an optional VDT text placed before the target question.
    """

    task: Task
    mode: Mode
    target_input: str
    demonstrations: tuple[Demonstration, ...] = ()
    instruction: str = ""
    source: CsSource | None = None
    table: str | None = None
    shots: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "task", Task(self.task))
        object.__setattr__(self, "mode", Mode(self.mode))
        object.__setattr__(self, "demonstrations", tuple(self.demonstrations))
        if self.source is not None:
            object.__setattr__(self, "source", CsSource(self.source))
        if not self.instruction:
            object.__setattr__(self, "instruction", INSTRUCTIONS[self.task])
        self.check()

    def check(self):
        if not self.target_input.strip():
            raise SpecInvariantViolation("target_input is empty")
        if "\n" in self.instruction:
            raise SpecInvariantViolation("instruction must be a single line")
        demos = self.demonstrations
        if self.mode is Mode.ZeroShot:
            if demos:
                raise SpecInvariantViolation(f"zero-shot prompt given {len(demos)} demonstrations")
            return
        want = self.shots if self.shots is not None else CANONICAL_SHOTS[self.task]
        if want < 1:
            raise SpecInvariantViolation("few-shot prompt needs at least one demonstration")
        if len(demos) != want:
            raise SpecInvariantViolation(f"{self.task.value} few-shot prompt needs {want} demonstrations, got {len(demos)}")
        for d in demos:
            if d.task is not self.task:
                raise SpecInvariantViolation(f"{d.task.value} demonstration in a {self.task.value} prompt")
        if self.task is Task.CS:
            if self.source is None:
                raise SpecInvariantViolation("chart summarization few-shot prompt needs a source (Pew or Statista)")
            wrong = [d.index for d in demos if d.source is not self.source]
            if wrong:
                raise SpecInvariantViolation(f"demonstrations {wrong} are not from {self.source.value}")


def _block(task: Task, body: str, answer: str | None, table: str | None = None) -> str:
    q_label, a_label = BLOCK_LABELS[task]
    lines = []
    if table is not None:
        lines.append(f"{TABLE_LABEL}: {table}")
    lines.append(f"{q_label}: {body}")
    lines.append(f"{a_label}: {answer}" if answer is not None else f"{a_label}:")
    return "\n".join(lines)


def assemble_prompt(spec: PromptSpec) -> str:
    spec.check()
    parts = [spec.instruction]
    parts += [_block(spec.task, d.input_block, d.gold_output) for d in spec.demonstrations]
    parts.append(_block(spec.task, spec.target_input, None, spec.table))
    return "\n\n".join(parts)


def target_block(task: Task | str, target_input: str, table: str | None = None) -> str:
    """The trailing block of any prompt built for ``target_input``."""
    return _block(Task(task), target_input, None, table)


def build_prompt_spec(
    task: Task | str,
    mode: Mode | str,
    target_input: str,
    *,
    source: CsSource | str | None = None,
    shots: int | None = None,
    table: str | None = None,
) -> PromptSpec:
    """Spec using the built-in demonstrations.

    ``shots`` truncates the registry list, or cycles through it again when
    more shots are asked for than there are demonstrations.
    """
    task, mode = Task(task), Mode(mode)
    demos: tuple = ()
    if mode is Mode.FewShot:
        pool = builtin_demonstrations(task, source if task is Task.CS else None)
        if task is Task.CS and source is None:
            raise SpecInvariantViolation("chart summarization few-shot prompt needs a source (Pew or Statista)")
        n = CANONICAL_SHOTS[task] if shots is None else shots
        demos = tuple(itertools.islice(itertools.cycle(pool), n))
    return PromptSpec(task, mode, target_input, demos, source=source, table=table, shots=shots if mode is Mode.FewShot else None)
