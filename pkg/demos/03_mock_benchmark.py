"""
A benchmark run without a model
===============================

Drive the runner with the echo backend on the bundled three-question fixture,
then resume into the same directory to show that nothing is recomputed.
"""

import tempfile
from pathlib import Path

from chartshot.bench import RunConfig, emit_report, run_experiment
from chartshot.llm_gateway import mock_llm

fixture = Path(__file__).resolve().parent.parent / "tests" / "fixtures" / "fcqa3"
out = Path(tempfile.mkdtemp()) / "run"

cfg = RunConfig("FCQA", str(fixture), mock="echo", output_dir=str(out))
report = run_experiment(cfg)
# the echo backend only knows the demonstrations, so every target gets the sentinel
print(emit_report(report, "table", "echo"))

backend = mock_llm("echo")
run_experiment(cfg, backend=backend)
print("calls on resume:", backend.calls)
print((out / "ledger.jsonl").read_text().splitlines()[0][:160])
