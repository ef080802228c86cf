"""Experiment loop with an append-only, resumable ledger."""

from __future__ import annotations

import json
import logging
import os
import random
from dataclasses import dataclass, fields
from pathlib import Path

from ..answer_eval import EvalRecord, MetricReport, extract_final_answer, relaxed_match, text_similarity
from ..chart_data import render_vdt_text
from ..errors import GatewayError, ValidationError
from ..llm_gateway import (
    DEFAULT_API_KEY_ENV,
    CompletionClient,
    CompletionRequest,
    DecodingParams,
    HttpBackend,
    ReplayBackend,
    ResponseCache,
    RetryPolicy,
    TokenBucket,
    mock_llm,
)
from ..prompt_kit import Mode, Task, assemble_prompt, build_prompt_spec
from .datasets import load_dataset
from .report import emit_report

log = logging.getLogger(__name__)

LEDGER = "ledger.jsonl"
TIMINGS = "timings.jsonl"
REPORT = "report.txt"
RECORDS = "records.jsonl"
ENDPOINT_ENV = "CHARTSHOT_ENDPOINT"


@dataclass
class RunConfig:
    task: Task
    dataset_path: str
    mode: Mode = Mode.FewShot
    split: str | None = None
    model_id: str | None = None
    mock: str | None = None  # "echo" or "replay:<table.json>"
    endpoint: str | None = None
    api_key_env: str = DEFAULT_API_KEY_ENV
    cache_path: str | None = None
    output_dir: str = "runs/latest"
    seed: int = 0
    limit: int | None = None
    shots: int | None = None
    tol: str = "0.05"
    max_attempts: int = 3
    requests_per_second: float | None = None

    def __post_init__(self):
        self.task, self.mode = Task(self.task), Mode(self.mode)
        if self.split is not None and self.task is not Task.FCQA:
            raise ValidationError("split is only valid for factoid QA")
        if self.task is Task.FCQA and self.split is None:
            self.split = "all"
        if self.split not in (None, "all", "human", "augmented"):
            raise ValidationError(f"unknown split {self.split!r}")
        if self.mock is None and not self.model_id:
            raise ValidationError("model_id is required unless a mock backend is used")
        if self.limit is not None and self.limit < 0:
            raise ValidationError("limit must be >= 0")
        if self.mode is Mode.ZeroShot and self.shots:
            raise ValidationError("zero-shot runs take no shots")

    @classmethod
    def from_mapping(cls, d: dict) -> "RunConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ValidationError(f"unknown config keys: {sorted(unknown)}")
        return cls(**d)


def make_backend(cfg: RunConfig):
    if cfg.mock:
        kind, _, arg = cfg.mock.partition(":")
        if kind == "replay" and arg:
            return ReplayBackend.load(arg)
        return mock_llm(kind)
    endpoint = cfg.endpoint or os.environ.get(ENDPOINT_ENV)
    if not endpoint:
        raise ValidationError(f"no endpoint configured (set endpoint or {ENDPOINT_ENV})")
    return HttpBackend(endpoint, cfg.api_key_env)


def select_samples(samples: list, seed: int, limit: int | None) -> list:
    """Seeded subset (kept in dataset order) when ``limit`` is set."""
    if limit is None or limit >= len(samples):
        return list(samples)
    picked = set(random.Random(seed).sample(range(len(samples)), limit))
    return [s for i, s in enumerate(samples) if i in picked]


def read_ledger(path: Path) -> dict[str, EvalRecord]:
    done = {}
    if path.exists():
        with path.open(encoding="utf-8") as fh:
            for line in fh:
                if line.strip():
                    rec = EvalRecord.from_dict(json.loads(line))
                    done.setdefault(rec.sample_id, rec)
    return done


def prompt_for(cfg: RunConfig, sample) -> str:
    kwargs = {"shots": cfg.shots}
    if cfg.task is Task.FCQA and sample.vdt is not None:
        kwargs["table"] = render_vdt_text(sample.vdt)
    if cfg.task is Task.CS:
        kwargs["source"] = sample.source
    return assemble_prompt(build_prompt_spec(cfg.task, cfg.mode, sample.target_input, **kwargs))


def evaluate_sample(cfg: RunConfig, sample, client: CompletionClient, params: DecodingParams) -> EvalRecord:
    req = CompletionRequest(cfg.model_id or "mock", prompt_for(cfg, sample), params)
    split = getattr(sample, "split", None)
    try:
        resp = client.complete(req)
    except GatewayError as exc:
        log.warning("sample %s failed: %s", sample.sample_id, exc)
        return EvalRecord(
            sample.sample_id, req.cache_key, None, None, sample.answer, split,
            match=False if cfg.task is Task.FCQA else None, error=f"{type(exc).__name__}: {exc}",
        )
    rec = EvalRecord(sample.sample_id, req.cache_key, resp.text, None, sample.answer, split, latency_ms=resp.latency_ms)
    if cfg.task is Task.FCQA:
        pred = extract_final_answer(resp.text)
        rec.extracted = str(pred)
        rec.match = relaxed_match(pred, sample.answer, cfg.tol)
    else:
        rec.reference_similarity = float(text_similarity(resp.text, sample.answer))
    return rec


def run_experiment(cfg: RunConfig, backend=None, client: CompletionClient | None = None) -> MetricReport:
    """Evaluate every selected sample, skipping those already in the ledger.

    Records are appended and flushed one at a time; wall-clock timings go to
    a separate file so the ledger itself is reproducible.
    """
    samples = select_samples(load_dataset(cfg.task, cfg.dataset_path, cfg.split or "all"), cfg.seed, cfg.limit)
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    ledger_path = out / LEDGER
    done = read_ledger(ledger_path)

    if client is None:
        limiter = TokenBucket(cfg.requests_per_second) if cfg.requests_per_second else None
        cache = ResponseCache(cfg.cache_path) if cfg.cache_path else None
        client = CompletionClient(
            backend or make_backend(cfg), cache, RetryPolicy(max_attempts=cfg.max_attempts), limiter
        )
    params = DecodingParams()

    todo = [s for s in samples if s.sample_id not in done]
    log.info("%d samples selected, %d already in ledger", len(samples), len(samples) - len(todo))
    with ledger_path.open("a", encoding="utf-8") as ledger, (out / TIMINGS).open("a", encoding="utf-8") as timings:
        for s in todo:
            rec = evaluate_sample(cfg, s, client, params)
            ledger.write(json.dumps(rec.to_dict(), sort_keys=True, ensure_ascii=False) + "\n")
            ledger.flush()
            timings.write(json.dumps({"sample_id": rec.sample_id, "latency_ms": rec.latency_ms}) + "\n")
            timings.flush()
            done[rec.sample_id] = rec

    report = MetricReport.from_records([done[s.sample_id] for s in samples])
    label = f"{cfg.task.value} {cfg.mode.value}" + (f" {cfg.shots}-shot" if cfg.shots else "")
    (out / REPORT).write_text(emit_report(report, "table", label), encoding="utf-8")
    (out / RECORDS).write_text(emit_report(report, "records"), encoding="utf-8")
    return report
