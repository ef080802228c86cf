import json
from decimal import Decimal
from pathlib import Path

import pytest

from chartshot.answer_eval import MetricReport, rms_f1, rnss
from chartshot.bench import (
    RunConfig,
    emit_report,
    generate_synthetic_charts,
    load_dataset,
    run_experiment,
    select_samples,
    split_average,
)
from chartshot.bench.runner import prompt_for
from chartshot.chart_data import parse_vdt_text, render_vdt_text
from chartshot.errors import SchemaError, ValidationError
from chartshot.llm_gateway import CompletionRequest, ReplayBackend
from chartshot.prompt_kit import CsSource
from chartshot.vdt_builder import build_vdt, parse_svg_chart


def replay_for(cfg, key="mock_completion"):
    """Replay table answering each fixture sample with its scripted completion."""
    table = {}
    root = Path(cfg.dataset_path)
    raw = {}
    for f in root.glob("test_*.json"):
        for rec in json.loads(f.read_text(encoding="utf-8")):
            raw[rec["id"]] = rec
    for s in load_dataset(cfg.task, cfg.dataset_path, cfg.split or "all"):
        table[prompt_for(cfg, s)] = raw[s.sample_id][key]
    return ReplayBackend(table)


# --- datasets ----------------------------------------------------------------------


def test_load_fcqa_with_table_files(fixtures_dir):
    samples = load_dataset("FCQA", fixtures_dir / "fcqa_small")
    assert [(s.split, s.question, s.answer) for s in samples] == [
        ("augmented", "What's the ratio of Men and Women in 2019?", "0.7358"),
        ("human", "What is the value of Iraq?", "8.3"),
    ]
    assert render_vdt_text(samples[1].vdt).startswith("Country | Score <0x0A> Central African Republic | 8.5")
    assert [s.split for s in load_dataset("FCQA", fixtures_dir / "fcqa_small", "human")] == ["human"]


def test_load_cs_records(fixtures_dir):
    samples = load_dataset("CS", fixtures_dir / "cs_small.json")
    assert samples[0].title == "Share of households with internet access"
    assert samples[0].table.column_headers == ("Year", "Share")
    assert samples[0].source is CsSource.STATISTA
    assert samples[1].source is CsSource.PEW and samples[1].table.rows == ()


def test_load_lcqa_records(fixtures_dir):
    (s,) = load_dataset("LCQA", fixtures_dir / "lcqa_small.json")
    assert s.ocr.tokens[:3] == ("Views of the economy", "Good", "Bad")
    assert s.target_input.startswith("How did views of the economy change? Title: Views of the economy Context: ")


def test_missing_gold_is_schema_error(tmp_path):
    (tmp_path / "test_human.json").write_text(json.dumps([{"query": "Q?", "label": "1"}, {"query": "Q?"}]))
    with pytest.raises(SchemaError) as info:
        load_dataset("FCQA", tmp_path, "human")
    assert "record 1" in str(info.value) and "test_human.json" in str(info.value)


@pytest.mark.parametrize(
    "files, split",
    [({}, "all"), ({"test_human.json": "{not json"}, "human"), ({"test_human.json": '{"a": 1}'}, "human")],
)
def test_bad_dataset_layouts(tmp_path, files, split):
    for name, text in files.items():
        (tmp_path / name).write_text(text)
    with pytest.raises(SchemaError):
        load_dataset("FCQA", tmp_path, split)


def test_split_only_for_fcqa(fixtures_dir):
    with pytest.raises(SchemaError):
        load_dataset("CS", fixtures_dir / "cs_small.json", "human")
    with pytest.raises(ValidationError):
        RunConfig("LCQA", "x", split="human", mock="echo")


def test_seeded_subset():
    items = list(range(100))
    a = select_samples(items, 3, 10)
    assert a == select_samples(items, 3, 10) and a == sorted(a) and len(a) == 10
    assert a != select_samples(items, 4, 10)
    assert select_samples(items, 3, None) == items


# --- runs -----------------------------------------------------------------------------


def cfg3(fixtures_dir, tmp_path, **kw):
    return RunConfig("FCQA", str(fixtures_dir / "fcqa3"), mock="echo", output_dir=str(tmp_path / "run"), **kw)


def test_run_all_correct(fixtures_dir, tmp_path, golden_dir):
    cfg = cfg3(fixtures_dir, tmp_path)
    report = run_experiment(cfg, backend=replay_for(cfg))
    assert report.relaxed_accuracy == 1.0
    assert (tmp_path / "run" / "report.txt").read_text() == (golden_dir / "report_fcqa3_correct.txt").read_text()


def test_run_one_wrong(fixtures_dir, tmp_path, golden_dir):
    cfg = cfg3(fixtures_dir, tmp_path)
    report = run_experiment(cfg, backend=replay_for(cfg, "mock_wrong"))
    assert report.relaxed_accuracy == pytest.approx(2 / 3)
    assert emit_report(report, "table", "FCQA FewShot") == (golden_dir / "report_fcqa3_one_wrong.txt").read_text()


def test_records_form(fixtures_dir, tmp_path):
    cfg = cfg3(fixtures_dir, tmp_path)
    report = run_experiment(cfg, backend=replay_for(cfg, "mock_wrong"))
    lines = [json.loads(x) for x in emit_report(report, "records").splitlines()]
    assert [(r["sample_id"], r["split"], r["extracted"], r["match"]) for r in lines] == [
        ("a0", "augmented", "0.7358", True),
        ("h0", "human", "8.3", True),
        ("h1", "human", "6.2", False),
    ]
    samples = {s.sample_id: s for s in load_dataset("FCQA", cfg.dataset_path)}
    for r in lines:
        assert r["prompt_hash"] == CompletionRequest("mock", prompt_for(cfg, samples[r["sample_id"]])).cache_key
        assert "latency_ms" not in r


def test_empty_report_and_bad_format(golden_dir):
    empty = MetricReport.from_records([])
    assert emit_report(empty, "table") == (golden_dir / "report_empty.txt").read_text()
    assert emit_report(empty, "records") == ""
    with pytest.raises(ValueError):
        emit_report(empty, "xml")


def test_avg_column_is_mean_of_splits():
    assert split_average("81.44", "63.2") == Decimal("72.32")


def test_gateway_errors_recorded_not_dropped(fixtures_dir, tmp_path):
    class Down:
        def send(self, r):
            from chartshot.errors import TransportError

            raise TransportError("offline")

    cfg = cfg3(fixtures_dir, tmp_path, max_attempts=1)
    report = run_experiment(cfg, backend=Down())
    assert report.n_errors == 3 and report.relaxed_accuracy == 0.0
    assert "| 3 | 3 |" in (tmp_path / "run" / "report.txt").read_text()


def test_resume_skips_completed(fixtures_dir, tmp_path):
    cfg = cfg3(fixtures_dir, tmp_path)
    first = replay_for(cfg)
    run_experiment(cfg, backend=first)
    again = replay_for(cfg)
    run_experiment(cfg, backend=again)
    assert first.calls == 3 and again.calls == 0
    assert len((tmp_path / "run" / "ledger.jsonl").read_text().splitlines()) == 3


def test_lcqa_and_cs_runs(fixtures_dir, tmp_path):
    lc = RunConfig("LCQA", str(fixtures_dir / "lcqa_small.json"), mock="echo", output_dir=str(tmp_path / "lc"))
    r = run_experiment(lc)
    assert r.per_sample[0].reference_similarity is not None and r.relaxed_accuracy is None
    cs = RunConfig("CS", str(fixtures_dir / "cs_small.json"), mock="echo", output_dir=str(tmp_path / "cs"), mode="ZeroShot")
    assert run_experiment(cs).n_samples == 2


def test_config_validation():
    with pytest.raises(ValidationError):
        RunConfig("FCQA", "x")  # neither model nor mock
    with pytest.raises(ValidationError):
        RunConfig.from_mapping({"task": "FCQA", "dataset_path": "x", "mock": "echo", "colour": "red"})
    with pytest.raises(ValidationError):
        RunConfig("FCQA", "x", mock="echo", split="train")


# --- synthetic charts ------------------------------------------------------------------


def test_generator_is_deterministic(tmp_path):
    generate_synthetic_charts(10, 7, tmp_path / "a")
    generate_synthetic_charts(10, 7, tmp_path / "b")
    files = sorted(p.name for p in (tmp_path / "a").iterdir())
    assert len(files) == 31
    for name in files:
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_generator_closure():
    for entry in generate_synthetic_charts(40, 11)["charts"]:
        chart = entry["chart"]
        built = build_vdt(parse_svg_chart(chart.svg))
        assert render_vdt_text(built) == chart.vdt_text
        gold = parse_vdt_text(chart.vdt_text).table
        assert rnss(built.table, gold) == 1
        assert rms_f1(built.table, gold)[2] == 1


def test_generator_covers_chart_types():
    kinds = {e["chart_type"] for e in generate_synthetic_charts(60, 1)["charts"]}
    assert {"bar", "grouped_bar", "pie"} <= kinds and kinds & {"line", "multi_line"}


def test_generator_rejects_zero():
    with pytest.raises(ValueError):
        generate_synthetic_charts(0, 1)
