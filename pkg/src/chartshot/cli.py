"""Command-line entry point (``chartshot``)."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .answer_eval import consistency_check, rms_f1, rnss
from .chart_data import ChartAnnotation, parse_vdt_text, render_vdt_text
from .errors import ChartshotError
from .prompt_kit import Mode, Task, assemble_prompt, build_prompt_spec

log = logging.getLogger("chartshot")


def _load_config(path: str) -> dict:
    text = Path(path).read_text(encoding="utf-8")
    if path.endswith((".yaml", ".yml")):
        import yaml

        data = yaml.safe_load(text) or {}
    else:
        data = json.loads(text)
    if not isinstance(data, dict):
        raise ChartshotError(f"config {path} must hold a mapping")
    return data


def _text_arg(value: str) -> str:
    """``@path`` reads the text from a file."""
    if value.startswith("@"):
        return Path(value[1:]).read_text(encoding="utf-8").rstrip("\n")
    return value


def _read_table(path: str):
    from .bench.datasets import read_csv_table

    text = Path(path).read_text(encoding="utf-8")
    if path.endswith(".csv"):
        return read_csv_table(text)
    return parse_vdt_text(text.strip()).table


def cmd_run(args) -> int:
    from .bench import RunConfig, emit_report, run_experiment

    flags = {
        "task": args.task,
        "mode": args.mode,
        "shots": args.shots,
        "dataset_path": args.dataset,
        "split": args.split,
        "model_id": args.model,
        "mock": args.mock,
        "endpoint": args.endpoint,
        "cache_path": args.cache,
        "seed": args.seed,
        "limit": args.limit,
        "output_dir": args.out,
    }
    merged = {k: v for k, v in flags.items() if v is not None}
    if args.config:
        merged.update(_load_config(args.config))  # config wins over flags
    if "task" not in merged or "dataset_path" not in merged:
        raise ChartshotError("run needs --task and --dataset (or both in --config)")
    cfg = RunConfig.from_mapping(merged)
    report = run_experiment(cfg)
    sys.stdout.write(emit_report(report, "table", f"{cfg.task.value} {cfg.mode.value}"))
    return 0


def cmd_prompt_dump(args) -> int:
    spec = build_prompt_spec(
        args.task,
        args.mode,
        _text_arg(args.input),
        source=args.source,
        shots=args.shots,
        table=_text_arg(args.table) if args.table else None,
    )
    sys.stdout.write(assemble_prompt(spec) + "\n")
    return 0


def cmd_gen_charts(args) -> int:
    from .bench import generate_synthetic_charts

    manifest = generate_synthetic_charts(args.n, args.seed, args.out)
    print(f"wrote {len(manifest['charts'])} charts to {args.out}")
    return 0


def cmd_vdt_build(args) -> int:
    from .vdt_builder import ColorPalette, OverrideTable, build_vdt, default_overrides, parse_svg_chart

    text = Path(args.path).read_text(encoding="utf-8")
    if args.path.endswith(".json"):
        ann = ChartAnnotation.from_dict(json.loads(text))
    else:
        ann = parse_svg_chart(text)
    palette = ColorPalette.from_file(args.palette) if args.palette else None
    overrides = OverrideTable.from_file(args.overrides) if args.overrides else default_overrides()
    print(render_vdt_text(build_vdt(ann, palette, overrides)))
    return 0


def cmd_score(args) -> int:
    pred, gold = _read_table(args.pred), _read_table(args.gold)
    p, r, f = rms_f1(pred, gold)
    print(f"RNSS\t{float(rnss(pred, gold)):.4f}")
    print(f"RMS-P\t{float(p):.4f}\nRMS-R\t{float(r):.4f}\nRMS-F1\t{float(f):.4f}")
    return 0


def cmd_consistency(args) -> int:
    from .bench.runner import RunConfig, make_backend

    cfg = RunConfig(
        args.task, dataset_path="", model_id=args.model, mock=args.mock, endpoint=args.endpoint
    )
    results = consistency_check(args.task, make_backend(cfg), args.threshold, args.model or "mock")
    print("demo\tsource\tsimilarity\tpass")
    for r in results:
        print(f"{r.demo_index}\t{r.source or '-'}\t{r.similarity:.4f}\t{'yes' if r.passed else 'no'}")
    return 0 if all(r.passed for r in results) else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="chartshot", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    tasks = [t.value for t in Task]
    modes = [m.value for m in Mode]

    run = sub.add_parser("run", help="evaluate a benchmark split")
    run.add_argument("--task", choices=tasks)
    run.add_argument("--mode", choices=modes)
    run.add_argument("--shots", type=int)
    run.add_argument("--dataset")
    run.add_argument("--split", choices=["human", "augmented", "all"])
    run.add_argument("--model")
    run.add_argument("--mock", help="echo | replay:<table.json>")
    run.add_argument("--endpoint")
    run.add_argument("--cache")
    run.add_argument("--seed", type=int)
    run.add_argument("--limit", type=int)
    run.add_argument("--out")
    run.add_argument("--config", help="JSON or YAML file; its keys override flags")
    run.set_defaults(func=cmd_run)

    dump = sub.add_parser("prompt-dump", help="print an assembled prompt")
    dump.add_argument("--task", choices=tasks, required=True)
    dump.add_argument("--mode", choices=modes, default="FewShot")
    dump.add_argument("--shots", type=int)
    dump.add_argument("--source", choices=["Pew", "Statista"])
    dump.add_argument("--input", required=True, help="target input text, or @file")
    dump.add_argument("--table", help="VDT text placed before the question, or @file")
    dump.set_defaults(func=cmd_prompt_dump)

    gen = sub.add_parser("gen-charts", help="write synthetic SVG charts with ground truth")
    gen.add_argument("--n", type=int, default=10)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", required=True)
    gen.set_defaults(func=cmd_gen_charts)

    vdt = sub.add_parser("vdt-build", help="SVG or annotation JSON -> VDT text")
    vdt.add_argument("path")
    vdt.add_argument("--palette")
    vdt.add_argument("--overrides")
    vdt.set_defaults(func=cmd_vdt_build)

    score = sub.add_parser("score", help="RNSS and RMS between two tables (VDT text or CSV)")
    score.add_argument("pred")
    score.add_argument("gold")
    score.set_defaults(func=cmd_score)

    cons = sub.add_parser("consistency", help="regenerate each demonstration's own answer")
    cons.add_argument("--task", choices=tasks, required=True)
    cons.add_argument("--model")
    cons.add_argument("--mock")
    cons.add_argument("--endpoint")
    cons.add_argument("--threshold", type=float, default=0.9)
    cons.set_defaults(func=cmd_consistency)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ChartshotError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
