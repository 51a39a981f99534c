"""Command line entry point: ``claimtree <subcommand>``.

Exit codes: 0 success, 1 validation, 2 backend, 3 parse/repair exhaustion.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from collections.abc import Sequence
from pathlib import Path

from .errors import ClaimTreeError, ValidationError
from .pipeline import (PipelineConfig, build_gateway, dump_json, format_report, ingest_dataset, run_eval,
                       run_pipeline, write_threads)
from .summary import render_summary


def _common(p: argparse.ArgumentParser) -> None:
    # every default is None so config-file values are not masked
    p.add_argument("--config", type=Path, help="JSON file of PipelineConfig fields")
    p.add_argument("--backend", choices=["http", "scripted"])
    p.add_argument("--model")
    p.add_argument("--base-url", dest="base_url")
    p.add_argument("--api-key-env", dest="api_key_env", help="environment variable holding the API key")
    p.add_argument("--transcript", type=Path, help="scripted-backend transcript file")
    p.add_argument("--seed", type=int, help="transcript variant for the scripted backend")
    p.add_argument("--cache-dir", dest="cache_dir", type=Path)
    p.add_argument("--prompt-dir", dest="prompt_dir", type=Path)
    p.add_argument("--workers", type=int)
    p.add_argument("-v", "--verbose", action="store_true")


def _stage_args(p: argparse.ArgumentParser) -> None:
    _common(p)
    p.add_argument("input_path", type=Path, help="JSON-lines thread file")
    p.add_argument("--work-dir", dest="work_dir", type=Path)
    p.add_argument("--tau", type=float)
    p.add_argument("--t-support", dest="t_support", type=float)
    p.add_argument("--samples", dest="n_samples", type=int)
    p.add_argument("--pairwise", dest="batch_scoring", action="store_const", const=False,
                   help="score pairs one prompt at a time instead of one-to-many")
    p.add_argument("--resume", action="store_const", const=True)
    p.add_argument("--format", choices=["tree", "machine"])
    p.add_argument("--output", dest="output_path", type=Path)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="claimtree", description="Claim-reason summaries of discussion threads.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_ in [("extract", "extract claims and reasons"),
                        ("cluster", "extract (or reuse) and cluster"),
                        ("summarize", "run all stages, reusing valid upstream artifacts"),
                        ("pipeline", "run all stages")]:
        _stage_args(sub.add_parser(name, help=help_))

    ev = sub.add_parser("eval", help="score a generated summary against a reference")
    _common(ev)
    ev.add_argument("--generated", required=True, type=Path)
    ev.add_argument("--reference", required=True, type=Path)
    ev.add_argument("--propositions", type=Path, help="extraction artifact, needed for match metrics")
    ev.add_argument("--judge", action="store_true", help="run LLM judges for match and support metrics")
    ev.add_argument("--similarity", action="append", default=[], metavar="NAME=FILE",
                    help="precomputed similarity scores (JSON lines) to include in soft P/R/F1")
    ev.add_argument("--comparisons", type=Path, help="winner,loser,count file for Bradley-Terry ranking")
    ev.add_argument("--topic", default="")
    ev.add_argument("--report", type=Path, help="write the JSON report here")

    ing = sub.add_parser("ingest", help="validate and normalize a thread file")
    ing.add_argument("input_path", type=Path)
    ing.add_argument("--domain")
    ing.add_argument("--output", type=Path)
    ing.add_argument("-v", "--verbose", action="store_true")
    return parser


_NOT_CONFIG = {"command", "config", "verbose"}


def load_config(args: argparse.Namespace, skip: Sequence[str] = ()) -> PipelineConfig:
    file_values = {}
    if args.config is not None:
        try:
            file_values = json.loads(args.config.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ValidationError(f"cannot read config {args.config}: {exc}") from exc
    cli_values = {k: v for k, v in vars(args).items() if k not in _NOT_CONFIG and k not in skip}
    return PipelineConfig.from_sources(file_values, cli_values)


def _run_stages(args: argparse.Namespace) -> int:
    cfg = load_config(args)
    until = {"extract": "extract", "cluster": "cluster"}.get(args.command, "summarize")
    runs = run_pipeline(cfg, until=until, reuse_upstream=args.command != "pipeline")
    for r in runs:
        logging.info("%s: ran %s, reused %s", r.thread.thread_id, r.ran or "-", r.reused or "-")
        if until == "summarize" and cfg.output_path is None:
            sys.stdout.write(render_summary(r.summary, cfg.format))
    return 0


def _run_eval(args: argparse.Namespace) -> int:
    eval_keys = {"generated", "reference", "propositions", "judge", "similarity", "comparisons", "topic", "report"}
    cfg = load_config(args, skip=eval_keys)
    sims = {}
    for spec in args.similarity:
        name, sep, path = spec.partition("=")
        if not sep:
            raise ValidationError(f"--similarity expects NAME=FILE, got {spec!r}")
        sims[name] = path
    judge = build_gateway(cfg) if args.judge else None
    report = run_eval(args.generated, args.reference, judge, args.propositions, sims, args.comparisons,
                      args.topic, cfg.judge_temperature, cfg.prompt_dir)
    if args.report:
        dump_json(args.report, report)
    sys.stdout.write(format_report(report))
    return 0


def _run_ingest(args: argparse.Namespace) -> int:
    threads = ingest_dataset(args.input_path, args.domain)
    if args.output:
        write_threads(threads, args.output)
    print(f"{len(threads)} threads, {sum(len(t.comments) for t in threads)} comments")
    return 0


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    handler = {"eval": _run_eval, "ingest": _run_ingest}.get(args.command, _run_stages)
    try:
        return handler(args)
    except ClaimTreeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
