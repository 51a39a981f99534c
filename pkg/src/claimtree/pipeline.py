"""End-to-end orchestration: extract -> cluster -> summarize, plus evaluation.

Every stage writes a JSON artifact under ``<work_dir>/<thread_id>/`` that
embeds a hash of the configuration it was produced under (chained through
upstream stages). With ``resume`` on, an artifact is reused only when its
hash matches the current configuration.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
from collections.abc import Callable, Mapping, Sequence
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Any

from . import prompts
from .clustering import ClusterConfig, ClusteringResult, cluster_thread
from .entailment import EntailmentScorer
from .errors import ClaimTreeError, StageError, ValidationError
from .evaluation import (ScoreFileSimilarity, bradley_terry_mm, judge_match, judge_support, match_prf,
                         read_comparisons, rouge_1_f1, rouge_2_f1, rouge_l_f1, soft_prf, summary_alignment,
                         support_precision)
from .extraction import Extractor
from .llm import HttpBackend, LLMGateway, ResponseCache, ScriptedBackend
from .model import (Proposition, StructuredSummary, Thread, check_claim_partition, check_reason_partition,
                    check_summary, validate_thread)
from .summary import SummaryGenerator, render_summary

log = logging.getLogger(__name__)

STAGES = ("extract", "cluster", "summarize")
ARTIFACT_FILES = {"extract": "propositions.json", "cluster": "clusters.json", "summarize": "summary.json"}


@dataclass
class PipelineConfig:
    input_path: Path | None = None
    work_dir: Path = Path("runs")
    output_path: Path | None = None
    backend: str = "http"
    model: str = "gpt-4.1"
    base_url: str = "https://api.openai.com/v1"
    api_key_env: str = "OPENAI_API_KEY"
    transcript: Path | None = None
    seed: int = 0
    cache_dir: Path | None = None
    prompt_dir: Path | None = None
    tau: float = 0.5
    t_support: float = 0.5
    n_samples: int = 5
    batch_scoring: bool = True
    extraction_temperature: float = 0.0
    scoring_temperature: float = 1.0
    generation_temperature: float = 0.0
    judge_temperature: float = 0.0
    workers: int = 1
    resume: bool = False
    format: str = "tree"

    _paths = ("input_path", "work_dir", "output_path", "transcript", "cache_dir", "prompt_dir")

    def __post_init__(self) -> None:
        for name in self._paths:
            v = getattr(self, name)
            if v is not None and not isinstance(v, Path):
                setattr(self, name, Path(v))
        if self.backend not in ("http", "scripted"):
            raise ValidationError(f"unknown backend {self.backend!r}", field="backend")
        if self.format not in ("tree", "machine"):
            raise ValidationError(f"unknown format {self.format!r}", field="format")
        self.cluster_config()

    def cluster_config(self) -> ClusterConfig:
        return ClusterConfig(self.tau, self.t_support, self.n_samples)

    @classmethod
    def from_sources(cls, file_values: Mapping[str, Any] | None = None,
                     cli_values: Mapping[str, Any] | None = None) -> PipelineConfig:
        """CLI values beat config-file values, which beat defaults. ``None`` means unset."""
        known = {f.name for f in fields(cls)}
        merged: dict[str, Any] = {}
        for source in (file_values or {}, cli_values or {}):
            for k, v in source.items():
                if v is None:
                    continue
                if k not in known:
                    raise ValidationError(f"unknown config key {k!r}")
                merged[k] = v
        return cls(**merged)


def _digest(obj: Any) -> str:
    return hashlib.sha256(json.dumps(obj, sort_keys=True, default=str).encode("utf-8")).hexdigest()


def _prompt_text(name: str, cfg: PipelineConfig) -> str:
    return prompts.load_prompt(name, cfg.prompt_dir).template


def stage_hashes(thread: Thread, cfg: PipelineConfig) -> dict[str, str]:
    backend = [cfg.backend, cfg.model, cfg.seed if cfg.backend == "scripted" else None]
    extract = _digest([thread.to_dict(), backend, cfg.extraction_temperature,
                       _prompt_text(prompts.ARG_EXTRACTION, cfg)])
    cluster = _digest([extract, cfg.tau, cfg.t_support, cfg.n_samples, cfg.scoring_temperature, cfg.batch_scoring,
                       _prompt_text(prompts.ENTAILMENT_PAIRWISE, cfg), _prompt_text(prompts.ENTAILMENT_BATCH, cfg)])
    summarize = _digest([cluster, cfg.generation_temperature, _prompt_text(prompts.SUMMARY_GENERATION, cfg)])
    return {"extract": extract, "cluster": cluster, "summarize": summarize}


def dump_json(path: Path, payload: Any) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    text = json.dumps(payload, indent=1, sort_keys=True, ensure_ascii=True) + "\n"
    path.write_text(text, encoding="utf-8", newline="\n")


def read_threads(path: str | os.PathLike, domain: str | None = None) -> list[Thread]:
    """Validate a JSON-lines thread file; errors cite the line number."""
    path = Path(path)
    if not path.is_file():
        raise ValidationError(f"input file not found: {path}")
    threads = []
    seen: set[str] = set()
    prefix = f"{domain}-" if domain else "thread-"
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        if not line.strip():
            continue
        try:
            thread = validate_thread(json.loads(line), default_thread_id=f"{prefix}{lineno}")
        except json.JSONDecodeError as exc:
            raise ValidationError(f"line {lineno}: invalid JSON ({exc.msg})") from exc
        except ValidationError as exc:
            raise ValidationError(f"line {lineno}: {exc}", field=exc.field) from exc
        if thread.thread_id in seen:
            raise ValidationError(f"line {lineno}: duplicate thread_id {thread.thread_id!r}")
        seen.add(thread.thread_id)
        threads.append(thread)
    if not threads:
        raise ValidationError(f"no threads in {path}")
    return threads


def ingest_dataset(path: str | os.PathLike, domain: str | None = None) -> list[Thread]:
    return read_threads(path, domain)


def write_threads(threads: Sequence[Thread], path: str | os.PathLike) -> None:
    lines = [json.dumps(t.to_dict(), sort_keys=True, ensure_ascii=False) for t in threads]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def build_gateway(cfg: PipelineConfig) -> LLMGateway:
    if cfg.backend == "scripted":
        if cfg.transcript is None:
            raise ValidationError("scripted backend needs a transcript file", field="transcript")
        if not cfg.transcript.is_file():
            raise ValidationError(f"transcript not found: {cfg.transcript}", field="transcript")
        backend = ScriptedBackend.from_file(cfg.transcript, seed=cfg.seed, model=cfg.model)
    else:
        backend = HttpBackend(cfg.model, cfg.base_url, cfg.api_key_env)
    cache = ResponseCache(cfg.cache_dir) if cfg.cache_dir else None
    return LLMGateway(backend, cache)


@dataclass
class ThreadRun:
    thread: Thread
    propositions: list[Proposition] | None = None
    clustering: ClusteringResult | None = None
    summary: StructuredSummary | None = None
    ran: list[str] = field(default_factory=list)
    reused: list[str] = field(default_factory=list)


class Pipeline:
    def __init__(self, cfg: PipelineConfig, gateway: LLMGateway | None = None):
        self.cfg = cfg
        self._gateway = gateway

    @property
    def gateway(self) -> LLMGateway:
        if self._gateway is None:
            self._gateway = build_gateway(self.cfg)
        return self._gateway

    def artifact_path(self, thread_id: str, stage: str) -> Path:
        return self.cfg.work_dir / thread_id / ARTIFACT_FILES[stage]

    def _load(self, thread_id: str, stage: str, expected_hash: str) -> Any | None:
        path = self.artifact_path(thread_id, stage)
        if not path.is_file():
            return None
        try:
            art = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError:
            log.warning("ignoring unreadable artifact %s", path)
            return None
        if art.get("config_hash") != expected_hash:
            log.warning("refusing %s: produced under a different configuration", path)
            return None
        return art["data"]

    def _save(self, thread_id: str, stage: str, config_hash: str, data: Any) -> None:
        dump_json(self.artifact_path(thread_id, stage),
                  {"stage": stage, "thread_id": thread_id, "config_hash": config_hash, "data": data})

    def _stage(self, run: ThreadRun, stage: str, h: str, reuse: bool, compute: Callable[[], Any],
               encode: Callable[[Any], Any], decode: Callable[[Any], Any]) -> Any:
        tid = run.thread.thread_id
        if reuse:
            data = self._load(tid, stage, h)
            if data is not None:
                run.reused.append(stage)
                return decode(data)
        try:
            value = compute()
        except ClaimTreeError as exc:
            raise StageError(stage, f"thread {tid}", exc) from exc
        self._save(tid, stage, h, encode(value))
        run.ran.append(stage)
        return value

    def run_thread(self, thread: Thread, until: str = "summarize", reuse_upstream: bool = False) -> ThreadRun:
        cfg = self.cfg
        hashes = stage_hashes(thread, cfg)
        last = STAGES.index(until)
        run = ThreadRun(thread)

        def reuse(stage: str) -> bool:
            return cfg.resume or (reuse_upstream and STAGES.index(stage) < last)

        run.propositions = self._stage(
            run, "extract", hashes["extract"], reuse("extract"),
            lambda: Extractor(self.gateway, cfg.extraction_temperature, prompt_dir=cfg.prompt_dir,
                              workers=cfg.workers).extract_propositions(thread),
            lambda props: {"propositions": [p.to_dict() for p in props]},
            lambda d: [Proposition.from_dict(p) for p in d["propositions"]],
        )
        known = set(thread.comment_ids())
        for p in run.propositions:
            if p.source_comment_id not in known:
                raise StageError("extract", f"proposition {p.prop_id}",
                                 ValidationError(f"unknown source comment {p.source_comment_id!r}"))
        if last < 1:
            return run

        def do_cluster() -> ClusteringResult:
            scorer = EntailmentScorer(self.gateway, cfg.n_samples, cfg.scoring_temperature,
                                      prompt_dir=cfg.prompt_dir, workers=cfg.workers)
            result = cluster_thread(run.propositions, scorer, cfg.cluster_config(), cfg.batch_scoring)
            check_claim_partition(run.propositions, result.claim_clusters)
            check_reason_partition(run.propositions, result.claim_clusters, result.reason_clusters)
            return result

        run.clustering = self._stage(run, "cluster", hashes["cluster"], reuse("cluster"), do_cluster,
                                     lambda r: r.to_dict(), ClusteringResult.from_dict)
        if last < 2:
            return run

        def do_summarize() -> StructuredSummary:
            gen = SummaryGenerator(self.gateway, cfg.generation_temperature, prompt_dir=cfg.prompt_dir)
            c = run.clustering
            summary = gen.generate_summary(c.claim_clusters, c.reason_clusters, run.propositions,
                                           thread.thread_id, thread.topic)
            check_summary(summary, run.propositions, c.claim_clusters, c.reason_clusters)
            return summary

        run.summary = self._stage(run, "summarize", hashes["summarize"], reuse("summarize"), do_summarize,
                                  lambda s: s.to_dict(), StructuredSummary.from_dict)
        return run


def write_output(runs: Sequence[ThreadRun], path: Path, format: str) -> None:
    if format == "machine":
        text = "".join(json.dumps(r.summary.to_dict(), sort_keys=True, ensure_ascii=True) + "\n" for r in runs)
    else:
        blocks = [f"# {r.thread.thread_id}: {r.thread.topic}\n{render_summary(r.summary, 'tree')}" for r in runs]
        text = "\n".join(blocks)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8", newline="\n")


def run_pipeline(cfg: PipelineConfig, gateway: LLMGateway | None = None, until: str = "summarize",
                 reuse_upstream: bool = False) -> list[ThreadRun]:
    if cfg.input_path is None:
        raise ValidationError("no input file given", field="input_path")
    threads = read_threads(cfg.input_path)
    pipe = Pipeline(cfg, gateway)
    runs = [pipe.run_thread(t, until, reuse_upstream) for t in threads]
    if until == "summarize" and cfg.output_path is not None:
        write_output(runs, cfg.output_path, cfg.format)
    return runs


def load_summary(path: str | os.PathLike) -> StructuredSummary:
    """Read a machine-format summary, or the data of a summary stage artifact."""
    path = Path(path)
    if not path.is_file():
        raise ValidationError(f"summary file not found: {path}")
    d = json.loads(path.read_text(encoding="utf-8"))
    if isinstance(d, Mapping) and d.get("stage") == "summarize":
        d = d["data"]
    return StructuredSummary.from_dict(d)


def load_argument_set(path: str | os.PathLike) -> list[str]:
    """Flattened claims and reasons from a summary file.

    Accepts a machine summary or summary artifact, ``{"arguments": [...]}``, a
    JSON list of strings, or plain text with one argument per line.
    """
    path = Path(path)
    if not path.is_file():
        raise ValidationError(f"argument file not found: {path}")
    text = path.read_text(encoding="utf-8")
    try:
        d = json.loads(text)
    except json.JSONDecodeError:
        return [line.strip() for line in text.splitlines() if line.strip()]
    if isinstance(d, list):
        return [str(x) for x in d]
    if isinstance(d, Mapping) and "arguments" in d:
        return [str(x) for x in d["arguments"]]
    return load_summary(path).arguments() if isinstance(d, Mapping) else []


def load_propositions(path: str | os.PathLike) -> list[Proposition]:
    d = json.loads(Path(path).read_text(encoding="utf-8"))
    if isinstance(d, Mapping) and d.get("stage") == "extract":
        d = d["data"]
    items = d["propositions"] if isinstance(d, Mapping) else d
    return [Proposition.from_dict(p) for p in items]


def _prf_dict(m) -> dict[str, float | None]:
    return dict(zip(m._fields, (None if v is None else float(v) for v in m)))


SIMILARITIES = {"rouge1": rouge_1_f1, "rouge2": rouge_2_f1, "rougeL": rouge_l_f1}


def run_eval(generated_path: str | os.PathLike, reference_path: str | os.PathLike,
             judge: LLMGateway | None = None, propositions_path: str | os.PathLike | None = None,
             similarity_files: Mapping[str, str | os.PathLike] | None = None,
             comparisons_path: str | os.PathLike | None = None, topic: str = "",
             judge_temperature: float = 0.0, prompt_dir: str | os.PathLike | None = None) -> dict[str, Any]:
    """Metric report as a JSON-ready dict. Sections that did not run are None."""
    if not Path(reference_path).is_file():
        raise ValidationError(f"reference file not found: {reference_path}")
    generated = load_argument_set(generated_path)
    reference = load_argument_set(reference_path)
    rq2 = {name: _prf_dict(soft_prf(generated, reference, f)) for name, f in SIMILARITIES.items()}
    for name, p in (similarity_files or {}).items():
        rq2[name] = _prf_dict(soft_prf(generated, reference, ScoreFileSimilarity(p)))
    report: dict[str, Any] = {"n_generated": len(generated), "n_reference": len(reference), "rq2": rq2,
                              "rq3": None, "rq4": None, "bradley_terry": None}

    if judge is not None:
        summary = load_summary(generated_path)
        report["rq4"] = _support_report(summary, judge, judge_temperature, prompt_dir)
        if propositions_path is not None:
            report["rq3"] = _match_report(summary, load_propositions(propositions_path), judge, topic,
                                          judge_temperature, prompt_dir)
    if comparisons_path is not None:
        bt = bradley_terry_mm(read_comparisons(comparisons_path))
        report["bradley_terry"] = {"strengths": bt.strengths, "ranking": bt.ranking(),
                                   "iterations": bt.iterations, "smoothed": bt.smoothed}
    return report


def _support_report(summary, judge, temperature, prompt_dir) -> dict[str, Any] | None:
    labels = [judge_support(judge, e.claim_text, r.reason_text, temperature, prompt_dir)
              for e in summary.entries for r in e.reasons]
    if not labels:
        return None
    return {"support_precision": support_precision(labels), "n": len(labels)}


def _match_report(summary, props, judge, topic, temperature, prompt_dir) -> dict[str, Any]:
    align = summary_alignment(summary)
    originals = {f"claim:{p.prop_id}": p.claim for p in props}
    originals.update({f"reason:{p.prop_id}:{j}": r for p in props for j, r in enumerate(p.reasons)})
    judgments = []
    for gid, gtext in sorted(align.generated_text.items()):
        level = gid.split(":", 1)[0]
        for oid, otext in sorted(originals.items()):
            if oid.split(":", 1)[0] == level:
                judgments.append(judge_match(judge, gid, gtext, oid, otext, level, topic, temperature, prompt_dir))
    return {
        "claim": _prf_dict(match_prf(align.predicted_claims, judgments, "claim")),
        "reason": _prf_dict(match_prf(align.predicted_reasons, judgments, "reason")),
        "claim_reason": _prf_dict(match_prf(align.predicted_reasons, judgments, "claim_reason",
                                            align.generated_parent, align.original_parent)),
        "n_judgments": len(judgments),
    }


def format_report(report: Mapping[str, Any]) -> str:
    def fmt(v):
        return "  -  " if v is None else f"{v:.3f}"

    lines = [f"generated arguments: {report['n_generated']}, reference arguments: {report['n_reference']}",
             "", f"{'similarity':<12} {'sP':>6} {'sR':>6} {'sF1':>6}"]
    for name, m in report["rq2"].items():
        lines.append(f"{name:<12} {fmt(m['sP']):>6} {fmt(m['sR']):>6} {fmt(m['sF1']):>6}")
    lines.append("")
    if report["rq3"] is None:
        lines.append("match P/R/F1: absent")
    else:
        lines.append(f"{'level':<12} {'P':>6} {'R':>6} {'F1':>6}")
        for level in ("claim", "reason", "claim_reason"):
            m = report["rq3"][level]
            lines.append(f"{level:<12} {fmt(m['precision']):>6} {fmt(m['recall']):>6} {fmt(m['f1']):>6}")
    lines.append("support precision: absent" if report["rq4"] is None
                 else f"support precision: {report['rq4']['support_precision']:.3f} (n={report['rq4']['n']})")
    if report["bradley_terry"] is not None:
        lines.append("")
        lines.append("Bradley-Terry strengths:")
        for p in report["bradley_terry"]["ranking"]:
            lines.append(f"  {p:<20} {report['bradley_terry']['strengths'][p]:.4f}")
    return "\n".join(lines) + "\n"


def config_dict(cfg: PipelineConfig) -> dict[str, Any]:
    return {k: (str(v) if isinstance(v, Path) else v) for k, v in asdict(cfg).items()}


__all__ = ["PipelineConfig", "Pipeline", "ThreadRun", "run_pipeline", "run_eval", "ingest_dataset", "read_threads",
           "write_threads", "format_report", "load_summary", "load_argument_set", "build_gateway"]
