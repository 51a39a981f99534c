import json
from dataclasses import replace

import pytest

from claimtree.cli import main
from claimtree.errors import BackendError, StageError, ValidationError
from claimtree.evaluation import bradley_terry_mm, read_comparisons, rouge_1_f1, soft_prf
from claimtree.llm import FunctionBackend, LLMGateway, ScriptedBackend
from claimtree.model import check_claim_partition, check_reason_partition, check_summary
from claimtree.pipeline import (PipelineConfig, format_report, ingest_dataset, load_argument_set, read_threads,
                                run_eval, run_pipeline)
from claimtree.summary import render_summary

from conftest import GOLDEN_SUMMARY, GOLDEN_THREAD, GOLDEN_TRANSCRIPT
from transcripts import break_summary, golden_entries, summary_entries, write_transcript


def test_golden_run(golden_config, golden_gateway):
    [run] = run_pipeline(golden_config, golden_gateway)
    assert render_summary(run.summary, "machine") == GOLDEN_SUMMARY.read_text(encoding="utf-8")
    check_claim_partition(run.propositions, run.clustering.claim_clusters)
    check_reason_partition(run.propositions, run.clustering.claim_clusters, run.clustering.reason_clusters)
    check_summary(run.summary, run.propositions, run.clustering.claim_clusters, run.clustering.reason_clusters)
    assert run.ran == ["extract", "cluster", "summarize"] and run.reused == []
    for stage in ("propositions", "clusters", "summary"):
        art = json.loads((golden_config.work_dir / "bike-racks" / f"{stage}.json").read_text())
        assert art["thread_id"] == "bike-racks" and len(art["config_hash"]) == 64


def test_resume_reruns_only_missing_stage(golden_config):
    run_pipeline(golden_config, LLMGateway(ScriptedBackend.from_file(GOLDEN_TRANSCRIPT)))
    (golden_config.work_dir / "bike-racks" / "summary.json").unlink()
    gw = LLMGateway(ScriptedBackend.from_file(GOLDEN_TRANSCRIPT))
    [run] = run_pipeline(replace(golden_config, resume=True), gw)
    assert run.ran == ["summarize"]
    assert run.reused == ["extract", "cluster"]
    assert gw.backend_calls == 2  # one generation per claim cluster
    assert render_summary(run.summary, "machine") == GOLDEN_SUMMARY.read_text(encoding="utf-8")


def test_resume_refuses_artifacts_from_other_config(golden_config, caplog):
    run_pipeline(golden_config, LLMGateway(ScriptedBackend.from_file(GOLDEN_TRANSCRIPT)))
    changed = replace(golden_config, resume=True, tau=0.55)
    gw = LLMGateway(ScriptedBackend.from_file(GOLDEN_TRANSCRIPT))
    [run] = run_pipeline(changed, gw)
    assert run.reused == ["extract"]
    assert run.ran == ["cluster", "summarize"]
    assert "different configuration" in caplog.text


def test_summarize_command_reuses_upstream(golden_config):
    run_pipeline(golden_config, LLMGateway(ScriptedBackend.from_file(GOLDEN_TRANSCRIPT)), until="cluster")
    gw = LLMGateway(ScriptedBackend.from_file(GOLDEN_TRANSCRIPT))
    [run] = run_pipeline(golden_config, gw, reuse_upstream=True)
    assert run.reused == ["extract", "cluster"] and run.ran == ["summarize"]


def test_missing_input_fails_before_backend(tmp_path):
    def explode(req):
        raise AssertionError("backend must not be called")

    cfg = PipelineConfig(input_path=tmp_path / "nope.jsonl", work_dir=tmp_path, backend="scripted")
    with pytest.raises(ValidationError, match="input file not found"):
        run_pipeline(cfg, LLMGateway(FunctionBackend(explode)))


def test_scripted_miss_is_backend_error(golden_config, tmp_path):
    cfg = replace(golden_config, transcript=write_transcript([], tmp_path / "empty.json"))
    with pytest.raises(StageError) as exc:
        run_pipeline(cfg)
    assert isinstance(exc.value.cause, BackendError) and exc.value.exit_code == 2


def test_ingest(tmp_path):
    good = json.loads(GOLDEN_THREAD.read_text())
    path = tmp_path / "threads.jsonl"
    second = {"topic": "x", "comments": [{"id": "a", "text": "hello"}]}
    path.write_text(json.dumps(good) + "\n" + json.dumps(second) + "\n")
    threads = ingest_dataset(path, domain="reddit")
    assert [t.thread_id for t in threads] == ["bike-racks", "reddit-2"]

    path.write_text(json.dumps(good) + "\n{broken\n")
    with pytest.raises(ValidationError, match="line 2"):
        read_threads(path)
    path.write_text(json.dumps(good) + "\n" + json.dumps({"comments": [{"text": ""}]}) + "\n")
    with pytest.raises(ValidationError, match="line 2"):
        read_threads(path)
    path.write_text("")
    with pytest.raises(ValidationError, match="no threads"):
        read_threads(path)


def test_config_precedence():
    cfg = PipelineConfig.from_sources({"tau": 0.6, "n_samples": 3}, {"tau": 0.7, "n_samples": None})
    assert (cfg.tau, cfg.n_samples, cfg.t_support) == (0.7, 3, 0.5)
    with pytest.raises(ValidationError, match="unknown config key"):
        PipelineConfig.from_sources({"colour": "red"})
    with pytest.raises(ValidationError):
        PipelineConfig.from_sources({"tau": 3})


def test_eval_identical_sets(tmp_path):
    assert all(v == {"sP": 1.0, "sR": 1.0, "sF1": 1.0}
               for v in run_eval(GOLDEN_SUMMARY, GOLDEN_SUMMARY)["rq2"].values())


def test_eval_matches_library(tmp_path):
    ref = tmp_path / "ref.txt"
    ref.write_text("Get the Saris Bones 3\nIt fits sedans\nRoof racks are bad\n")
    report = run_eval(GOLDEN_SUMMARY, ref)
    direct = soft_prf(load_argument_set(GOLDEN_SUMMARY), load_argument_set(ref), rouge_1_f1)
    assert tuple(report["rq2"]["rouge1"].values()) == tuple(direct)
    assert report["rq3"] is None and report["rq4"] is None and report["bradley_terry"] is None
    text = format_report(report)
    assert "absent" in text


def test_eval_bradley_terry_section(tmp_path):
    cmp = tmp_path / "cmp.csv"
    cmp.write_text("winner,loser,count\nours,baseline,3\nbaseline,ours,1\n")
    report = run_eval(GOLDEN_SUMMARY, GOLDEN_SUMMARY, comparisons_path=cmp)
    assert report["bradley_terry"]["strengths"] == bradley_terry_mm(read_comparisons(cmp)).strengths
    assert report["bradley_terry"]["ranking"] == ["ours", "baseline"]


def judge_backend(req):
    p = req.prompt
    if "supports" in p and "refutes" in p:
        return "supports"
    return "match"


def test_eval_with_judge(golden_config, golden_gateway):
    [run] = run_pipeline(golden_config, golden_gateway)
    props = golden_config.work_dir / "bike-racks" / "propositions.json"
    report = run_eval(GOLDEN_SUMMARY, GOLDEN_SUMMARY, LLMGateway(FunctionBackend(judge_backend)), props)
    assert report["rq4"] == {"support_precision": 1.0, "n": 4}
    # everything judged a match: precision 1, recall = predicted share of all pairs
    assert report["rq3"]["claim"]["precision"] == 1.0
    assert report["rq3"]["claim"]["recall"] == pytest.approx(4 / 8)
    assert report["rq3"]["claim_reason"]["precision"] == 1.0


def test_eval_missing_reference(tmp_path):
    with pytest.raises(ValidationError, match="reference file not found"):
        run_eval(GOLDEN_SUMMARY, tmp_path / "missing.json")


def cli_args(tmp_path, *extra, transcript=GOLDEN_TRANSCRIPT):
    return ["pipeline", str(GOLDEN_THREAD), "--backend", "scripted", "--model", "scripted",
            "--transcript", str(transcript), "--work-dir", str(tmp_path / "w"), *extra]


def test_cli_pipeline_tree(tmp_path, capsys):
    assert main(cli_args(tmp_path)) == 0
    assert capsys.readouterr().out == (GOLDEN_SUMMARY.parent / "golden_summary.txt").read_text()


def test_cli_machine_output_file(tmp_path):
    out = tmp_path / "out.jsonl"
    assert main(cli_args(tmp_path, "--format", "machine", "--output", str(out))) == 0
    assert json.loads(out.read_text()) == json.loads(GOLDEN_SUMMARY.read_text())


def test_cli_stage_commands(tmp_path, capsys):
    base = cli_args(tmp_path)[1:]
    assert main(["extract", *base]) == 0
    assert main(["cluster", *base]) == 0
    assert main(["summarize", *base]) == 0
    assert "Claim: Buy the Saris Bones 3" in capsys.readouterr().out


def test_cli_config_file(tmp_path, capsys):
    conf = tmp_path / "conf.json"
    conf.write_text(json.dumps({"backend": "scripted", "model": "scripted", "transcript": str(GOLDEN_TRANSCRIPT),
                                "format": "machine", "work_dir": str(tmp_path / "w")}))
    assert main(["pipeline", str(GOLDEN_THREAD), "--config", str(conf)]) == 0
    assert json.loads(capsys.readouterr().out) == json.loads(GOLDEN_SUMMARY.read_text())


def test_cli_exit_codes(tmp_path, capsys):
    assert main(["pipeline", str(tmp_path / "missing.jsonl"), "--backend", "scripted",
                 "--transcript", str(GOLDEN_TRANSCRIPT)]) == 1
    assert main(cli_args(tmp_path, "--tau", "2")) == 1
    empty = write_transcript([], tmp_path / "empty.json")
    assert main(cli_args(tmp_path, transcript=empty)) == 2

    entries = golden_entries()
    for cid in summary_entries(entries):
        break_summary(entries, cid, "garbage", "garbage", ["response is not a JSON object"])
    broken = write_transcript(entries, tmp_path / "broken.json")
    assert main(cli_args(tmp_path, transcript=broken)) == 3
    assert "all 2 claim clusters failed" in capsys.readouterr().err


def test_cli_eval_and_ingest(tmp_path, capsys):
    report = tmp_path / "report.json"
    assert main(["eval", "--generated", str(GOLDEN_SUMMARY), "--reference", str(GOLDEN_SUMMARY),
                 "--report", str(report)]) == 0
    assert json.loads(report.read_text())["rq2"]["rougeL"]["sF1"] == 1.0
    assert main(["eval", "--generated", str(GOLDEN_SUMMARY), "--reference", str(GOLDEN_SUMMARY),
                 "--similarity", "bogus"]) == 1
    out = tmp_path / "norm.jsonl"
    assert main(["ingest", str(GOLDEN_THREAD), "--output", str(out)]) == 0
    assert "1 threads, 3 comments" in capsys.readouterr().out
    assert read_threads(out) == read_threads(GOLDEN_THREAD)
