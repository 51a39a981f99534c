#!/usr/bin/env python3
"""Walk the bundled bike-rack thread through every stage, replaying a recorded transcript."""

import tempfile
from pathlib import Path

from claimtree.llm import LLMGateway, ScriptedBackend
from claimtree.pipeline import PipelineConfig, run_pipeline
from claimtree.summary import render_summary

FIXTURES = Path(__file__).resolve().parent.parent / "tests" / "fixtures"


def main():
    backend = ScriptedBackend.from_file(FIXTURES / "golden_transcript.json")
    gateway = LLMGateway(backend)
    with tempfile.TemporaryDirectory() as work:
        cfg = PipelineConfig(input_path=FIXTURES / "golden_thread.jsonl", work_dir=Path(work),
                             backend="scripted", model="scripted")
        [run] = run_pipeline(cfg, gateway)

    print(f"Thread {run.thread.thread_id!r}: {run.thread.topic}")
    print(f"{len(run.thread.comments)} comments -> {len(run.propositions)} propositions\n")
    for p in run.propositions:
        print(f"  [{p.prop_id}] ({p.source_comment_id}) {p.claim}")
        for r in p.reasons:
            print(f"        because {r}")

    c = run.clustering
    print("\nClaim clusters:")
    for cc in c.claim_clusters:
        print(f"  {cc.cluster_id}: props {list(cc.member_prop_ids)}")
    print("Reason clusters:")
    for rc in c.reason_clusters:
        print(f"  {rc.cluster_id} (claim cluster {rc.parent_claim_cluster_id}): {list(rc.member_reason_refs)}")

    print(f"\n{gateway.backend_calls} backend calls\n")
    print(render_summary(run.summary), end="")


if __name__ == "__main__":
    main()
