"""Helpers for deriving mutated transcripts from the golden one."""

from __future__ import annotations

import json
from pathlib import Path

from claimtree.llm import scripted_key
from claimtree.parsing import find_json
from claimtree.summary import BundleReasons, ClusterBundle, repair_prompt

from conftest import GOLDEN_TRANSCRIPT


def golden_entries() -> list[dict]:
    return json.loads(GOLDEN_TRANSCRIPT.read_text(encoding="utf-8"))["entries"]


def summary_entries(entries: list[dict]) -> dict[int, dict]:
    """Summary-generation entries by claim cluster id."""
    out = {}
    for e in entries:
        if e["prompt"].startswith("You are summarizing one argument"):
            out[find_json(e["prompt"].split("Input:\n", 1)[1])["claim_cluster_id"]] = e
    return out


def bundle_from_prompt(prompt: str) -> ClusterBundle:
    b = find_json(prompt.split("Input:\n", 1)[1])
    return ClusterBundle(b["claim_cluster_id"], tuple(b["claims"]),
                         tuple(BundleReasons(rc["id"], tuple(rc["reasons"]), len(rc["reasons"]))
                               for rc in b["reason_clusters"]))


def break_summary(entries: list[dict], cluster_id: int, text: str, repair_text: str,
                  violations: list[str]) -> str:
    """Replace one cluster's summary response and script its repair reply.

    Returns the repair prompt the generator is expected to send.
    """
    entry = summary_entries(entries)[cluster_id]
    entry["text"] = text
    repair = repair_prompt(entry["prompt"], violations, bundle_from_prompt(entry["prompt"]))
    entries.append({"key": scripted_key(repair, 0), "prompt": repair, "text": repair_text})
    return repair


def write_transcript(entries: list[dict], path: Path) -> Path:
    path.write_text(json.dumps({"version": 1, "entries": entries}, indent=1), encoding="utf-8")
    return path
