"""Per-claim-cluster summary generation, id verification and rendering."""

from __future__ import annotations

import json
import logging
import os
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field
from typing import Any

from . import prompts
from .errors import SummaryGenerationError, ValidationError
from .llm import GenerationRequest, LLMGateway
from .model import (ClaimCluster, Proposition, ReasonCluster, StructuredSummary, SummaryEntry,
                    SummaryReason)
from .parsing import find_json

log = logging.getLogger(__name__)

SOFT_TOKEN_LIMIT = 10
HARD_TOKEN_LIMIT = 25

WITH_REASONS = "Summarize every reason cluster as a separate reason."
CLAIM_ONLY = 'There are no reason clusters: summarize the claims only and answer with an empty "reasons" list.'


@dataclass(frozen=True)
class BundleReasons:
    reason_cluster_id: int
    reason_texts: tuple[str, ...]
    prevalence: int
    member_reason_refs: tuple[tuple[int, int], ...] = ()


@dataclass(frozen=True)
class ClusterBundle:
    claim_cluster_id: int
    claim_texts: tuple[str, ...]
    reason_clusters: tuple[BundleReasons, ...] = ()
    member_prop_ids: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        ids = [r.reason_cluster_id for r in self.reason_clusters]
        if len(ids) != len(set(ids)):
            raise ValidationError("duplicate reason cluster id in bundle")
        if not self.claim_texts or not all(t.strip() for t in self.claim_texts):
            raise ValidationError("bundle claim texts must be non-empty", field="claim_texts")

    def reason_ids(self) -> list[int]:
        return [r.reason_cluster_id for r in self.reason_clusters]

    def to_input(self) -> dict[str, Any]:
        return {
            "claim_cluster_id": self.claim_cluster_id,
            "claims": list(self.claim_texts),
            "reason_clusters": [{"id": r.reason_cluster_id, "reasons": list(r.reason_texts)}
                                for r in self.reason_clusters],
        }


def build_bundles(claim_clusters: Sequence[ClaimCluster], reason_clusters: Sequence[ReasonCluster],
                  props: Sequence[Proposition]) -> list[ClusterBundle]:
    by_id = {p.prop_id: p for p in props}
    bundles = []
    for cc in sorted(claim_clusters, key=lambda c: c.cluster_id):
        members = sorted(cc.member_prop_ids)
        rcs = sorted((r for r in reason_clusters if r.parent_claim_cluster_id == cc.cluster_id),
                     key=lambda r: r.cluster_id)
        bundles.append(ClusterBundle(
            cc.cluster_id,
            tuple(by_id[pid].claim for pid in members),
            tuple(BundleReasons(r.cluster_id, tuple(by_id[p].reasons[j] for p, j in r.member_reason_refs),
                                r.prevalence, r.member_reason_refs) for r in rcs),
            tuple(members),
        ))
    return bundles


def _dedupe_to_budget(texts: Sequence[str], budget: int) -> tuple[str, ...]:
    """Drop repeated texts, longest first, until the joined length fits ``budget``."""
    kept = list(texts)
    seen_counts: dict[str, int] = {}
    for t in kept:
        seen_counts[t] = seen_counts.get(t, 0) + 1
    for t in sorted((t for t, c in seen_counts.items() if c > 1), key=len, reverse=True):
        if sum(len(x) for x in kept) <= budget:
            break
        while seen_counts[t] > 1:
            idx = len(kept) - 1 - kept[::-1].index(t)
            del kept[idx]
            seen_counts[t] -= 1
    return tuple(kept)


def fit_bundle(bundle: ClusterBundle, max_chars: int | None) -> ClusterBundle:
    if max_chars is None or len(json.dumps(bundle.to_input())) <= max_chars:
        return bundle
    log.warning("bundle %d exceeds %d chars; dropping duplicate texts", bundle.claim_cluster_id, max_chars)
    share = max_chars // (1 + len(bundle.reason_clusters))
    return ClusterBundle(
        bundle.claim_cluster_id,
        _dedupe_to_budget(bundle.claim_texts, share),
        tuple(BundleReasons(r.reason_cluster_id, _dedupe_to_budget(r.reason_texts, share), r.prevalence,
                            r.member_reason_refs) for r in bundle.reason_clusters),
        bundle.member_prop_ids,
    )


def build_summary_prompt(bundle: ClusterBundle, topic: str = "",
                         prompt_dir: str | os.PathLike | None = None) -> str:
    return prompts.render(
        prompts.SUMMARY_GENERATION, prompt_dir,
        topic=topic,
        bundle=json.dumps(bundle.to_input(), indent=2, ensure_ascii=False),
        reason_instruction=WITH_REASONS if bundle.reason_clusters else CLAIM_ONLY,
    )


def token_length(text: str) -> int:
    return len(text.split())


@dataclass(frozen=True)
class ParsedSummary:
    claim_text: str
    reasons: tuple[tuple[int, str], ...]
    warnings: tuple[str, ...] = ()


def _as_int(v: Any) -> int | None:
    if isinstance(v, bool):
        return None
    if isinstance(v, int):
        return v
    if isinstance(v, str) and v.strip().lstrip("-").isdigit():
        return int(v)
    return None


def parse_summary_output(text: str, bundle: ClusterBundle) -> ParsedSummary:
    """Parse one generated entry and verify its ids against ``bundle``.

    Raises :class:`SummaryGenerationError` listing every violation: unknown or
    repeated reason cluster ids, a mismatched claim cluster id, missing text,
    or text over the hard token limit. Text over the soft limit only warns.
    """
    record = find_json(text)
    if not isinstance(record, Mapping):
        raise SummaryGenerationError("no JSON object in summary response", text, bundle.claim_cluster_id,
                                     ["response is not a JSON object"])
    violations: list[str] = []
    warnings: list[str] = []
    cid = record.get("claim_cluster_id")
    if cid is not None and _as_int(cid) != bundle.claim_cluster_id:
        violations.append(f"claim_cluster_id {cid!r} does not match {bundle.claim_cluster_id}")
    claim = record.get("claim")
    if not isinstance(claim, str) or not claim.strip():
        violations.append("missing claim text")
        claim = ""
    items = record.get("reasons", [])
    if not isinstance(items, list):
        violations.append("'reasons' is not a list")
        items = []
    known = set(bundle.reason_ids())
    seen: set[int] = set()
    reasons = []
    for i, item in enumerate(items):
        if not isinstance(item, Mapping):
            violations.append(f"reasons[{i}] is not an object")
            continue
        rid = _as_int(item.get("reason_cluster_id", item.get("id")))
        rtext = item.get("reason", item.get("reason_text"))
        if rid is None:
            violations.append(f"reasons[{i}] has no reason_cluster_id")
            continue
        if rid not in known:
            violations.append(f"unknown reason_cluster_id {rid}")
            continue
        if rid in seen:
            violations.append(f"duplicate reason_cluster_id {rid}")
            continue
        if not isinstance(rtext, str) or not rtext.strip():
            violations.append(f"reason_cluster_id {rid} has no text")
            continue
        seen.add(rid)
        reasons.append((rid, rtext.strip()))

    for label, t in [("claim", claim)] + [(f"reason {rid}", t) for rid, t in reasons]:
        n = token_length(t)
        if n > HARD_TOKEN_LIMIT:
            violations.append(f"{label} has {n} tokens (limit {HARD_TOKEN_LIMIT})")
        elif n > SOFT_TOKEN_LIMIT:
            warnings.append(f"{label} has {n} tokens (soft limit {SOFT_TOKEN_LIMIT})")
    if violations:
        raise SummaryGenerationError("; ".join(violations), text, bundle.claim_cluster_id, violations)
    for w in warnings:
        log.warning("claim cluster %d: %s", bundle.claim_cluster_id, w)
    return ParsedSummary(claim.strip(), tuple(reasons), tuple(warnings))


def repair_prompt(prompt: str, violations: Sequence[str], bundle: ClusterBundle) -> str:
    listed = "\n".join(f"- {v}" for v in violations)
    ids = ", ".join(str(i) for i in bundle.reason_ids()) or "none"
    return (f"{prompt}\n\nYour previous answer had these problems:\n{listed}\n"
            f"Valid reason_cluster_id values are: {ids}. Answer again with only the corrected JSON object.")


def assemble_entry(parsed: ParsedSummary, bundle: ClusterBundle) -> SummaryEntry:
    """Attach prevalence and provenance; append clusters the model left out.

    An unreferenced reason cluster keeps its count under the entry, labelled
    with its first member text, so prevalences still sum to the cluster's
    reason pool.
    """
    by_rid = {r.reason_cluster_id: r for r in bundle.reason_clusters}
    text_for = dict(parsed.reasons)
    reasons = []
    for rid in [rid for rid, _ in parsed.reasons] + [i for i in bundle.reason_ids() if i not in text_for]:
        br = by_rid[rid]
        if rid not in text_for:
            log.warning("claim cluster %d: reason cluster %d not referenced; using a member text",
                        bundle.claim_cluster_id, rid)
        reasons.append(SummaryReason(rid, text_for.get(rid, br.reason_texts[0]), br.prevalence,
                                     br.member_reason_refs))
    return SummaryEntry(bundle.claim_cluster_id, parsed.claim_text, tuple(reasons), bundle.member_prop_ids)


@dataclass
class SummaryGenerator:
    gateway: LLMGateway
    temperature: float = 0.0
    max_tokens: int = 1024
    prompt_dir: str | os.PathLike | None = None
    max_bundle_chars: int | None = None
    errors: dict[int, SummaryGenerationError] = field(default_factory=dict)

    def _ask(self, prompt: str) -> str:
        return self.gateway.complete(GenerationRequest(prompt, self.temperature, self.max_tokens)).text

    def generate_entry(self, bundle: ClusterBundle, topic: str = "") -> SummaryEntry:
        bundle = fit_bundle(bundle, self.max_bundle_chars)
        prompt = build_summary_prompt(bundle, topic, self.prompt_dir)
        text = self._ask(prompt)
        try:
            parsed = parse_summary_output(text, bundle)
        except SummaryGenerationError as first:
            text = self._ask(repair_prompt(prompt, first.violations, bundle))
            parsed = parse_summary_output(text, bundle)
        return assemble_entry(parsed, bundle)

    def generate_summary(self, claim_clusters: Sequence[ClaimCluster], reason_clusters: Sequence[ReasonCluster],
                         props: Sequence[Proposition], thread_id: str = "", topic: str = "") -> StructuredSummary:
        """One generation per claim cluster.

        Failed clusters are recorded in ``errors`` and listed in the summary's
        ``failed_claim_cluster_ids``; the call fails only when every cluster fails.
        """
        self.errors = {}
        entries = []
        bundles = build_bundles(claim_clusters, reason_clusters, props)
        for b in bundles:
            try:
                entries.append(self.generate_entry(b, topic))
            except SummaryGenerationError as exc:
                log.error("claim cluster %d failed: %s", b.claim_cluster_id, exc)
                self.errors[b.claim_cluster_id] = exc
        if bundles and not entries:
            first = next(iter(self.errors.values()))
            raise SummaryGenerationError(f"all {len(bundles)} claim clusters failed; first: {first}",
                                         first.raw, first.claim_cluster_id, first.violations)
        return StructuredSummary(tuple(entries), thread_id, topic, tuple(sorted(self.errors)))


def render_summary(summary: StructuredSummary, format: str = "tree") -> str:
    if format == "machine":
        return json.dumps(summary.to_dict(), indent=2, sort_keys=True, ensure_ascii=True) + "\n"
    if format != "tree":
        raise ValidationError(f"unknown format {format!r}", field="format")
    lines = []
    for e in summary.entries:
        lines.append(f"Claim: {e.claim_text}")
        for r in e.reasons:
            lines.append(f"  -> Reason: {r.reason_text} ({r.prevalence} instances)")
    return "\n".join(lines) + ("\n" if lines else "")


def parse_machine_summary(text: str) -> StructuredSummary:
    return StructuredSummary.from_dict(json.loads(text))
