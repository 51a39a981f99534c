"""Domain types shared by the pipeline stages and the evaluation harness.

All types are frozen dataclasses. Each has ``to_dict``/``from_dict`` so that
stage artifacts and summary files round-trip through JSON unchanged.
"""

from __future__ import annotations

from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from typing import Any

from .errors import ValidationError

ReasonRef = tuple[int, int]
"""(prop_id, reason_index): one reason instance."""


@dataclass(frozen=True)
class Comment:
    comment_id: str
    text: str
    author: str | None = None

    def __post_init__(self) -> None:
        if not isinstance(self.text, str) or not self.text.strip():
            raise ValidationError("empty text", field="text")

    def to_dict(self) -> dict[str, Any]:
        d: dict[str, Any] = {"comment_id": self.comment_id, "text": self.text}
        if self.author is not None:
            d["author"] = self.author
        return d


@dataclass(frozen=True)
class Thread:
    thread_id: str
    topic: str
    comments: tuple[Comment, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "comments", tuple(self.comments))
        if not self.comments:
            raise ValidationError("empty comment list", field="comments")
        seen: set[str] = set()
        for c in self.comments:
            if c.comment_id in seen:
                raise ValidationError(f"duplicate comment_id {c.comment_id!r}", field="comment_id")
            seen.add(c.comment_id)

    def comment_ids(self) -> list[str]:
        return [c.comment_id for c in self.comments]

    def to_dict(self) -> dict[str, Any]:
        return {
            "thread_id": self.thread_id,
            "topic": self.topic,
            "comments": [c.to_dict() for c in self.comments],
        }

    @classmethod
    def from_dict(cls, raw: Mapping[str, Any]) -> Thread:
        return validate_thread(raw)


def validate_thread(raw: Mapping[str, Any], default_thread_id: str = "thread-0") -> Thread:
    """Build a :class:`Thread` from a parsed record, checking every invariant.

    Comments may use either ``comment_id`` or ``id``; comments with neither get
    a positional id ``c<index>``. Errors name the offending field.
    """
    if not isinstance(raw, Mapping):
        raise ValidationError("thread record must be an object")
    topic = raw.get("topic", "")
    if not isinstance(topic, str):
        raise ValidationError("must be a string", field="topic")
    thread_id = raw.get("thread_id", default_thread_id)
    comments_raw = raw.get("comments")
    if comments_raw is None:
        raise ValidationError("missing comment list", field="comments")
    if not isinstance(comments_raw, list):
        raise ValidationError("must be a list", field="comments")
    if not comments_raw:
        raise ValidationError("empty comment list", field="comments")

    comments = []
    seen: set[str] = set()
    for i, c in enumerate(comments_raw):
        where = f"comments[{i}]"
        if not isinstance(c, Mapping):
            raise ValidationError("comment must be an object", field=where)
        cid = c.get("comment_id", c.get("id"))
        cid = f"c{i}" if cid is None else str(cid)
        if cid in seen:
            raise ValidationError(f"duplicate comment_id {cid!r}", field=f"{where}.comment_id")
        seen.add(cid)
        text = c.get("text")
        if not isinstance(text, str) or not text.strip():
            raise ValidationError("empty text", field=f"{where}.text")
        author = c.get("author")
        comments.append(Comment(cid, text, None if author is None else str(author)))
    return Thread(str(thread_id), topic, tuple(comments))


@dataclass(frozen=True)
class PropositionDraft:
    """A claim and its reasons before id assignment."""

    source_comment_id: str
    claim: str
    reasons: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "reasons", tuple(self.reasons))


@dataclass(frozen=True)
class Proposition:
    prop_id: int
    source_comment_id: str
    claim: str
    reasons: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "reasons", tuple(self.reasons))
        if not self.claim.strip():
            raise ValidationError("empty claim", field="claim")
        for j, r in enumerate(self.reasons):
            if not r.strip():
                raise ValidationError("empty reason", field=f"reasons[{j}]")

    def reason_refs(self) -> list[ReasonRef]:
        return [(self.prop_id, j) for j in range(len(self.reasons))]

    def to_dict(self) -> dict[str, Any]:
        return {
            "prop_id": self.prop_id,
            "source_comment_id": self.source_comment_id,
            "claim": self.claim,
            "reasons": list(self.reasons),
        }

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> Proposition:
        return cls(int(d["prop_id"]), str(d["source_comment_id"]), d["claim"], tuple(d.get("reasons", ())))


def assign_prop_ids(drafts: Iterable[PropositionDraft]) -> list[Proposition]:
    return [Proposition(i, d.source_comment_id, d.claim, d.reasons) for i, d in enumerate(drafts)]


@dataclass(frozen=True)
class ClaimCluster:
    cluster_id: int
    member_prop_ids: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "member_prop_ids", tuple(self.member_prop_ids))
        if not self.member_prop_ids:
            raise ValidationError("claim cluster has no members", field="member_prop_ids")

    def to_dict(self) -> dict[str, Any]:
        return {"cluster_id": self.cluster_id, "member_prop_ids": list(self.member_prop_ids)}

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> ClaimCluster:
        return cls(int(d["cluster_id"]), tuple(int(x) for x in d["member_prop_ids"]))


@dataclass(frozen=True)
class ReasonCluster:
    cluster_id: int
    parent_claim_cluster_id: int
    member_reason_refs: tuple[ReasonRef, ...]

    def __post_init__(self) -> None:
        refs = tuple((int(p), int(j)) for p, j in self.member_reason_refs)
        object.__setattr__(self, "member_reason_refs", refs)
        if not refs:
            raise ValidationError("reason cluster has no members", field="member_reason_refs")

    @property
    def prevalence(self) -> int:
        return len(self.member_reason_refs)

    def to_dict(self) -> dict[str, Any]:
        return {
            "cluster_id": self.cluster_id,
            "parent_claim_cluster_id": self.parent_claim_cluster_id,
            "member_reason_refs": [list(r) for r in self.member_reason_refs],
        }

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> ReasonCluster:
        return cls(int(d["cluster_id"]), int(d["parent_claim_cluster_id"]),
                   tuple(tuple(r) for r in d["member_reason_refs"]))


@dataclass(frozen=True)
class SummaryReason:
    reason_cluster_id: int
    reason_text: str
    prevalence: int
    member_reason_refs: tuple[ReasonRef, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "member_reason_refs",
                           tuple((int(p), int(j)) for p, j in self.member_reason_refs))
        if self.prevalence < 0:
            raise ValidationError("negative prevalence", field="prevalence")

    def to_dict(self) -> dict[str, Any]:
        return {
            "reason_cluster_id": self.reason_cluster_id,
            "reason_text": self.reason_text,
            "prevalence": self.prevalence,
            "member_reason_refs": [list(r) for r in self.member_reason_refs],
        }

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> SummaryReason:
        return cls(int(d["reason_cluster_id"]), d["reason_text"], int(d["prevalence"]),
                   tuple(tuple(r) for r in d.get("member_reason_refs", ())))


@dataclass(frozen=True)
class SummaryEntry:
    claim_cluster_id: int
    claim_text: str
    reasons: tuple[SummaryReason, ...] = ()
    member_prop_ids: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "reasons", tuple(self.reasons))
        object.__setattr__(self, "member_prop_ids", tuple(self.member_prop_ids))
        ids = [r.reason_cluster_id for r in self.reasons]
        if len(ids) != len(set(ids)):
            raise ValidationError("reason cluster referenced twice", field="reasons")

    def to_dict(self) -> dict[str, Any]:
        return {
            "claim_cluster_id": self.claim_cluster_id,
            "claim_text": self.claim_text,
            "member_prop_ids": list(self.member_prop_ids),
            "reasons": [r.to_dict() for r in self.reasons],
        }

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> SummaryEntry:
        return cls(int(d["claim_cluster_id"]), d["claim_text"],
                   tuple(SummaryReason.from_dict(r) for r in d.get("reasons", ())),
                   tuple(int(x) for x in d.get("member_prop_ids", ())))


@dataclass(frozen=True)
class StructuredSummary:
    entries: tuple[SummaryEntry, ...]
    thread_id: str = ""
    topic: str = ""
    failed_claim_cluster_ids: tuple[int, ...] = field(default=())

    def __post_init__(self) -> None:
        object.__setattr__(self, "entries", tuple(self.entries))
        object.__setattr__(self, "failed_claim_cluster_ids", tuple(self.failed_claim_cluster_ids))
        ids = [e.claim_cluster_id for e in self.entries]
        if len(ids) != len(set(ids)):
            raise ValidationError("claim cluster appears more than once", field="entries")

    def arguments(self) -> list[str]:
        """Claims and reasons flattened in display order."""
        out = []
        for e in self.entries:
            out.append(e.claim_text)
            out.extend(r.reason_text for r in e.reasons)
        return out

    def to_dict(self) -> dict[str, Any]:
        return {
            "thread_id": self.thread_id,
            "topic": self.topic,
            "entries": [e.to_dict() for e in self.entries],
            "failed_claim_cluster_ids": list(self.failed_claim_cluster_ids),
        }

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> StructuredSummary:
        return cls(tuple(SummaryEntry.from_dict(e) for e in d["entries"]),
                   d.get("thread_id", ""), d.get("topic", ""),
                   tuple(int(x) for x in d.get("failed_claim_cluster_ids", ())))


def check_claim_partition(props: Sequence[Proposition], clusters: Sequence[ClaimCluster]) -> None:
    """Raise unless ``clusters`` partition the prop ids of ``props``."""
    seen: set[int] = set()
    for c in clusters:
        overlap = seen.intersection(c.member_prop_ids)
        if overlap:
            raise ValidationError(f"prop ids {sorted(overlap)} in more than one claim cluster")
        seen.update(c.member_prop_ids)
    expected = {p.prop_id for p in props}
    if seen != expected:
        raise ValidationError(f"claim clusters cover {sorted(seen)}, expected {sorted(expected)}")


def check_reason_partition(props: Sequence[Proposition], claim_clusters: Sequence[ClaimCluster],
                           reason_clusters: Sequence[ReasonCluster]) -> None:
    by_id = {p.prop_id: p for p in props}
    for cc in claim_clusters:
        expected = {ref for pid in cc.member_prop_ids for ref in by_id[pid].reason_refs()}
        seen: set[ReasonRef] = set()
        for rc in reason_clusters:
            if rc.parent_claim_cluster_id != cc.cluster_id:
                continue
            if seen.intersection(rc.member_reason_refs):
                raise ValidationError(f"reason refs overlap inside claim cluster {cc.cluster_id}")
            seen.update(rc.member_reason_refs)
        if seen != expected:
            raise ValidationError(f"reason clusters of claim cluster {cc.cluster_id} do not cover its reasons")
    known = {cc.cluster_id for cc in claim_clusters}
    for rc in reason_clusters:
        if rc.parent_claim_cluster_id not in known:
            raise ValidationError(f"reason cluster {rc.cluster_id} has unknown parent {rc.parent_claim_cluster_id}")


def check_summary(summary: StructuredSummary, props: Sequence[Proposition],
                  claim_clusters: Sequence[ClaimCluster],
                  reason_clusters: Sequence[ReasonCluster]) -> None:
    """Raise unless every summary entry is consistent with the clustering.

    Checks id existence, prevalence == member count, and conservation: the
    prevalences under each generated entry sum to the size of that claim
    cluster's aggregated reason set.
    """
    claims = {c.cluster_id: c for c in claim_clusters}
    reasons = {r.cluster_id: r for r in reason_clusters}
    by_id = {p.prop_id: p for p in props}
    for e in summary.entries:
        cc = claims.get(e.claim_cluster_id)
        if cc is None:
            raise ValidationError(f"unknown claim cluster {e.claim_cluster_id}")
        if e.member_prop_ids and tuple(e.member_prop_ids) != tuple(cc.member_prop_ids):
            raise ValidationError(f"entry {e.claim_cluster_id} members differ from its cluster")
        total = 0
        for r in e.reasons:
            rc = reasons.get(r.reason_cluster_id)
            if rc is None or rc.parent_claim_cluster_id != cc.cluster_id:
                raise ValidationError(f"entry {e.claim_cluster_id} references foreign reason cluster {r.reason_cluster_id}")
            if r.prevalence != rc.prevalence:
                raise ValidationError(f"reason cluster {rc.cluster_id}: prevalence {r.prevalence} != {rc.prevalence}")
            total += r.prevalence
        aggregated = sum(len(by_id[pid].reasons) for pid in cc.member_prop_ids)
        if total != aggregated:
            raise ValidationError(f"entry {e.claim_cluster_id}: prevalence sum {total} != {aggregated} reasons")
