"""Match-level precision/recall between summary items and source arguments.

Predicted matches come from the summary's provenance (which source claim or
reason each summarized item was built from). Ground truth is the set of
pairs a judge labelled ``match``. At the ``claim_reason`` level a reason pair
only counts when the reason pair and the pair of their parent claims were
both judged a match.
"""

from __future__ import annotations

from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass
from typing import NamedTuple

from ..errors import ValidationError
from ..model import StructuredSummary

LEVELS = ("claim", "reason", "claim_reason")
LABELS = ("match", "non_match")

Pair = tuple[str, str]


@dataclass(frozen=True)
class MatchJudgment:
    generated_id: str
    original_id: str
    level: str
    label: str

    def __post_init__(self) -> None:
        if self.level not in ("claim", "reason"):
            raise ValidationError(f"judgments are made at claim or reason level, not {self.level!r}", field="level")
        if self.label not in LABELS:
            raise ValidationError(f"unknown label {self.label!r}", field="label")


class MatchPRF(NamedTuple):
    precision: float | None
    recall: float | None
    f1: float | None


def _truth(judgments: Iterable[MatchJudgment], level: str) -> set[Pair]:
    return {(j.generated_id, j.original_id) for j in judgments if j.level == level and j.label == "match"}


def match_prf(predicted: Iterable[Pair], judgments: Iterable[MatchJudgment], level: str,
              generated_parent: Mapping[str, str] | None = None,
              original_parent: Mapping[str, str] | None = None) -> MatchPRF:
    """Precision and recall of predicted pairs against judged matches.

    ``predicted`` holds (generated_id, original_id) pairs at ``level``; for
    ``claim_reason`` these are reason pairs and both parent maps (reason id to
    claim id) are required. An empty predicted or truth set leaves the
    corresponding metric as None.
    """
    if level not in LEVELS:
        raise ValidationError(f"unknown level {level!r}", field="level")
    judgments = list(judgments)
    pred = set(predicted)
    if level == "claim_reason":
        if generated_parent is None or original_parent is None:
            raise ValidationError("claim_reason level needs both parent maps")
        claim_truth = _truth(judgments, "claim")
        truth = {(g, o) for g, o in _truth(judgments, "reason")
                 if (generated_parent.get(g), original_parent.get(o)) in claim_truth}
    else:
        truth = _truth(judgments, level)
    hit = len(pred & truth)
    p = hit / len(pred) if pred else None
    r = hit / len(truth) if truth else None
    if p is None or r is None:
        f1 = None
    else:
        f1 = 0.0 if p + r == 0 else 2 * p * r / (p + r)
    return MatchPRF(p, r, f1)


def support_precision(labels: Sequence[str]) -> float:
    """Fraction of (claim, reason) judgments labelled ``supports``."""
    if not labels:
        raise ValidationError("no support judgments", field="labels")
    for lab in labels:
        if lab not in ("supports", "refutes"):
            raise ValidationError(f"unknown support label {lab!r}")
    return sum(1 for lab in labels if lab == "supports") / len(labels)


@dataclass(frozen=True)
class SummaryAlignment:
    """Ids and predicted pairs derived from a summary's provenance.

    Generated ids are ``claim:<claim_cluster_id>`` and
    ``reason:<reason_cluster_id>``; original ids are ``claim:<prop_id>`` and
    ``reason:<prop_id>:<reason_index>``.
    """

    predicted_claims: frozenset[Pair]
    predicted_reasons: frozenset[Pair]
    generated_parent: dict[str, str]
    original_parent: dict[str, str]
    generated_text: dict[str, str]


def summary_alignment(summary: StructuredSummary) -> SummaryAlignment:
    claims, reasons = set(), set()
    gparent, oparent, text = {}, {}, {}
    for e in summary.entries:
        gc = f"claim:{e.claim_cluster_id}"
        text[gc] = e.claim_text
        for pid in e.member_prop_ids:
            claims.add((gc, f"claim:{pid}"))
        for r in e.reasons:
            gr = f"reason:{r.reason_cluster_id}"
            text[gr] = r.reason_text
            gparent[gr] = gc
            for pid, j in r.member_reason_refs:
                orig = f"reason:{pid}:{j}"
                reasons.add((gr, orig))
                oparent[orig] = f"claim:{pid}"
    return SummaryAlignment(frozenset(claims), frozenset(reasons), gparent, oparent, text)
