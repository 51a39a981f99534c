import pytest

from claimtree.errors import ValidationError
from claimtree.evaluation import MatchJudgment, match_prf, summary_alignment, support_precision
from claimtree.model import StructuredSummary, SummaryEntry, SummaryReason


def J(g, o, level="claim", label="match"):
    return MatchJudgment(g, o, level, label)


def test_perfect():
    pairs = [(f"g{i}", f"o{i}") for i in range(5)]
    assert tuple(match_prf(pairs, [J(g, o) for g, o in pairs], "claim")) == (1.0, 1.0, 1.0)


def test_formula():
    truth = [J("g1", "o1"), J("g2", "o2"), J("g3", "o3"), J("g4", "o4"), J("g5", "o5", label="non_match")]
    p, r, f = match_prf([("g1", "o1"), ("g2", "o2"), ("g5", "o5")], truth, "claim")
    assert (p, r) == pytest.approx((2 / 3, 0.5))
    assert f == pytest.approx(4 / 7)


def test_empty_sets_give_none():
    p, r, f = match_prf([], [J("g", "o")], "claim")
    assert p is None and r == 0.0 and f is None
    p, r, f = match_prf([("g", "o")], [], "claim")
    assert p == 0.0 and r is None and f is None


GEN_PARENT = {"reason:0": "claim:0", "reason:1": "claim:1"}
ORIG_PARENT = {"reason:0:0": "claim:0", "reason:1:0": "claim:1"}


def test_claim_reason_requires_parent_match():
    judgments = [
        J("claim:0", "claim:0"),  # only the first parent pair matches
        J("reason:0", "reason:0:0", "reason"),
        J("reason:1", "reason:1:0", "reason"),
    ]
    pred = [("reason:0", "reason:0:0"), ("reason:1", "reason:1:0")]
    assert match_prf(pred, judgments, "reason").precision == 1.0
    p, r, _ = match_prf(pred, judgments, "claim_reason", GEN_PARENT, ORIG_PARENT)
    assert p == 0.5 and r == 1.0


def test_claim_reason_not_above_min_precision():
    judgments = [J("claim:0", "claim:0"), J("claim:1", "claim:1", label="non_match"),
                 J("reason:0", "reason:0:0", "reason"), J("reason:1", "reason:1:0", "reason", "non_match")]
    claims = [("claim:0", "claim:0"), ("claim:1", "claim:1")]
    reasons = [("reason:0", "reason:0:0"), ("reason:1", "reason:1:0")]
    cr = match_prf(reasons, judgments, "claim_reason", GEN_PARENT, ORIG_PARENT).precision
    assert cr <= min(match_prf(claims, judgments, "claim").precision,
                     match_prf(reasons, judgments, "reason").precision)


def test_claim_reason_needs_parents():
    with pytest.raises(ValidationError):
        match_prf([], [], "claim_reason")


def test_bad_level_and_label():
    with pytest.raises(ValidationError):
        match_prf([], [], "sentence")
    with pytest.raises(ValidationError):
        J("a", "b", label="maybe")
    with pytest.raises(ValidationError):
        J("a", "b", level="claim_reason")


@pytest.mark.parametrize("labels,expected", [(["supports"] * 4 + ["refutes"], 0.8), (["supports"] * 3, 1.0),
                                             (["refutes"] * 2, 0.0)])
def test_support_precision(labels, expected):
    assert support_precision(labels) == expected


def test_support_precision_validation():
    with pytest.raises(ValidationError):
        support_precision([])
    with pytest.raises(ValidationError):
        support_precision(["perhaps"])


def test_summary_alignment():
    summary = StructuredSummary((
        SummaryEntry(0, "A", (SummaryReason(0, "ra", 2, ((0, 0), (1, 0))),), (0, 1)),
        SummaryEntry(1, "B", (), (2,)),
    ))
    al = summary_alignment(summary)
    assert al.predicted_claims == {("claim:0", "claim:0"), ("claim:0", "claim:1"), ("claim:1", "claim:2")}
    assert al.predicted_reasons == {("reason:0", "reason:0:0"), ("reason:0", "reason:1:0")}
    assert al.generated_parent == {"reason:0": "claim:0"}
    assert al.original_parent == {"reason:0:0": "claim:0", "reason:1:0": "claim:1"}
    assert al.generated_text["claim:1"] == "B"
