import json

import pytest
from hypothesis import given, strategies as st

from claimtree.errors import ValidationError
from claimtree.model import (ClaimCluster, Proposition, PropositionDraft, ReasonCluster, StructuredSummary,
                             SummaryEntry, SummaryReason, Thread, assign_prop_ids, check_claim_partition,
                             check_reason_partition, validate_thread)


def test_minimal_thread():
    t = validate_thread({"topic": "t", "comments": [{"id": "a", "text": "x"}]})
    assert len(t.comments) == 1
    assert t.comments[0].comment_id == "a"


def test_empty_comment_list():
    with pytest.raises(ValidationError, match="empty comment list"):
        validate_thread({"topic": "t", "comments": []})


def test_duplicate_comment_id():
    with pytest.raises(ValidationError, match="duplicate comment_id") as exc:
        validate_thread({"topic": "t", "comments": [{"id": "a", "text": "x"}, {"id": "a", "text": "y"}]})
    assert exc.value.field == "comments[1].comment_id"


def test_blank_text_names_field():
    with pytest.raises(ValidationError) as exc:
        validate_thread({"topic": "t", "comments": [{"id": "a", "text": "   "}]})
    assert exc.value.field == "comments[0].text"


def test_missing_ids_are_positional():
    t = validate_thread({"topic": "t", "comments": [{"text": "x"}, {"text": "y"}]})
    assert t.comment_ids() == ["c0", "c1"]


def test_assign_prop_ids():
    drafts = [PropositionDraft("a", f"claim {i}", ("r",)) for i in range(3)]
    props = assign_prop_ids(drafts)
    assert [p.prop_id for p in props] == [0, 1, 2]
    assert assign_prop_ids(drafts) == props
    assert assign_prop_ids([]) == []


def test_partition_checks():
    props = [Proposition(0, "a", "x", ("r1", "r2")), Proposition(1, "a", "y")]
    check_claim_partition(props, [ClaimCluster(0, (0, 1))])
    with pytest.raises(ValidationError):
        check_claim_partition(props, [ClaimCluster(0, (0,))])
    with pytest.raises(ValidationError):
        check_claim_partition(props, [ClaimCluster(0, (0, 1)), ClaimCluster(1, (1,))])
    cc = [ClaimCluster(0, (0, 1))]
    check_reason_partition(props, cc, [ReasonCluster(0, 0, ((0, 0),)), ReasonCluster(1, 0, ((0, 1),))])
    with pytest.raises(ValidationError):
        check_reason_partition(props, cc, [ReasonCluster(0, 0, ((0, 0),))])


def test_summary_claim_cluster_unique():
    e = SummaryEntry(0, "c")
    with pytest.raises(ValidationError):
        StructuredSummary((e, e))


text = st.text(min_size=1, max_size=20).filter(lambda s: s.strip())


@given(st.lists(st.tuples(text, st.one_of(st.none(), text)), min_size=1, max_size=5), text)
def test_thread_round_trip(items, topic):
    raw = {"thread_id": "t", "topic": topic,
           "comments": [{"comment_id": str(i), "text": x, **({"author": a} if a else {})}
                        for i, (x, a) in enumerate(items)]}
    t = validate_thread(raw)
    assert Thread.from_dict(json.loads(json.dumps(t.to_dict()))) == t


@given(st.lists(st.tuples(text, st.lists(st.tuples(text, st.integers(0, 50)), max_size=3, unique_by=lambda x: x[0])),
                max_size=4))
def test_summary_round_trip(entries):
    rid = iter(range(1000))
    summary = StructuredSummary(tuple(
        SummaryEntry(k, claim, tuple(SummaryReason(next(rid), r, n, ((k, j),)) for j, (r, n) in enumerate(rs)),
                     (k,))
        for k, (claim, rs) in enumerate(entries)), "t", "topic")
    assert StructuredSummary.from_dict(json.loads(json.dumps(summary.to_dict()))) == summary
