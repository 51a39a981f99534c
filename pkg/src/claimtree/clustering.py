"""Claim clustering and reason clustering on thresholded entailment graphs.

Claims are linked when their alignment score, the mean of the normalized
bidirectional entailment score and the bidirectional ARDE score (share of
one claim's reasons scoring above ``t_support`` against the other claim),
exceeds ``tau``.
Connected components of that graph become claim clusters. The reasons of
each claim cluster are pooled and clustered the same way, using only their
normalized bidirectional entailment score.

Graph algorithms operate on precomputed raw score matrices (1-5 scale), so
the same code runs against LLM scores and synthetic test matrices.
"""

from __future__ import annotations

import math
from collections.abc import Hashable, Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .entailment import EntailmentScorer, normalize
from .errors import ValidationError
from .model import ClaimCluster, Proposition, ReasonCluster, ReasonRef


@dataclass(frozen=True)
class ClusterConfig:
    tau: float = 0.5
    t_support: float = 0.5
    n_samples: int = 5

    def __post_init__(self) -> None:
        if not 0.0 <= self.tau <= 1.0:
            raise ValidationError(f"tau {self.tau} outside [0, 1]", field="tau")
        if not 0.0 <= self.t_support <= 1.0:
            raise ValidationError(f"t_support {self.t_support} outside [0, 1]", field="t_support")
        if self.n_samples < 1:
            raise ValidationError("n_samples must be >= 1", field="n_samples")


@dataclass(frozen=True)
class AlignmentGraph:
    nodes: tuple[Hashable, ...]
    edges: Mapping[tuple[Hashable, Hashable], float] = field(default_factory=dict)

    def neighbours(self) -> dict[Hashable, list[Hashable]]:
        adj: dict[Hashable, list[Hashable]] = {n: [] for n in self.nodes}
        for a, b in self.edges:
            adj[a].append(b)
            adj[b].append(a)
        return adj


def compute_arde(reason_scores: Sequence[float], t_support: float) -> float | None:
    """Fraction of a claim's reasons whose score against another claim passes ``t_support``.

    ``reason_scores`` are raw 1-5 scores of each reason (premise) against the
    other claim (hypothesis). Returns None when the claim has no reasons.
    """
    if len(reason_scores) == 0:
        return None
    supporting = sum(1 for s in reason_scores if normalize(s) > t_support)
    return supporting / len(reason_scores)


def combined_alignment(entail_bi_norm: float, arde_mn: float | None, arde_nm: float | None) -> float:
    defined = [a for a in (arde_mn, arde_nm) if a is not None]
    if not defined:
        return entail_bi_norm
    arde_bi = sum(defined) / len(defined)
    return (entail_bi_norm + arde_bi) / 2


@dataclass
class ClaimScores:
    """Raw directed scores needed to align claims.

    ``entail[m, n]`` scores claim m against claim n (diagonal NaN).
    ``reason_support[(m, j)][n]`` scores reason j of claim m against claim n,
    indexed by position in the proposition list; the owning claim is NaN.
    """

    entail: np.ndarray
    reason_support: dict[ReasonRef, np.ndarray]

    def to_dict(self) -> dict[str, Any]:
        return {
            "entail": _nan_to_none(self.entail),
            "reason_support": [
                {"ref": list(ref), "scores": _nan_to_none(v)} for ref, v in sorted(self.reason_support.items())
            ],
        }

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> ClaimScores:
        entail = _none_to_nan(d["entail"])
        n = len(d["entail"])
        entail = entail.reshape(n, n)
        support = {tuple(r["ref"]): _none_to_nan(r["scores"]) for r in d["reason_support"]}
        return cls(entail, support)


def _nan_to_none(a: np.ndarray) -> list:
    if a.ndim > 1:
        return [_nan_to_none(row) for row in a]
    return [None if math.isnan(x) else float(x) for x in a.tolist()]


def _none_to_nan(rows: list) -> np.ndarray:
    return np.array(rows, dtype=float)


def alignment_matrix(props: Sequence[Proposition], scores: ClaimScores, cfg: ClusterConfig) -> np.ndarray:
    """Symmetric matrix of s(m, n) over proposition positions; NaN diagonal."""
    n = len(props)
    s = np.full((n, n), np.nan)
    for m in range(n):
        for k in range(m + 1, n):
            entail_bi = normalize((scores.entail[m, k] + scores.entail[k, m]) / 2)
            arde_mk = compute_arde([scores.reason_support[ref][k] for ref in props[m].reason_refs()], cfg.t_support)
            arde_km = compute_arde([scores.reason_support[ref][m] for ref in props[k].reason_refs()], cfg.t_support)
            s[m, k] = s[k, m] = combined_alignment(entail_bi, arde_mk, arde_km)
    return s


def threshold_graph(nodes: Sequence[Hashable], weights: np.ndarray, tau: float) -> AlignmentGraph:
    """Undirected graph with an edge wherever the symmetric weight is strictly above ``tau``."""
    edges = {}
    for i in range(len(nodes)):
        for j in range(i + 1, len(nodes)):
            w = float(weights[i, j])
            if w > tau:
                edges[(nodes[i], nodes[j])] = w
    return AlignmentGraph(tuple(nodes), edges)


def build_claim_graph(props: Sequence[Proposition], scores: ClaimScores, cfg: ClusterConfig) -> AlignmentGraph:
    if not props:
        raise ValidationError("need at least one proposition", field="props")
    return threshold_graph([p.prop_id for p in props], alignment_matrix(props, scores, cfg), cfg.tau)


def connected_components(graph: AlignmentGraph) -> list[tuple[Any, ...]]:
    """Components with sorted members, ordered by their smallest member."""
    parent = {n: n for n in graph.nodes}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in graph.edges:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)
    groups: dict[Any, list] = {}
    for n in graph.nodes:
        groups.setdefault(find(n), []).append(n)
    return sorted((tuple(sorted(g)) for g in groups.values()), key=lambda g: g[0])


def claim_clusters_from_graph(graph: AlignmentGraph) -> list[ClaimCluster]:
    return [ClaimCluster(k, comp) for k, comp in enumerate(connected_components(graph))]


def aggregate_reasons(cluster: ClaimCluster, props: Sequence[Proposition]) -> list[ReasonRef]:
    by_id = {p.prop_id: p for p in props}
    return sorted(ref for pid in cluster.member_prop_ids for ref in by_id[pid].reason_refs())


def reason_weight_matrix(directed: np.ndarray) -> np.ndarray:
    """Normalized bidirectional scores from a raw directed reason matrix."""
    bi = (directed + directed.T) / 2
    return (bi - 1.0) / 4.0


def cluster_reasons(reason_refs: Sequence[ReasonRef], directed: np.ndarray, cfg: ClusterConfig,
                    parent_claim_cluster_id: int, first_cluster_id: int = 0) -> list[ReasonCluster]:
    """Partition ``reason_refs`` (one claim cluster's reason pool).

    ``directed[u, v]`` is the raw score of reason u against reason v, rows and
    columns in ``reason_refs`` order.
    """
    refs = list(reason_refs)
    if not refs:
        return []
    graph = threshold_graph(refs, reason_weight_matrix(directed), cfg.tau)
    return [
        ReasonCluster(first_cluster_id + k, parent_claim_cluster_id, comp)
        for k, comp in enumerate(connected_components(graph))
    ]


def quantify(clusters: Iterable[ReasonCluster]) -> dict[int, int]:
    return {c.cluster_id: len(c.member_reason_refs) for c in clusters}


def score_claims(props: Sequence[Proposition], scorer: EntailmentScorer, batch: bool = True) -> ClaimScores:
    """Collect every directed score the claim graph needs.

    Each claim is scored against all other claims, and each reason against
    all claims other than its own.
    """
    n = len(props)
    entail = np.full((n, n), np.nan)
    others = [[k for k in range(n) if k != m] for m in range(n)]
    rows = scorer.score_rows([p.claim for p in props], [[props[k].claim for k in o] for o in others], batch)
    for m in range(n):
        for k, v in zip(others[m], rows[m]):
            entail[m, k] = v

    refs = [ref for p in props for ref in p.reason_refs()]
    pos = {p.prop_id: i for i, p in enumerate(props)}
    texts = [props[pos[pid]].reasons[j] for pid, j in refs]
    targets = [others[pos[pid]] for pid, _ in refs]
    rows = scorer.score_rows(texts, [[props[k].claim for k in t] for t in targets], batch)
    support = {}
    for ref, t, row in zip(refs, targets, rows):
        v = np.full(n, np.nan)
        v[t] = row
        support[ref] = v
    return ClaimScores(entail, support)


def score_reasons(texts: Sequence[str], scorer: EntailmentScorer, batch: bool = True) -> np.ndarray:
    n = len(texts)
    directed = np.full((n, n), np.nan)
    others = [[k for k in range(n) if k != u] for u in range(n)]
    rows = scorer.score_rows(list(texts), [[texts[k] for k in o] for o in others], batch)
    for u in range(n):
        directed[u, others[u]] = rows[u]
    return directed


@dataclass
class ClusteringResult:
    claim_clusters: list[ClaimCluster]
    reason_clusters: list[ReasonCluster]
    claim_scores: ClaimScores
    reason_scores: dict[int, np.ndarray]

    def to_dict(self) -> dict[str, Any]:
        return {
            "claim_clusters": [c.to_dict() for c in self.claim_clusters],
            "reason_clusters": [r.to_dict() for r in self.reason_clusters],
            "claim_scores": self.claim_scores.to_dict(),
            "reason_scores": [{"claim_cluster_id": k, "directed": _nan_to_none(v)}
                              for k, v in sorted(self.reason_scores.items())],
        }

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> ClusteringResult:
        reason_scores = {}
        for r in d["reason_scores"]:
            m = len(r["directed"])
            reason_scores[int(r["claim_cluster_id"])] = _none_to_nan(r["directed"]).reshape(m, m)
        return cls([ClaimCluster.from_dict(c) for c in d["claim_clusters"]],
                   [ReasonCluster.from_dict(r) for r in d["reason_clusters"]],
                   ClaimScores.from_dict(d["claim_scores"]), reason_scores)


def cluster_thread(props: Sequence[Proposition], scorer: EntailmentScorer, cfg: ClusterConfig | None = None,
                   batch: bool = True) -> ClusteringResult:
    cfg = cfg or ClusterConfig()
    props = sorted(props, key=lambda p: p.prop_id)
    if not props:
        return ClusteringResult([], [], ClaimScores(np.zeros((0, 0)), {}), {})
    claim_scores = score_claims(props, scorer, batch)
    claim_clusters = claim_clusters_from_graph(build_claim_graph(props, claim_scores, cfg))
    by_id = {p.prop_id: p for p in props}
    reason_clusters: list[ReasonCluster] = []
    reason_scores = {}
    for cc in claim_clusters:
        refs = aggregate_reasons(cc, props)
        if not refs:
            continue
        directed = score_reasons([by_id[pid].reasons[j] for pid, j in refs], scorer, batch)
        reason_scores[cc.cluster_id] = directed
        reason_clusters += cluster_reasons(refs, directed, cfg, cc.cluster_id, len(reason_clusters))
    return ClusteringResult(claim_clusters, reason_clusters, claim_scores, reason_scores)
