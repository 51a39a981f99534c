"""Bradley-Terry strengths from pairwise comparisons by MM iteration.

Each sweep applies the minorization-maximization update
``pi_i <- W_i / sum_j n_ij / (pi_i + pi_j)`` (``W_i`` wins of i, ``n_ij``
comparisons between i and j) and rescales strengths to sum to one.
"""

from __future__ import annotations

import csv
import math
import os
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..errors import ValidationError


@dataclass(frozen=True)
class ComparisonRecord:
    winner_id: str
    loser_id: str
    count: int = 1

    def __post_init__(self) -> None:
        if self.winner_id == self.loser_id:
            raise ValidationError(f"self-comparison of {self.winner_id!r}")
        if self.count < 1:
            raise ValidationError("count must be positive", field="count")


@dataclass
class BradleyTerryResult:
    strengths: dict[str, float]
    iterations: int
    converged: bool
    smoothed: bool
    log_likelihoods: list[float] = field(default_factory=list)

    def win_probability(self, a: str, b: str) -> float:
        return self.strengths[a] / (self.strengths[a] + self.strengths[b])

    def ranking(self) -> list[str]:
        return sorted(self.strengths, key=lambda k: (-self.strengths[k], k))


def read_comparisons(path: str | os.PathLike) -> list[ComparisonRecord]:
    """Delimited file with a ``winner,loser,count`` header (count optional)."""
    text = Path(path).read_text(encoding="utf-8")
    dialect = csv.Sniffer().sniff(text.splitlines()[0], delimiters=",\t;") if text.strip() else csv.excel
    out = []
    for lineno, row in enumerate(csv.DictReader(text.splitlines(), dialect=dialect), start=2):
        try:
            out.append(ComparisonRecord(row["winner"].strip(), row["loser"].strip(), int(row.get("count") or 1)))
        except (KeyError, ValueError, AttributeError) as exc:
            raise ValidationError(f"line {lineno}: {exc}") from exc
    return out


def win_matrix(records: Iterable[ComparisonRecord]) -> tuple[list[str], np.ndarray]:
    records = list(records)
    ids = sorted({r.winner_id for r in records} | {r.loser_id for r in records})
    index = {p: i for i, p in enumerate(ids)}
    w = np.zeros((len(ids), len(ids)))
    for r in records:
        w[index[r.winner_id], index[r.loser_id]] += r.count
    return ids, w


def _components(adj: np.ndarray) -> list[list[int]]:
    n = len(adj)
    seen = [False] * n
    comps = []
    for s in range(n):
        if seen[s]:
            continue
        stack, comp = [s], []
        seen[s] = True
        while stack:
            u = stack.pop()
            comp.append(u)
            for v in np.flatnonzero(adj[u]):
                if not seen[v]:
                    seen[v] = True
                    stack.append(v)
        comps.append(sorted(comp))
    return comps


def _strongly_connected(w: np.ndarray) -> bool:
    """Every participant reaches every other along 'beat' edges."""
    n = len(w)
    if n <= 1:
        return True

    def reach(adj: np.ndarray) -> int:
        seen = {0}
        stack = [0]
        while stack:
            u = stack.pop()
            for v in np.flatnonzero(adj[u]):
                if v not in seen:
                    seen.add(int(v))
                    stack.append(int(v))
        return len(seen)

    beats = w > 0
    return reach(beats) == n and reach(beats.T) == n


def log_likelihood(w: np.ndarray, pi: np.ndarray) -> float:
    total = 0.0
    n = len(pi)
    for i in range(n):
        for j in range(n):
            if w[i, j] > 0:
                total += w[i, j] * math.log(pi[i] / (pi[i] + pi[j]))
    return total


def bradley_terry_mm(records: Sequence[ComparisonRecord], tol: float = 1e-8, max_iter: int = 1000,
                     smoothing: float = 0.5, init: Sequence[float] | None = None) -> BradleyTerryResult:
    """Maximum-likelihood strengths, normalized to sum to one.

    When the win graph is not strongly connected (some participant never
    wins, or a group never beats the rest) the MLE is not finite; then
    ``smoothing`` pseudo-wins are added in both directions of every observed
    pair. Otherwise the data are fit as given.
    """
    ids, w = win_matrix(records)
    if not ids:
        raise ValidationError("no comparisons")
    played = (w + w.T) > 0
    comps = _components(played)
    if len(comps) > 1:
        names = [[ids[i] for i in c] for c in comps]
        raise ValidationError(f"comparison graph is disconnected: components {names}")
    smoothed = False
    if not _strongly_connected(w):
        if smoothing <= 0:
            raise ValidationError("maximum likelihood is not finite and smoothing is disabled")
        w = w + smoothing * played
        smoothed = True

    n = len(ids)
    games = w + w.T
    wins = w.sum(axis=1)
    pi = np.ones(n) if init is None else np.asarray(init, dtype=float).copy()
    if pi.shape != (n,) or np.any(pi <= 0):
        raise ValidationError("init must hold one positive strength per participant")
    pi /= pi.sum()
    lls = [log_likelihood(w, pi)]
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        denom = np.zeros(n)
        for i in range(n):
            mask = games[i] > 0
            denom[i] = np.sum(games[i, mask] / (pi[i] + pi[mask]))
        new = wins / denom
        new /= new.sum()
        change = np.max(np.abs(new - pi) / pi)
        pi = new
        lls.append(log_likelihood(w, pi))
        if change < tol:
            converged = True
            break
    return BradleyTerryResult({p: float(v) for p, v in zip(ids, pi)}, it, converged, smoothed, lls)


def bradley_terry_fit(records: Sequence[ComparisonRecord], tol: float = 1e-8,
                      max_iter: int = 1000) -> dict[str, float]:
    return bradley_terry_mm(records, tol, max_iter).strengths
