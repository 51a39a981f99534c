"""ROUGE-N and ROUGE-L over a fixed, documented tokenization.

Tokens are maximal runs of letters and digits after lowercasing; there is no
stemming and no stopword removal.
"""

from __future__ import annotations

import re
from collections import Counter
from collections.abc import Sequence
from typing import NamedTuple

_TOKEN = re.compile(r"[^\W_]+")


class PRF(NamedTuple):
    precision: float
    recall: float
    f1: float


def tokenize(text: str) -> list[str]:
    return _TOKEN.findall(text.lower())


def _prf(overlap: int, n_cand: int, n_ref: int) -> PRF:
    if n_cand == 0 or n_ref == 0 or overlap == 0:
        return PRF(0.0, 0.0, 0.0)
    p = overlap / n_cand
    r = overlap / n_ref
    return PRF(p, r, 2 * p * r / (p + r))


def ngrams(tokens: Sequence[str], n: int) -> Counter:
    return Counter(tuple(tokens[i:i + n]) for i in range(len(tokens) - n + 1))


def rouge_n(candidate: str, reference: str, n: int = 1) -> PRF:
    if n < 1:
        raise ValueError("n must be >= 1")
    cand = ngrams(tokenize(candidate), n)
    ref = ngrams(tokenize(reference), n)
    overlap = sum((cand & ref).values())
    return _prf(overlap, sum(cand.values()), sum(ref.values()))


def lcs_length(a: Sequence[str], b: Sequence[str]) -> int:
    if len(a) < len(b):
        a, b = b, a
    prev = [0] * (len(b) + 1)
    for x in a:
        cur = [0]
        for j, y in enumerate(b):
            cur.append(prev[j] + 1 if x == y else max(prev[j + 1], cur[j]))
        prev = cur
    return prev[-1]


def rouge_l(candidate: str, reference: str) -> PRF:
    cand = tokenize(candidate)
    ref = tokenize(reference)
    return _prf(lcs_length(cand, ref), len(cand), len(ref))


def rouge_1_f1(a: str, b: str) -> float:
    return rouge_n(a, b, 1).f1


def rouge_2_f1(a: str, b: str) -> float:
    return rouge_n(a, b, 2).f1


def rouge_l_f1(a: str, b: str) -> float:
    return rouge_l(a, b).f1
