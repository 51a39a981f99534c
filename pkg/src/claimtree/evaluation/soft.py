"""Soft precision/recall/F1 between two argument sets.

Soft precision averages, over generated items, the best similarity to any
reference item; soft recall does the same from the reference side.
"""

from __future__ import annotations

import json
import os
from collections.abc import Callable, Sequence
from pathlib import Path
from typing import NamedTuple

from ..errors import ValidationError

Similarity = Callable[[str, str], float]


class SoftPRF(NamedTuple):
    sP: float
    sR: float
    sF1: float


def harmonic_mean(p: float, r: float) -> float:
    return 0.0 if p + r == 0 else 2 * p * r / (p + r)


def soft_prf(generated: Sequence[str], reference: Sequence[str], f: Similarity) -> SoftPRF:
    """``f(generated_item, reference_item)`` must be [0, 1]-valued.

    Both sides are treated as sets: repeated items are dropped before
    averaging. The similarity is always called with the generated item
    first, also when computing recall.
    """
    generated, reference = list(dict.fromkeys(generated)), list(dict.fromkeys(reference))
    if not generated:
        raise ValidationError("generated argument set is empty", field="generated")
    if not reference:
        raise ValidationError("reference argument set is empty", field="reference")
    sim = [[f(a, b) for b in reference] for a in generated]
    sp = sum(max(row) for row in sim) / len(generated)
    sr = sum(max(sim[i][j] for i in range(len(generated))) for j in range(len(reference))) / len(reference)
    return SoftPRF(sp, sr, harmonic_mean(sp, sr))


def exact_match(a: str, b: str) -> float:
    return 1.0 if a == b else 0.0


class ScoreFileSimilarity:
    """Similarity looked up from precomputed scores (e.g. BERTScore or BLEURT).

    The file is JSON lines, ``{"generated": ..., "reference": ..., "score": ...}``.
    Missing pairs raise ``KeyError``.
    """

    def __init__(self, path: str | os.PathLike):
        self.scores: dict[tuple[str, str], float] = {}
        for line in Path(path).read_text(encoding="utf-8").splitlines():
            if line.strip():
                rec = json.loads(line)
                self.scores[(rec["generated"], rec["reference"])] = float(rec["score"])

    def __call__(self, a: str, b: str) -> float:
        return self.scores[(a, b)]
