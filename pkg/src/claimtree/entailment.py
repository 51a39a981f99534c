"""Sampled 1-5 entailment scores aggregated by sample frequency.

A score is estimated by sampling the judge ``n`` times and taking
``sum_s p(s) * s`` with ``p`` the empirical frequency of each score value,
which is exactly the sample mean. On the pipeline's scale 5 means the
premise fully supports the hypothesis.
"""

from __future__ import annotations

import os
import re
from collections import Counter
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from . import prompts
from .errors import ScoreParseError, ValidationError
from .llm import GenerationRequest, LLMGateway

SCORE_MIN = 1
SCORE_MAX = 5

SCORE_REPAIR_SUFFIX = "\n\nAnswer with only one integer from 1 to 5."
BATCH_REPAIR_SUFFIX = (
    "\n\nSome targets were missing from your previous answer. Answer again with exactly one "
    'line "<target number>: <score>" for every target and nothing else.'
)
_INT = re.compile(r"\d+")
_BATCH_LINE = re.compile(r"^\s*\[?(\d+)\]?\s*[:=)\].-]\s*\D{0,20}?([1-5])\b")


@dataclass(frozen=True)
class EntailmentJudgment:
    premise: str
    hypothesis: str
    raw_samples: tuple[int, ...]
    aggregate: float


def parse_score_token(text: str) -> int:
    """First integer in ``text`` that falls in [1, 5]."""
    for m in _INT.finditer(text):
        v = int(m.group())
        if SCORE_MIN <= v <= SCORE_MAX:
            return v
    raise ScoreParseError(f"no score in [1, 5] found in {text[:80]!r}", text)


def aggregate_score(samples: Sequence[int]) -> float:
    if len(samples) == 0:
        raise ValidationError("cannot aggregate an empty sample list", field="samples")
    n = len(samples)
    # sum over distinct values of p(s) * s; counts are summed before dividing
    # so the result is exactly the sample mean in floating point
    counts = Counter(samples)
    return sum(c * s for s, c in counts.items()) / n


def normalize(score: float) -> float:
    """Map [1, 5] linearly onto [0, 1]."""
    if not SCORE_MIN <= score <= SCORE_MAX:
        raise ValidationError(f"score {score} outside [1, 5]", field="score")
    return (score - SCORE_MIN) / (SCORE_MAX - SCORE_MIN)


def parse_batch_scores(text: str, n_targets: int) -> dict[int, int]:
    """Scores keyed by 0-based target index from lines ``<1-based index>: <score>``."""
    out: dict[int, int] = {}
    for line in text.splitlines():
        m = _BATCH_LINE.match(line)
        if not m:
            continue
        idx = int(m.group(1)) - 1
        if 0 <= idx < n_targets and idx not in out:
            out[idx] = int(m.group(2))
    return out


class EntailmentScorer:
    def __init__(self, gateway: LLMGateway, n_samples: int = 5, temperature: float = 1.0,
                 max_tokens: int = 16, prompt_dir: str | os.PathLike | None = None, workers: int = 1):
        if n_samples < 1:
            raise ValidationError("n_samples must be >= 1", field="n_samples")
        self.gateway = gateway
        self.n_samples = n_samples
        self.temperature = temperature
        self.max_tokens = max_tokens
        self.prompt_dir = prompt_dir
        self.workers = workers

    def pairwise_prompt(self, premise: str, hypothesis: str) -> str:
        return prompts.render(prompts.ENTAILMENT_PAIRWISE, self.prompt_dir, premise=premise, hypothesis=hypothesis)

    def batch_prompt(self, source: str, targets: Sequence[str]) -> str:
        listing = "\n".join(f"{i}. {t}" for i, t in enumerate(targets, start=1))
        return prompts.render(prompts.ENTAILMENT_BATCH, self.prompt_dir, source=source, targets=listing)

    def _complete(self, prompt: str, i: int, max_tokens: int | None = None) -> str:
        req = GenerationRequest(prompt, self.temperature, max_tokens or self.max_tokens, i)
        return self.gateway.complete(req).text

    def _sample(self, prompt: str, i: int) -> int:
        try:
            return parse_score_token(self._complete(prompt, i))
        except ScoreParseError:
            return parse_score_token(self._complete(prompt + SCORE_REPAIR_SUFFIX, i))

    def score_directed(self, premise: str, hypothesis: str) -> EntailmentJudgment:
        if not premise.strip() or not hypothesis.strip():
            raise ValidationError("premise and hypothesis must be non-empty")
        prompt = self.pairwise_prompt(premise, hypothesis)
        samples = tuple(self._sample(prompt, i) for i in range(self.n_samples))
        return EntailmentJudgment(premise, hypothesis, samples, aggregate_score(samples))

    def score_bidirectional(self, a: str, b: str) -> float:
        return (self.score_directed(a, b).aggregate + self.score_directed(b, a).aggregate) / 2

    def judge_one_to_many(self, source: str, targets: Sequence[str]) -> list[EntailmentJudgment]:
        """Score ``source`` against every target with one prompt per sample.

        A sample missing some targets gets one repair reprompt; targets still
        missing after that are re-scored pairwise with :meth:`score_directed`.
        """
        if not targets:
            raise ValidationError("targets must be non-empty", field="targets")
        prompt = self.batch_prompt(source, targets)
        budget = max(self.max_tokens, 8 * len(targets))
        per_target: list[list[int]] = [[] for _ in targets]
        missing: set[int] = set()
        for i in range(self.n_samples):
            got = parse_batch_scores(self._complete(prompt, i, budget), len(targets))
            if len(got) < len(targets):
                retry = parse_batch_scores(self._complete(prompt + BATCH_REPAIR_SUFFIX, i, budget), len(targets))
                if len(retry) == len(targets):
                    got = retry
            for j in range(len(targets)):
                if j in got:
                    per_target[j].append(got[j])
                else:
                    missing.add(j)
        out = []
        for j, t in enumerate(targets):
            if j in missing:
                out.append(self.score_directed(source, t))
            else:
                s = tuple(per_target[j])
                out.append(EntailmentJudgment(source, t, s, aggregate_score(s)))
        return out

    def score_one_to_many(self, source: str, targets: Sequence[str]) -> list[float]:
        return [j.aggregate for j in self.judge_one_to_many(source, targets)]

    def score_rows(self, sources: Sequence[str], targets_per_source: Sequence[Sequence[str]],
                   batch: bool = True) -> list[list[float]]:
        """``score_one_to_many`` (or its pairwise equivalent) for many sources."""
        def row(k: int) -> list[float]:
            targets = targets_per_source[k]
            if not targets:
                return []
            if batch:
                return self.score_one_to_many(sources[k], targets)
            return [self.score_directed(sources[k], t).aggregate for t in targets]

        if self.workers > 1:
            with ThreadPoolExecutor(self.workers) as pool:
                return list(pool.map(row, range(len(sources))))
        return [row(k) for k in range(len(sources))]
