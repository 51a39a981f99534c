#!/usr/bin/env python3
"""Sampled entailment scores from a toy judge, pairwise and one-to-many."""

import hashlib
import random
import re

from claimtree.entailment import EntailmentScorer, normalize
from claimtree.llm import FunctionBackend, LLMGateway


def overlap(a, b):
    wa, wb = set(a.lower().split()), set(b.lower().split())
    return len(wa & wb) / max(len(wb), 1)


def toy_judge(req):
    # word overlap plus sampling noise stands in for a real model
    rng = random.Random(hashlib.sha256(f"{req.sample_index}:{req.prompt}".encode()).digest())
    if req.prompt.startswith("You will be given two propositions"):
        a = re.search(r"^Proposition A: (.*)$", req.prompt, re.M).group(1)
        b = re.search(r"^Proposition B: (.*)$", req.prompt, re.M).group(1)
        return f"Score: {min(5, max(1, round(1 + 4 * overlap(a, b) + rng.choice([-1, 0, 0, 1]))))}"
    src = re.search(r"^Source: (.*)$", req.prompt, re.M).group(1)
    block = req.prompt.split("Targets:\n", 1)[1].split("\n\n", 1)[0]
    lines = []
    for line in block.splitlines():
        k, text = line.split(". ", 1)
        lines.append(f"{k}: {min(5, max(1, round(1 + 4 * overlap(src, text) + rng.choice([-1, 0, 1]))))}")
    return "\n".join(lines)


def main():
    scorer = EntailmentScorer(LLMGateway(FunctionBackend(toy_judge)), n_samples=5)
    a = "remote work saves commuting time"
    b = "working remote saves time"

    j = scorer.score_directed(a, b)
    print(f"samples {j.raw_samples} -> aggregate {j.aggregate:.2f} (normalized {normalize(j.aggregate):.2f})")
    print(f"bidirectional: {scorer.score_bidirectional(a, b):.2f}")

    targets = [b, "offices build team culture", "commuting time is wasted"]
    print("\none-to-many from:", a)
    for t, s in zip(targets, scorer.score_one_to_many(a, targets)):
        print(f"  {s:.2f}  {t}")


if __name__ == "__main__":
    main()
