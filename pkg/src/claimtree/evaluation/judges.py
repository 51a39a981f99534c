"""LLM judges for match and support labels."""

from __future__ import annotations

import os
import re

from .. import prompts
from ..errors import JudgeParseError
from ..llm import GenerationRequest, LLMGateway
from .matching import MatchJudgment

_NON_MATCH = re.compile(r"\b(non[-_ ]?match|no[-_ ]match|not\s+a\s+match|mismatch)\b", re.IGNORECASE)
_MATCH = re.compile(r"\bmatch(es|ed)?\b", re.IGNORECASE)
_SUPPORTS = re.compile(r"\bsupports?\b", re.IGNORECASE)
_REFUTES = re.compile(r"\brefutes?\b", re.IGNORECASE)

LABEL_REPAIR_SUFFIX = "\n\nAnswer with exactly one of the allowed words and nothing else."


def parse_match_label(text: str) -> str:
    if _NON_MATCH.search(text):
        return "non_match"
    if _MATCH.search(text):
        return "match"
    raise JudgeParseError(f"no match label in {text[:80]!r}", text)


def parse_support_label(text: str) -> str:
    s, r = _SUPPORTS.search(text), _REFUTES.search(text)
    if s and r:
        return "supports" if s.start() < r.start() else "refutes"
    if s:
        return "supports"
    if r:
        return "refutes"
    raise JudgeParseError(f"no support label in {text[:80]!r}", text)


def _ask(gateway: LLMGateway, prompt: str, parse, temperature: float) -> str:
    text = gateway.complete(GenerationRequest(prompt, temperature, 16)).text
    try:
        return parse(text)
    except JudgeParseError:
        return parse(gateway.complete(GenerationRequest(prompt + LABEL_REPAIR_SUFFIX, temperature, 16)).text)


def judge_match(gateway: LLMGateway, generated_id: str, generated_text: str, original_id: str,
                original_text: str, level: str, topic: str = "", temperature: float = 0.0,
                prompt_dir: str | os.PathLike | None = None) -> MatchJudgment:
    prompt = prompts.render(prompts.MATCH_JUDGE, prompt_dir, topic=topic, level=level,
                            original=original_text, generated=generated_text)
    label = _ask(gateway, prompt, parse_match_label, temperature)
    return MatchJudgment(generated_id, original_id, level, label)


def judge_support(gateway: LLMGateway, claim: str, reason: str, temperature: float = 0.0,
                  prompt_dir: str | os.PathLike | None = None) -> str:
    prompt = prompts.render(prompts.SUPPORT_JUDGE, prompt_dir, claim=claim, reason=reason)
    return _ask(gateway, prompt, parse_support_label, temperature)
