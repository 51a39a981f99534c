"""Claim/reason extraction from comments, one backend call per comment."""

from __future__ import annotations

import logging
import os
import re
from collections.abc import Mapping
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any

from . import prompts
from .errors import ExtractionError
from .llm import GenerationRequest, LLMGateway
from .model import Comment, Proposition, PropositionDraft, Thread, assign_prop_ids
from .parsing import find_json

log = logging.getLogger(__name__)

REPAIR_SUFFIX = (
    "\n\nYour previous answer could not be parsed. Answer again with only the JSON object "
    'of the form {"arguments": [{"claim": "...", "reasons": ["..."]}]} and no other text.'
)
_NO_ARGS = re.compile(r"\bno\s+arguments?\b", re.IGNORECASE)


@dataclass(frozen=True)
class Argument:
    claim: str
    reasons: tuple[str, ...] = ()


@dataclass(frozen=True)
class ExtractionOutput:
    arguments: tuple[Argument, ...] = ()


def build_extraction_prompt(comment: Comment, topic: str, prompt_dir: str | os.PathLike | None = None) -> str:
    return prompts.render(prompts.ARG_EXTRACTION, prompt_dir, topic=topic, comment=comment.text)


def _argument(item: Any, i: int, raw: str) -> Argument | None:
    if not isinstance(item, Mapping):
        raise ExtractionError(f"arguments[{i}] is not an object", raw)
    claim = item.get("claim")
    if not isinstance(claim, str):
        raise ExtractionError(f"arguments[{i}].claim missing or not a string", raw)
    if not claim.strip():
        return None
    reasons = item.get("reasons", item.get("reason", []))
    if isinstance(reasons, str):
        reasons = [reasons]
    if not isinstance(reasons, list) or not all(isinstance(r, str) for r in reasons):
        raise ExtractionError(f"arguments[{i}].reasons must be a list of strings", raw)
    # any "warrant" key is ignored on purpose
    return Argument(claim.strip(), tuple(r.strip() for r in reasons if r.strip()))


def parse_extraction_output(text: str) -> ExtractionOutput:
    record = find_json(text)
    if record is None:
        if _NO_ARGS.search(text):
            return ExtractionOutput()
        raise ExtractionError("no JSON record in extraction response", text)
    if isinstance(record, Mapping):
        if "arguments" not in record:
            if "claim" in record:
                record = [record]
            else:
                raise ExtractionError("extraction record has no 'arguments' field", text)
        else:
            record = record["arguments"]
    if not isinstance(record, list):
        raise ExtractionError("'arguments' must be a list", text)
    args = [_argument(item, i, text) for i, item in enumerate(record)]
    return ExtractionOutput(tuple(a for a in args if a is not None))


@dataclass
class Extractor:
    gateway: LLMGateway
    temperature: float = 0.0
    max_tokens: int = 1024
    prompt_dir: str | os.PathLike | None = None
    workers: int = 1
    strict: bool = False
    failures: dict[str, str] = field(default_factory=dict)

    def extract_comment(self, comment: Comment, topic: str) -> ExtractionOutput:
        """One call, plus one repair reprompt if the first answer does not parse."""
        prompt = build_extraction_prompt(comment, topic, self.prompt_dir)
        text = self.gateway.complete(GenerationRequest(prompt, self.temperature, self.max_tokens)).text
        try:
            return parse_extraction_output(text)
        except ExtractionError:
            repaired = self.gateway.complete(
                GenerationRequest(prompt + REPAIR_SUFFIX, self.temperature, self.max_tokens)).text
            try:
                return parse_extraction_output(repaired)
            except ExtractionError as exc:
                raise ExtractionError(f"comment {comment.comment_id}: {exc}", exc.raw) from exc

    def _safe_extract(self, comment: Comment, topic: str) -> ExtractionOutput:
        try:
            return self.extract_comment(comment, topic)
        except ExtractionError as exc:
            if self.strict:
                raise
            log.warning("treating comment %s as argument-free: %s", comment.comment_id, exc)
            self.failures[comment.comment_id] = exc.raw or ""
            return ExtractionOutput()

    def extract_propositions(self, thread: Thread) -> list[Proposition]:
        def run(c: Comment) -> ExtractionOutput:
            return self._safe_extract(c, thread.topic)

        if self.workers > 1:
            with ThreadPoolExecutor(self.workers) as pool:
                outputs = list(pool.map(run, thread.comments))
        else:
            outputs = [run(c) for c in thread.comments]
        drafts = [
            PropositionDraft(c.comment_id, a.claim, a.reasons)
            for c, out in zip(thread.comments, outputs)
            for a in out.arguments
        ]
        return assign_prop_ids(drafts)


def extract_propositions(thread: Thread, gateway: LLMGateway, **kwargs: Any) -> list[Proposition]:
    return Extractor(gateway, **kwargs).extract_propositions(thread)
