"""Prompt template assets.

Templates use :class:`string.Template` ``$name`` slots so that literal JSON
braces in the instructions need no escaping.
"""

from __future__ import annotations

import os
from pathlib import Path
from string import Template

from ..errors import MissingPromptError

PROMPT_DIR = Path(__file__).parent

ARG_EXTRACTION = "arg_extraction.txt"
ENTAILMENT_PAIRWISE = "entailment_pairwise.txt"
ENTAILMENT_BATCH = "entailment_batch.txt"
SUMMARY_GENERATION = "summary_generation.txt"
MATCH_JUDGE = "match_judge.txt"
SUPPORT_JUDGE = "support_judge.txt"


def load_prompt(name: str, prompt_dir: str | os.PathLike | None = None) -> Template:
    path = Path(prompt_dir or PROMPT_DIR) / name
    try:
        return Template(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise MissingPromptError(f"missing prompt asset {path}") from None


def render(name: str, prompt_dir: str | os.PathLike | None = None, **slots: object) -> str:
    return load_prompt(name, prompt_dir).substitute({k: str(v) for k, v in slots.items()})
