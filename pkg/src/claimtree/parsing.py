from __future__ import annotations

import json
import re
from typing import Any

_FENCE = re.compile(r"```(?:json)?\s*(.*?)```", re.DOTALL)
_decoder = json.JSONDecoder()


def find_json(text: str) -> Any | None:
    """Return the first JSON object or array embedded in ``text``.

    Tolerates prose before and after the record and markdown code fences.
    Returns None when nothing decodes.
    """
    candidates = [m.group(1) for m in _FENCE.finditer(text)] + [text]
    for chunk in candidates:
        for i, ch in enumerate(chunk):
            if ch not in "{[":
                continue
            try:
                value, _ = _decoder.raw_decode(chunk, i)
            except json.JSONDecodeError:
                continue
            if isinstance(value, (dict, list)):
                return value
    return None
