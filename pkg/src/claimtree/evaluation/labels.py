"""Three-way NLI labels from continuous 1-5 entailment scores.

The bands are [1, 2.5] / (2.5, 3.5) / [3.5, 5]. With
``entailment_high=True`` (the pipeline's orientation, 5 = full support) the
top band is entailment; with ``False`` the bottom band is, which is the
orientation used when validating scores against human NLI labels.
"""

from __future__ import annotations

from ..errors import ValidationError


def three_way_label(score: float, entailment_high: bool = True) -> str:
    if not 1.0 <= score <= 5.0:
        raise ValidationError(f"score {score} outside [1, 5]", field="score")
    if score <= 2.5:
        band = "low"
    elif score < 3.5:
        band = "mid"
    else:
        band = "high"
    if band == "mid":
        return "neutral"
    if (band == "high") == entailment_high:
        return "entailment"
    return "contradiction"
