from .bradley_terry import (BradleyTerryResult, ComparisonRecord, bradley_terry_fit, bradley_terry_mm,
                            read_comparisons)
from .judges import judge_match, judge_support
from .labels import three_way_label
from .matching import MatchJudgment, MatchPRF, match_prf, summary_alignment, support_precision
from .rouge import PRF, rouge_1_f1, rouge_2_f1, rouge_l, rouge_l_f1, rouge_n, tokenize
from .soft import ScoreFileSimilarity, SoftPRF, exact_match, soft_prf

__all__ = [
    "BradleyTerryResult", "ComparisonRecord", "MatchJudgment", "MatchPRF", "PRF", "ScoreFileSimilarity",
    "SoftPRF", "bradley_terry_fit", "bradley_terry_mm", "exact_match", "judge_match", "judge_support",
    "match_prf", "read_comparisons", "rouge_1_f1", "rouge_2_f1", "rouge_l", "rouge_l_f1", "rouge_n",
    "soft_prf", "summary_alignment", "support_precision", "three_way_label", "tokenize",
]
