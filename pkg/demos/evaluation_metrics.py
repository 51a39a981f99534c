#!/usr/bin/env python3
"""Soft set-level ROUGE and judged match precision/recall on a hand-made example."""

from claimtree.evaluation import (MatchJudgment, match_prf, rouge_1_f1, rouge_2_f1, rouge_l_f1, soft_prf,
                                  support_precision)

generated = ["Buy the Saris Bones 3", "Fits sedans well", "Avoid roof racks on sedans"]
reference = ["The Saris Bones 3 is the best rack for a sedan", "It fits most sedans",
             "Roof racks are a bad idea", "Roof racks hurt mileage"]


def main():
    print("soft P/R/F1 with ROUGE as the item similarity")
    for name, f in [("rouge1", rouge_1_f1), ("rouge2", rouge_2_f1), ("rougeL", rouge_l_f1)]:
        sp, sr, sf = soft_prf(generated, reference, f)
        print(f"  {name:<7} sP={sp:.3f} sR={sr:.3f} sF1={sf:.3f}")

    judgments = [MatchJudgment("claim:0", "claim:0", "claim", "match"),
                 MatchJudgment("claim:1", "claim:2", "claim", "match"),
                 MatchJudgment("claim:1", "claim:3", "claim", "match"),
                 MatchJudgment("claim:0", "claim:1", "claim", "non_match")]
    predicted = [("claim:0", "claim:0"), ("claim:0", "claim:1"), ("claim:1", "claim:2")]
    p, r, f1 = match_prf(predicted, judgments, "claim")
    print(f"\nclaim-level match: P={p:.3f} R={r:.3f} F1={f1:.3f}")
    print(f"support precision: {support_precision(['supports'] * 4 + ['refutes']):.2f}")


if __name__ == "__main__":
    main()
