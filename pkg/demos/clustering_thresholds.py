#!/usr/bin/env python3
"""How the edge threshold controls claim-cluster granularity on a synthetic score table."""

import numpy as np

from claimtree.clustering import (ClaimScores, ClusterConfig, alignment_matrix, build_claim_graph,
                                  claim_clusters_from_graph)
from claimtree.model import Proposition


def main():
    rng = np.random.default_rng(0)
    n = 8
    props = [Proposition(i, f"c{i}", f"claim {i}", ("r",) * (i % 3)) for i in range(n)]

    # two planted viewpoints: claims 0-3 and 4-7 agree internally
    group = np.array([0, 0, 0, 0, 1, 1, 1, 1])
    same = group[:, None] == group[None, :]
    entail = np.where(same, rng.uniform(3.0, 5.0, (n, n)), rng.uniform(1.0, 3.4, (n, n)))
    np.fill_diagonal(entail, np.nan)
    support = {}
    for p in props:
        for ref in p.reason_refs():
            v = np.where(same[p.prop_id], rng.uniform(3.0, 5.0, n), rng.uniform(1.0, 3.0, n))
            v[p.prop_id] = np.nan
            support[ref] = v
    scores = ClaimScores(entail, support)

    s = alignment_matrix(props, scores, ClusterConfig())
    print("alignment scores s(m, n):")
    for row in s:
        print("  " + " ".join("  -  " if np.isnan(x) else f"{x:.2f} " for x in row))

    for tau in (0.3, 0.5, 0.6, 0.7, 0.8):
        clusters = claim_clusters_from_graph(build_claim_graph(props, scores, ClusterConfig(tau=tau)))
        print(f"tau={tau:.1f}: {[list(c.member_prop_ids) for c in clusters]}")


if __name__ == "__main__":
    main()
