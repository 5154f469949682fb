"""Entropy vectors of random graph models: SA/SSA verdicts and cut checks.

    python scripts/graph_survey.py [--graphs 200] [--parties 4]
"""

import argparse
from collections import Counter

from downset_rays.graphs import even_degree_check, graph_entropy, star_graph
from downset_rays.oracle import brute_force_graph_entropy, random_graph
from downset_rays.sac import PartySystem, format_entropy_vector, sa_check, ssa_check


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--graphs", type=int, default=200)
    ap.add_argument("--parties", type=int, default=4)
    args = ap.parse_args()
    ps = PartySystem(args.parties)
    tally = Counter()
    for seed in range(args.graphs):
        g = random_graph(args.parties, seed, bulk=4, extra_edges=4)
        v = graph_entropy(g)
        tally["sa"] += sa_check(ps, v)[0]
        tally["ssa"] += ssa_check(ps, v)[0]
        tally["even"] += even_degree_check(g)
        tally["cuts match"] += v == brute_force_graph_entropy(g)
    print(f"{args.graphs} graphs on N={args.parties}: " + ", ".join(f"{k} {n}" for k, n in sorted(tally.items())))
    print("unit star:", format_entropy_vector(ps, graph_entropy(star_graph(args.parties))))


if __name__ == "__main__":
    main()
