"""Auxiliary-MNL heuristics for the cardinality-constrained problem, k = ceil(n/3)."""

from __future__ import annotations

import argparse
import os

from assortbounds.experiments import format_cardinality, run_cardinality_experiment


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n", type=int, nargs="+", default=[6, 9, 12])
    parser.add_argument("--m", type=int, nargs="+", default=[1, 2, 5, 10])
    parser.add_argument("--count", type=int, default=50)
    parser.add_argument("--seed", type=int, default=2024)
    parser.add_argument("--beta", type=float, default=1.0)
    parser.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    args = parser.parse_args()

    table = run_cardinality_experiment(args.n, args.m, args.count, args.seed, beta=args.beta,
                                       workers=args.workers)
    print(format_cardinality(table))


if __name__ == "__main__":
    main()
