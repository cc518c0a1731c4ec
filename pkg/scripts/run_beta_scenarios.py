"""Clairvoyant and p-TAOP revenues relative to revenue-ordered, for the four noise scenarios.

Writes one CSV per beta into --out and prints the summary tables.
"""

from __future__ import annotations

import argparse
import os

from assortbounds.experiments import emit_csv, format_scenario, run_beta_scenario

BETAS = (0.02, 0.2, 2.0, 20.0)


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n", type=int, nargs="+", default=[5, 10, 15])
    parser.add_argument("--m", type=int, nargs="+", default=[1, 2, 4, 8, 16])
    parser.add_argument("--beta", type=float, nargs="+", default=list(BETAS))
    parser.add_argument("--count", type=int, default=30)
    parser.add_argument("--seed", type=int, default=2024)
    parser.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    parser.add_argument("--out", default="results")
    args = parser.parse_args()

    os.makedirs(args.out, exist_ok=True)
    for beta in args.beta:
        report = run_beta_scenario(args.n, args.m, beta, args.count, args.seed, workers=args.workers)
        emit_csv(report, os.path.join(args.out, f"beta_{beta:g}.csv"))
        print(format_scenario(report))
        print()


if __name__ == "__main__":
    main()
