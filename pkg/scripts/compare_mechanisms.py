#!/usr/bin/env python3
"""Closed-form error comparison of the factorization and binary mechanisms.

Prints the per-octave error table for two privacy budgets and reports the
first power of two at which the factorization mechanism's guaranteed error
drops below the binary mechanism's expected error.

Usage: python scripts/compare_mechanisms.py [--eps-fact 0.3] [--eps-bin 0.8]
"""

import argparse

from contcount.cli import binary_expected_err
from contcount.mechanism import PrivacyBudget
from contcount.workload import err_lower_bound_matrix_mech, err_upper_bound


def main() -> None:
    parser = argparse.ArgumentParser()
    parser.add_argument("--eps-fact", type=float, default=0.3)
    parser.add_argument("--eps-bin", type=float, default=0.8)
    parser.add_argument("--delta", type=float, default=1e-10)
    parser.add_argument("--max-log-n", type=int, default=30)
    args = parser.parse_args()

    fact_budget = PrivacyBudget(args.eps_fact, args.delta, allow_large_epsilon=True)
    bin_budget = PrivacyBudget(args.eps_bin, args.delta, allow_large_epsilon=True)

    crossover = None
    print(f"{'n':>12} {'fact_upper':>14} {'fact_lower':>14} {'binary':>14} {'ratio':>8}")
    for k in range(1, args.max_log_n + 1):
        n = 2**k
        fact = err_upper_bound(n, fact_budget)
        lower = err_lower_bound_matrix_mech(n, fact_budget)
        binary = binary_expected_err(n, bin_budget)
        print(f"2^{k:<10} {fact:14.2f} {lower:14.2f} {binary:14.2f} {binary / fact:8.3f}")
        if crossover is None and fact < binary:
            crossover = k
    if crossover is not None:
        print(
            f"\nfactorization (eps={args.eps_fact}) beats binary "
            f"(eps={args.eps_bin}) from n = 2^{crossover} on"
        )
    else:
        print("\nno crossover in the scanned range")


if __name__ == "__main__":
    main()
