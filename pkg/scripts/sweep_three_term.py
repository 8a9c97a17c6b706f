"""Symbolic three-term check over a range of levels, all characters and small primes.

    python3 scripts/sweep_three_term.py --max-level 40 --max-prime 11
"""

import argparse
import time

from cusptransfer.cusps import build_cusp_table
from cusptransfer.dirichlet import all_characters
from cusptransfer.exactnum import is_prime
from cusptransfer.heckering import three_term_data, verify_prop75


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--max-level", type=int, default=30)
    ap.add_argument("--max-prime", type=int, default=13)
    args = ap.parse_args()
    primes = [p for p in range(2, args.max_prime + 1) if is_prime(p)]
    t = time.perf_counter()
    total = failures = 0
    for N in range(1, args.max_level + 1):
        checked = 0
        for chi in all_characters(N):
            T = build_cusp_table(N, chi)
            for p in primes:
                if N % p == 0:
                    continue
                for cls in T.classes:
                    checked += 1
                    if not verify_prop75(three_term_data(cls, p, T), p, N, chi, T):
                        failures += 1
                        print(f"FAIL N={N} chi={chi} cusp={cls.label()} p={p}")
        total += checked
        print(f"N={N} identities={checked}")
    print(f"total={total} failures={failures} time={time.perf_counter() - t:.1f}s")
    return 1 if failures else 0


if __name__ == "__main__":
    raise SystemExit(main())
