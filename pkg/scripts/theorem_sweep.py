#!/usr/bin/env python3
"""Multistart critical-point sweep over every shipped field.

Every converged report (gradient norm <= 1e-8, |b| <= 20, vanishing
a-stationarity residual) must certify base loss <= 1e-4 and |a| <= 1e-3.
Exit code 1 on any violation.
"""
import argparse
import sys
import time

from minfinity.verify import critical_point_suite


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seeds", type=int, default=256)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--lambda", dest="lam", type=float, default=1.0)
    args = ap.parse_args()

    t0 = time.time()
    report = critical_point_suite(seed=args.seed, n_seeds=args.seeds, lam=args.lam)
    header = (f"{'field':<24}{'converged':>10}{'worst L':>12}{'worst |a|':>12}"
              f"{'violations':>12}")
    print(header)
    print("-" * len(header))
    for c in report["checks"]:
        name = c["name"].split(":", 1)[1]
        print(f"{name:<24}{c['converged']:>10}{c['worst_base_loss']:>12.2e}"
              f"{c['worst_abs_a']:>12.2e}{c['violations']:>12}")
    total = report["violations_total"]
    print(f"\n{args.seeds} starts/field, seed {args.seed}, lambda {args.lam}, "
          f"{time.time() - t0:.1f}s; total violations: {total}")
    return 1 if total else 0


if __name__ == "__main__":
    sys.exit(main())
