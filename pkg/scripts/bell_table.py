"""Print B_0..B_m with word counts and coefficient sums."""
import argparse

from bellwronskian.ncbell import MAX_ORDER, bell_expand, format_polynomial


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--max-m", type=int, default=6)
    p.add_argument("--counts-only", action="store_true", help="skip the expanded polynomials")
    args = p.parse_args()
    if args.max_m > MAX_ORDER:
        p.error(f"--max-m is capped at {MAX_ORDER}")
    print(f"{'m':>3} {'words':>6} {'coeff sum':>10}")
    for m in range(args.max_m + 1):
        poly = bell_expand(m)
        print(f"{m:>3} {len(poly):>6} {poly.coefficient_sum:>10}")
    if not args.counts_only:
        print()
        for m in range(args.max_m + 1):
            print(format_polynomial(bell_expand(m)))


if __name__ == "__main__":
    main()
