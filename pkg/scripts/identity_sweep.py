"""Run every identity verifier over the bundled fixtures and tabulate max residuals."""
import argparse
import json
import time

from bellwronskian.fixtures import FIXTURES, POLY_EXP, SIN_TEXP
from bellwronskian.verify import (
    verify_abel_liouville,
    verify_corollary0,
    verify_corollary1,
    verify_lemma2,
    verify_theorem1,
)
from bellwronskian.wronskian import sample_points


def sweep(points: int, tol: float):
    rows = []
    for fx in FIXTURES:
        f, a = fx.frame, fx.coefficients
        pts = sample_points(f.domain, points)
        reports = [
            verify_corollary0(f, a, 5, pts, tol),
            verify_theorem1(f, a, None, pts, tol),
            verify_theorem1(f, None, None, pts, tol),
            *(verify_corollary1(f, a, d, pts, tol) for d in (0, 1, 2)),
            verify_abel_liouville(f, a, pts, tol),
            verify_lemma2(f, pts, tol),
        ]
        rows += [(fx.name, r) for r in reports]
    for name, f in (("sin_texp", SIN_TEXP), ("poly_exp", POLY_EXP)):
        pts = sample_points(f.domain, points)
        rows.append((name, verify_lemma2(f, pts, tol)))
        rows.append((name, verify_theorem1(f, None, None, pts, tol)))
    return rows


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--points", type=int, default=11)
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--json", action="store_true")
    args = p.parse_args()
    t0 = time.perf_counter()
    rows = sweep(args.points, args.tol)
    if args.json:
        out = [{"frame": name, "identity": r.identity, "passed": r.passed, "max_residual": r.max_residual,
                "checks": len(r.records), "skipped": len(r.skipped)} for name, r in rows]
        print(json.dumps(out, indent=1))
        return
    print(f"{'frame':<10} {'identity':<16} {'checks':>7} {'max rel':>10}  verdict")
    for name, r in rows:
        print(f"{name:<10} {r.identity:<16} {len(r.records):>7} {r.max_residual:>10.2e}  "
              f"{'pass' if r.passed else 'FAIL'}")
    print(f"\n{len(rows)} reports in {time.perf_counter() - t0:.1f}s")


if __name__ == "__main__":
    main()
