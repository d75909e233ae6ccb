"""Randomized f = A g trials: how accurately is A recovered, and how often is it rejected."""
import argparse

import numpy as np

from bellwronskian.errors import BellWronskianError
from bellwronskian.fixtures import FIXTURES
from bellwronskian.verify import range_equivalent


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--entry-range", type=int, default=3, help="entries of A drawn from [-r, r]")
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args()
    rng = np.random.default_rng(args.seed)
    r = args.entry_range
    errors, rejected, raised = [], 0, 0
    for trial in range(args.trials):
        g = FIXTURES[trial % len(FIXTURES)].frame
        while True:
            A = rng.integers(-r, r + 1, size=(g.n, g.n)).astype(float)
            if abs(round(np.linalg.det(A))) >= 1:
                break
        try:
            res = range_equivalent(g.transformed(A), g)
        except BellWronskianError as exc:
            raised += 1
            print(f"trial {trial}: {type(exc).__name__}: {exc}")
            continue
        if not res.equivalent:
            rejected += 1
            continue
        errors.append(float(np.max(np.abs(res.matrix - A))))
    errors = np.array(errors)
    print(f"trials {args.trials}, accepted {len(errors)}, rejected {rejected}, errors raised {raised}")
    if errors.size:
        print(f"max |A - A_hat| {errors.max():.2e}, median {np.median(errors):.2e}")


if __name__ == "__main__":
    main()
