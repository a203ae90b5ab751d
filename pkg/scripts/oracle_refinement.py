"""Grid-size study for the oracle: how sup error, edges and energy gap shrink with n."""

import argparse
import time

import numpy as np

from dktransition import oracle


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--T", type=float, default=14.0)
    ap.add_argument("--L", type=float, default=1.2)
    ap.add_argument("--sizes", type=int, nargs="+", default=[256, 512, 1024, 2048, 4096])
    args = ap.parse_args()

    print(f"{'n':>6} {'sup':>10} {'|da|':>10} {'|db|':>10} {'E - M':>12} {'ratio':>7} {'sec':>6}")
    prev = None
    for n in args.sizes:
        t0 = time.perf_counter()
        r = oracle.run(args.T, n=n, L=args.L)
        gap = r.energy - r.M
        ratio = prev / gap if prev else np.nan
        prev = gap
        print(f"{n:6d} {r.sup:10.3e} {r.alpha_error:10.2e} {r.beta_error:10.2e} {gap:12.4e} "
              f"{ratio:7.2f} {time.perf_counter() - t0:6.1f}")


if __name__ == "__main__":
    main()
