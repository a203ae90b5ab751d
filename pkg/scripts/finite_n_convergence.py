"""Distance between log Z / N^2 and F(T) for small N, with the window used."""

import argparse
import math
import time

from dktransition import partition
from dktransition.transition import free_energy


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--T", type=float, nargs="+", default=[5.0, math.pi**2, 14.0])
    ap.add_argument("--nmax", type=int, default=8)
    args = ap.parse_args()

    for T in args.T:
        F = free_energy(T)
        print(f"T = {T:.10g}   F = {F:.15f}")
        print(f"{'N':>3} {'window':>6} {'method':>12} {'logZ/N^2':>20} {'error':>11} {'N*error':>9} {'sec':>6}")
        for N in range(1, args.nmax + 1):
            t0 = time.perf_counter()
            r = partition.auto_partition(N, T)
            err = abs(r.normalized - F)
            print(f"{N:3d} {r.window:6d} {r.method:>12} {r.normalized:20.15f} {err:11.4e} "
                  f"{N * err:9.5f} {time.perf_counter() - t0:6.2f}")
        print()


if __name__ == "__main__":
    main()
