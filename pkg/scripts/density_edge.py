"""Approach of the density to the plateau at the inner edge alpha.

Prints phi(alpha (1 + eps)) and 1 - phi, and the local exponent of 1 - phi
in eps, which settles near 1/2.
"""

import argparse
import math

from dktransition.equilibrium import density_phi
from dktransition.transition import solve_params


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--T", type=float, default=14.0)
    args = ap.parse_args()
    p = solve_params(args.T)
    print(f"T = {args.T}, alpha = {p.alpha:.15f}, beta = {p.beta:.15f}")
    print(f"{'eps':>8} {'phi':>18} {'1 - phi':>11} {'slope':>7}")
    prev = None
    for j in range(1, 13):
        eps = 10.0**-j
        val = float(density_phi(p, p.alpha * (1 + eps)))
        gap = 1 - val
        slope = math.log10(prev / gap) if prev and gap > 0 else float("nan")
        prev = gap
        print(f"{eps:8.0e} {val:18.15f} {gap:11.3e} {slope:7.3f}")


if __name__ == "__main__":
    main()
