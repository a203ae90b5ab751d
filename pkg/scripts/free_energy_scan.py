"""Tabulate F(T) and its derivatives across the transition.

    python scripts/free_energy_scan.py --tmin 1 --tmax 40 --step 0.25 > scan.csv
"""

import argparse
import sys

from dktransition import cli


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--tmin", type=float, default=1.0)
    ap.add_argument("--tmax", type=float, default=40.0)
    ap.add_argument("--step", type=float, default=0.25)
    args = ap.parse_args()
    cfg = cli.RunConfig("scan", tmin=args.tmin, tmax=args.tmax, step=args.step, format="csv").validate()
    text, _ = cli.execute(cfg)
    sys.stdout.write(text)


if __name__ == "__main__":
    main()
