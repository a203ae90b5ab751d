"""Command-line entry point: params, scan, density, partition, oracle.

Exit codes: 0 success, 2 usage or domain error, 3 non-convergence.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import oracle, partition, transition
from .equilibrium import equilibrium_measure

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NONCONVERGED = 3


class UsageError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    command: str
    T: Optional[float] = None
    tmin: Optional[float] = None
    tmax: Optional[float] = None
    step: Optional[float] = None
    N: Optional[int] = None
    window: Optional[int] = None
    grid_n: int = 2048
    box_L: float = 1.2
    tol: float = oracle.DEFAULT_CONFIG.tol
    max_iters: int = oracle.DEFAULT_CONFIG.max_iters
    n_points: int = 1000
    out: Optional[str] = None
    format: str = "json"

    def validate(self):
        if self.format not in ("csv", "json"):
            raise UsageError(f"format must be csv or json, got {self.format}")
        if self.tol <= 0:
            raise UsageError("tol must be positive")
        if self.command == "scan":
            if self.tmin is None or self.tmax is None or self.step is None:
                raise UsageError("scan needs --tmin, --tmax and --step")
            if not (0 < self.tmin < self.tmax) or not self.step > 0:
                raise UsageError("scan needs 0 < tmin < tmax and step > 0")
        elif self.T is None:
            raise UsageError(f"{self.command} needs --T")
        if self.command == "partition" and self.N is None:
            raise UsageError("partition needs --N")
        if self.command == "density" and self.n_points < 2:
            raise UsageError("density needs at least 2 points")
        return self


def fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def _jsonable(v):
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (np.floating, float)):
        v = float(v)
        return v if math.isfinite(v) else None
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, np.bool_):
        return bool(v)
    return v


def render(rows, columns, fmt_name: str) -> str:
    if fmt_name == "json":
        data = [_jsonable(dict(zip(columns, r))) for r in rows]
        if len(data) == 1:
            data = data[0]
        return json.dumps(data, indent=2) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([fmt(v) for v in r])
    return buf.getvalue()


# --- commands --------------------------------------------------------------

PARAM_COLUMNS = ("T", "branch", "k", "m", "alpha", "beta", "K", "E")
SCAN_COLUMNS = ("T", "M", "F", "M1", "M2", "M3", "F3", "M3_left", "M3_right")


def cmd_params(cfg: RunConfig):
    d = transition.solve_params(cfg.T).as_dict()
    return [tuple(d[c] for c in PARAM_COLUMNS)], PARAM_COLUMNS


def scan_grid(tmin: float, tmax: float, step: float):
    n = int(math.floor((tmax - tmin) / step * (1 + 1e-12))) + 1
    ts = [tmin + i * step for i in range(n)]
    if tmin <= transition.PI2 <= tmax and transition.PI2 not in ts:
        ts.append(transition.PI2)
        ts.sort()
    return ts


def cmd_scan(cfg: RunConfig):
    rows = []
    jump = None
    for T in scan_grid(cfg.tmin, cfg.tmax, cfg.step):
        r = transition.energy(T)
        left = right = None
        if T == transition.PI2:
            jump = jump or transition.jump_report()
            left, right = -jump.F3_left, -jump.F3_right
        rows.append((T, r.M, r.F, r.M1, r.M2, r.M3, r.F3, left, right))
    return rows, SCAN_COLUMNS


def cmd_density(cfg: RunConfig, reach: float = 1.25):
    mu = equilibrium_measure(cfg.T)
    b = mu.params.beta
    xs = np.linspace(-reach * b, reach * b, cfg.n_points)
    ys = mu.density(xs)
    return list(zip(xs.tolist(), np.asarray(ys).tolist())), ("x", "density")


def cmd_partition(cfg: RunConfig):
    if cfg.window is None:
        res = partition.auto_partition(cfg.N, cfg.T)
    else:
        res = partition.partition_logZ(cfg.N, cfg.T, cfg.window)
    d = res.as_dict()
    cols = tuple(d)
    return [tuple(d.values())], cols


def cmd_oracle(cfg: RunConfig):
    rep = oracle.run(cfg.T, n=cfg.grid_n, L=cfg.box_L, tol=cfg.tol, max_iters=cfg.max_iters)
    d = rep.as_dict()
    return [tuple(d.values())], tuple(d), rep.converged


COMMANDS = {
    "params": cmd_params,
    "scan": cmd_scan,
    "density": cmd_density,
    "partition": cmd_partition,
    "oracle": cmd_oracle,
}

DEFAULT_FORMAT = {"params": "json", "scan": "csv", "density": "csv", "partition": "json", "oracle": "json"}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="dktransition", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--out", help="write output here instead of stdout")
        p.add_argument("--format", choices=("csv", "json"))
        return p

    p = common(sub.add_parser("params", help="solve (k, alpha, beta) at T"))
    p.add_argument("--T", type=float, required=True)

    p = common(sub.add_parser("scan", help="free energy and derivatives over a T range"))
    p.add_argument("--tmin", type=float, required=True)
    p.add_argument("--tmax", type=float, required=True)
    p.add_argument("--step", type=float, required=True)

    p = common(sub.add_parser("density", help="tabulate the equilibrium density"))
    p.add_argument("--T", type=float, required=True)
    p.add_argument("--n-points", type=int, default=1000, dest="n_points")

    p = common(sub.add_parser("partition", help="finite-N log Z"))
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--T", type=float, required=True)
    p.add_argument("--window", type=int, help="box half-width; doubled automatically if omitted")

    p = common(sub.add_parser("oracle", help="grid minimiser versus the closed form"))
    p.add_argument("--T", type=float, required=True)
    p.add_argument("--grid-n", type=int, default=2048, dest="grid_n")
    p.add_argument("--box-L", type=float, default=1.2, dest="box_L")
    p.add_argument("--tol", type=float, default=oracle.DEFAULT_CONFIG.tol)
    p.add_argument("--max-iters", type=int, default=oracle.DEFAULT_CONFIG.max_iters, dest="max_iters")
    return ap


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    kw = {k: v for k, v in vars(ns).items() if v is not None}
    kw.setdefault("format", DEFAULT_FORMAT[ns.command])
    return RunConfig(**kw).validate()


def execute(cfg: RunConfig) -> tuple[str, int]:
    out = COMMANDS[cfg.command](cfg)
    code = EXIT_OK
    if cfg.command == "oracle":
        rows, cols, ok = out
        code = EXIT_OK if ok else EXIT_NONCONVERGED
    else:
        rows, cols = out
    return render(rows, cols, cfg.format), code


def main(argv=None) -> int:
    ap = build_parser()
    try:
        ns = ap.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK
    try:
        cfg = config_from_args(ns)
        text, code = execute(cfg)
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8") as f:
            f.write(text)
    else:
        sys.stdout.write(text)
    if code == EXIT_NONCONVERGED:
        print("error: oracle hit the iteration cap before reaching tol", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
