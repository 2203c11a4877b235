"""Efficiency sweep of the shrinking-scale family against the fixed-scale control.

Writes one CSV row per (schedule, index) and prints the trend.
"""

import argparse
import csv
import sys

from qdlab import QuadratureConfig
from qdlab.families import SWEEP_HEADER, control_family, efficiency_sweep, geometric_family, polygon_family


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n-max", type=int, default=8)
    ap.add_argument("--tol", type=float, default=1e-4)
    ap.add_argument("--out", help="CSV path (default stdout)")
    args = ap.parse_args()

    cfg = QuadratureConfig(rel_tol=args.tol)
    indices = range(1, args.n_max + 1)
    runs = [
        ("geometric", efficiency_sweep(geometric_family(cfg=cfg), indices, cfg)),
        ("control", efficiency_sweep(control_family(cfg=cfg), indices, cfg)),
        ("polygon", efficiency_sweep(polygon_family(cfg=cfg), [2, 3], cfg)),
    ]
    fh = open(args.out, "w", newline="") if args.out else sys.stdout
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(("schedule",) + SWEEP_HEADER + ("error",))
    for name, rows in runs:
        for r in rows:
            w.writerow([name, r.index] + [f"{getattr(r, k):#.10g}" for k in SWEEP_HEADER[1:]] + [r.error or ""])
    if args.out:
        fh.close()

    geo = dict((r.index, r) for r in runs[0][1])
    ctl = dict((r.index, r) for r in runs[1][1])
    print("\nindex  geometric   control    1 - ratio (geometric)", file=sys.stderr)
    for n in indices:
        g, c = geo[n], ctl[n]
        print(f"{n:5d}  {g.ratio:.7f}  {c.ratio:.7f}  {1 - g.ratio:.3e}", file=sys.stderr)


if __name__ == "__main__":
    main()
