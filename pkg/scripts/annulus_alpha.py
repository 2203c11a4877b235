"""Contraction factor of cos_* on dz^2/z^2 restricted to A(r, 3r), r in [pi, 3pi].

The factor depends continuously on r; a finite sample gives its maximum over
the sampled radii only, not a certified supremum.
"""

import argparse
import math

import numpy as np

from qdlab import QuadratureConfig, RationalQD, restricted_cos_pushforward_mass
from qdlab.regions import Annulus


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--samples", type=int, default=9)
    ap.add_argument("--tol", type=float, default=1e-4)
    args = ap.parse_args()

    q = RationalQD.from_points(1, [], [0, 0])
    cfg = QuadratureConfig(rel_tol=args.tol)
    base = 2 * math.pi * math.log(3)
    best = (-1.0, None)
    print("r/pi      alpha_r     error")
    for r in np.linspace(math.pi, 3 * math.pi, args.samples):
        res = restricted_cos_pushforward_mass(q, Annulus(0, r, 3 * r), cfg)
        alpha = res.value / base
        print(f"{r / math.pi:.4f}  {alpha:.7f}  {res.error_estimate / base:.1e}")
        best = max(best, (alpha, r))
    print(f"max sampled alpha {best[0]:.7f} at r = {best[1] / math.pi:.4f} pi")


if __name__ == "__main__":
    main()
