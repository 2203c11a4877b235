"""Convergence of thick limit models and of the S_n maps.

Part one pushes a fixed model forward by M_n(z) = 2^-n z + 1 with a
perturbation at distance 256, detects the scaling again and measures
||M_n^* q_n - q_model||. Part two tracks sup |S_n(z) - z| on |z| = 1.
"""

import argparse

from qdlab import detect_thick_scaling, limit_model_distance, s_n_sup_deviation
from qdlab.limit_models import thick_sequence


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n-max", type=int, default=10)
    args = ap.parse_args()

    print("n   |b - 1|     a / 2^-n   distance")
    prev = None
    for n in range(1, args.n_max + 1):
        q_n, model = thick_sequence(n)
        s = detect_thick_scaling(q_n)
        d = limit_model_distance(q_n, s.M, model)
        rate = "" if prev is None else f"  (x{prev / d:.3f})"
        print(f"{n:<3d} {abs(s.b - 1):.2e}   {abs(s.a) * 2**n:.4f}     {d:.4e}{rate}")
        prev = d

    print("\nn   sup|S_n(z) - z| on |z| = 1, b = 1")
    prev = None
    for n in range(1, 13):
        dev = s_n_sup_deviation(2.0**-n, 1, 1)
        rate = "" if prev is None else f"  (x{prev / dev:.4f})"
        print(f"{n:<3d} {dev:.6e}{rate}")
        prev = dev


if __name__ == "__main__":
    main()
