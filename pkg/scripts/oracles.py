"""Independent reference values computed with scipy's nested adaptive quadrature.

Nothing here uses the qdlab cubature engine; densities are written out by
hand. Values printed by this script are the ones frozen in the test suite.
"""

import math

import numpy as np
from scipy import integrate


def polar_mass(f, center, breaks_r, breaks_t, r_max):
    """Integral of |f| over the disk |z - center| < r_max, then the exterior via s = 1/r."""

    def inner(t, r):
        return abs(f(center + r * np.exp(1j * t))) * r

    total = 0.0
    rs = [0.0] + [b for b in breaks_r if 0 < b < r_max] + [r_max]
    for r0, r1 in zip(rs[:-1], rs[1:]):
        val, _ = integrate.quad(
            lambda r: integrate.quad(inner, 0, 2 * math.pi, args=(r,), points=breaks_t, limit=400, epsabs=1e-13)[0],
            r0, r1, limit=400, epsabs=1e-12,
        )
        total += val

    def outer(t, s):
        z = center + np.exp(1j * t) / s
        return abs(f(z)) / s**3

    val, _ = integrate.quad(
        lambda s: integrate.quad(outer, 0, 2 * math.pi, args=(s,), limit=200, epsabs=1e-13)[0],
        0, 1 / r_max, limit=200, epsabs=1e-12,
    )
    return total + val


def q3(z):
    return 1 / (z * (z - 1) * (z + 1))


def ex42(z, lead=1.0):
    a, b = 0.5, 1.5
    return lead * (z * z + 1) / ((z * z - a * a) * (z * z - b * b) * (z - 1))


def strip_push(f_sum, Y):
    def inner(y, x):
        return abs(f_sum(x + 1j * y))

    val, _ = integrate.dblquad(lambda y, x: inner(y, x), 0, math.pi, -Y, Y, epsabs=1e-10, epsrel=1e-9)
    return val


def lattice(f, z, K=400):
    k = 2 * math.pi * np.arange(-K, K + 1)
    return np.sum(f(z + k) + f(-z + k))


def main():
    m = polar_mass(q3, 0j, [0.5, 1, 1.5], [0, math.pi / 2, math.pi, 3 * math.pi / 2], 3.0)
    print(f"plane mass dz^2/(z(z^2-1)) = {m:.12g}")

    m42 = polar_mass(ex42, 0j, [0.25, 0.5, 0.75, 1.0, 1.5, 2.0], [0, math.pi / 2, math.pi, 3 * math.pi / 2], 4.0)
    print(f"ex42 raw mass = {m42:.12g}")

    # the strip integrand for a=0.5, b=1.5 via direct K-truncated lattice sums
    lead = 4 / m42
    pts = []
    for x in np.linspace(0.1, 3.0, 4):
        for y in (-0.7, 0.3, 1.9):
            pts.append(lattice(lambda z: ex42(z, lead), complex(x, y)))
    print("sample fibre sums:", [f"{complex(v):.10g}" for v in pts[:3]])

    # restricted push-forward of dz^2/z^2 to A(pi, 3pi), brute force over branches
    def restricted(z):
        acc = 0j
        for s in (1, -1):
            for k in range(-3, 4):
                zp = s * z + 2 * math.pi * k
                if math.pi <= abs(zp) <= 3 * math.pi:
                    acc += 1 / zp**2
        return acc

    Y = 3 * math.pi
    radii = (math.pi, 3 * math.pi)
    branches = [(s, k) for s in (1, -1) for k in range(-3, 4)]

    def y_breaks(x):
        out = [0.0]
        for s, k in branches:
            u = s * x + 2 * math.pi * k
            for R in radii:
                if abs(u) < R:
                    h = math.sqrt(R * R - u * u)
                    out += [h, -h]
        return sorted(set(v for v in out if -Y < v < Y))

    def column(x):
        pts = [-Y] + y_breaks(x) + [Y]
        return sum(integrate.quad(lambda y: abs(restricted(complex(x, y))), a, b, epsabs=1e-12, epsrel=1e-11,
                                  limit=200)[0] for a, b in zip(pts[:-1], pts[1:]))

    xb = {0.0, math.pi}
    for s, k in branches:
        for R in radii:
            for sign in (1, -1):
                x = s * (sign * R - 2 * math.pi * k)
                if 0 < x < math.pi:
                    xb.add(x)
    xb = sorted(xb)
    val = sum(integrate.quad(column, a, b, epsabs=1e-10, epsrel=1e-10, limit=200)[0] for a, b in zip(xb[:-1], xb[1:]))
    print(f"restricted A(pi,3pi) = {val:.10g}, alpha = {val / (2 * math.pi * math.log(3)):.10g}")


if __name__ == "__main__":
    main()
