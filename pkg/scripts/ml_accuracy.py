"""Compare ml() against a high-precision mpmath series on a grid of (alpha, beta, z)."""

from __future__ import annotations

import mpmath
import numpy as np

from fraccoop.special_fn import ml


def reference(alpha: float, beta: float, z: float) -> float:
    # terms peak near k = |z|^(1/alpha) / alpha; sum well past the peak
    x = abs(z) ** (1.0 / alpha)
    nterms = int(4 * x / alpha) + 200
    with mpmath.workdps(40 + int(0.45 * x)):
        a, b, zz = mpmath.mpf(alpha), mpmath.mpf(beta), mpmath.mpf(z)
        return float(mpmath.fsum(zz**k * mpmath.rgamma(a * k + b) for k in range(nterms)))


def main() -> None:
    print(f"{'alpha':>6} {'beta':>6} {'max abs err':>12} {'max rel err':>12}")
    for alpha in (0.24, 0.45, 0.55, 0.8, 1.0):
        for beta in (alpha, 1.0, 1.0 + alpha / 2):
            zs = -np.geomspace(1e-3, 60.0, 25) ** alpha
            got = ml(alpha, beta, zs)
            ref = np.array([reference(alpha, beta, z) for z in zs])
            abs_err = np.abs(got - ref)
            print(f"{alpha:6.2f} {beta:6.3f} {abs_err.max():12.3e} {np.max(abs_err / np.abs(ref)):12.3e}")


if __name__ == "__main__":
    main()
