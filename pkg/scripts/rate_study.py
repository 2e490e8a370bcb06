"""Long-time approach of the Lotka-Volterra example to its equilibrium.

Prints e(t) = |Phi(t) - w*|_inf and the scaled error e(t) t^0.4 at decade
points, next to the constant 0.4 / Gamma(0.6) predicted by linearization.
"""

from __future__ import annotations

import argparse
import math

import numpy as np

from fraccoop.kolmogorov import assemble, equilibrium_error, find_equilibrium, loglog_slope
from fraccoop.solver import MultiOrder, SolveConfig, integrate
from fraccoop.systems import EXAMPLES


def main() -> None:
    parser = argparse.ArgumentParser()
    parser.add_argument("--tfinal", type=float, default=1000.0)
    parser.add_argument("--step", type=float, default=1e-2)
    args = parser.parse_args()

    ex = EXAMPLES[3]
    system = assemble(ex.rates, ex.field)
    eq = find_equilibrium(system, (0.5, 0.5))
    traj = integrate(system.assembled, MultiOrder(ex.orders), ex.omega, SolveConfig(args.tfinal, args.step))
    e = equilibrium_error(traj, eq.point)
    print(f"equilibrium {eq.point}, residual {eq.residual:.1e}")
    print(f"linearized tail constant 0.4/Gamma(0.6) = {0.4 / math.gamma(0.6):.4f}")
    for t in (1, 10, 50, 100, 300, 1000, 3000, 10000):
        if t > args.tfinal:
            break
        i = int(np.searchsorted(traj.times, t))
        print(f"t = {t:6g}  e = {e[i]:.4e}  e t^0.4 = {e[i] * t**0.4:.4f}")
    mask = traj.times >= 100.0
    if np.any(mask):
        print(f"log-log slope of e on [100, {args.tfinal:g}]: {loglog_slope(traj.times[mask], e[mask]):.4f}")


if __name__ == "__main__":
    main()
