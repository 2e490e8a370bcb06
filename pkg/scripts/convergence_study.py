"""Error of the predictor-corrector solver against E_alpha(-t^alpha) at t = 1."""

from __future__ import annotations

import math

from fraccoop.solver import MultiOrder, SolveConfig, integrate
from fraccoop.special_fn import ml
from fraccoop.systems import linear_field


def main() -> None:
    f = linear_field([[-1.0]])
    for alpha in (0.3, 0.5, 0.8, 1.0):
        exact = ml(alpha, 1.0, -1.0)
        prev = None
        print(f"alpha = {alpha}")
        for k in range(6):
            h = 0.1 / 2**k
            err = abs(integrate(f, MultiOrder((alpha,)), [1.0], SolveConfig(1.0, h)).final[0] - exact)
            rate = "" if prev is None or err == 0.0 else f"  order {math.log2(prev / err):.3f}"
            print(f"  h = {h:.5f}  error = {err:.3e}{rate}")
            prev = err


if __name__ == "__main__":
    main()
