from __future__ import annotations

import mpmath
import pytest
from hypothesis import HealthCheck, settings

from fraccoop.attractivity import build_envelope
from fraccoop.kolmogorov import assemble, find_equilibrium
from fraccoop.solver import MultiOrder, SolveConfig, integrate
from fraccoop.systems import EXAMPLES

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def ml_oracle(alpha, beta, z, extra_digits=30):
    """Series for E_{alpha,beta}(z) in mpmath with enough digits to absorb cancellation."""
    x = abs(z) ** (1.0 / alpha) if z != 0 else 0.0
    dps = extra_digits + int(0.45 * x) + 5
    with mpmath.workdps(dps):
        a, b, zz = mpmath.mpf(alpha), mpmath.mpf(beta), mpmath.mpf(z)
        total = mpmath.mpf(0)
        power = mpmath.mpf(1)
        k = 0
        peaked = False
        while True:
            term = power * mpmath.rgamma(a * k + b)
            total += term
            if k > x + 10:
                peaked = True
            if peaked and abs(term) < mpmath.mpf(10) ** (-extra_digits) * max(1, abs(total)):
                break
            k += 1
            power *= zz
            if k > 200000:
                raise RuntimeError("oracle did not converge")
        return float(total)


@pytest.fixture(scope="session")
def example_trajectories():
    """Examples 1-3 on [0, 50] at h = 1e-3, computed once per session."""
    out = {}
    cfg = SolveConfig(50.0, 1e-3)
    for n, ex in EXAMPLES.items():
        f = ex.field
        if ex.is_kolmogorov:
            f = assemble(ex.rates, ex.field, screen=False).assembled
        out[n] = integrate(f, MultiOrder(ex.orders), ex.omega, cfg)
    return out


@pytest.fixture(scope="session")
def example3_long():
    """Example 3 on [0, 1000] at h = 1e-2 with its equilibrium."""
    ex = EXAMPLES[3]
    system = assemble(ex.rates, ex.field)
    eq = find_equilibrium(system, (0.5, 0.5))
    traj = integrate(system.assembled, MultiOrder(ex.orders), ex.omega, SolveConfig(1000.0, 1e-2))
    return system, eq, traj


@pytest.fixture(scope="session")
def example1_envelope():
    ex = EXAMPLES[1]
    return build_envelope(ex.field, ex.v, MultiOrder(ex.orders), ex.degree, ex.omega)
