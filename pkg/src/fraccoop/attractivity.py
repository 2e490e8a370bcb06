"""Decay envelopes and trajectory checks for cooperative homogeneous systems.

For a field of degree p with decay direction v (f(v) < 0), orders alpha_i and
m = |omega|_v, every solution obeys

    0 <= Phi_i(t) <= C_i E_beta(-eta t^beta),    beta = min(alpha) / p,
    C_i = m v_i / E_beta(-eta),

whenever eta satisfies, for all i,

    f_i(v)/v_i + eta / m^(p-1) * I_i(eta) < 0,
    I_i(eta) = sup_{t>=1} t^(beta - alpha_i) E_{beta, 1+beta-alpha_i}(-eta t^beta)
                          / E_beta(-eta t^beta)^p.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .errors import InfeasibleError, InvalidParameterError
from .field import VectorField, as_weight, weighted_norm
from .report import Verdict
from .solver import MultiOrder, SolveConfig, Trajectory, integrate
from .special_fn import ml

MARGIN_EPS = 1e-6
ETA_HI = 10.0
ETA_FLOOR = 1e-12
T_CAP = 1e6
SAFETY = 1.05


class NonMonotoneWarning(RuntimeWarning):
    """The envelope condition was found feasible above an infeasible rate."""


def default_tolerance(step: float) -> float:
    return 1e-6 + 10.0 * step


# {{{ sup over t >= 1


def _ratio(t, eta, beta, alpha_i, p, den=None):
    x = -eta * t**beta
    num = t ** (beta - alpha_i) * ml(beta, 1.0 + beta - alpha_i, x)
    if den is None:
        den = ml(beta, 1.0, x) ** p
    return num / den


def tail_limit(eta: float, beta: float, alpha_i: float, p: float, alpha_min: float) -> float:
    """Limit of the I-ratio as t -> infinity.

    Both Mittag-Leffler factors decay like their first algebraic term, so the
    ratio behaves as t^(alpha_min - alpha_i); only the slowest components have
    a nonzero limit.
    """
    if math.isclose(p, 1.0) and math.isclose(alpha_i, beta):
        return 1.0
    if alpha_i > alpha_min + 1e-12 or alpha_i >= 1.0:
        return 0.0
    return eta ** (p - 1.0) * math.gamma(1.0 - beta) ** p / math.gamma(1.0 - alpha_i)


def _check_I_args(eta, beta, alpha_i, t_cap):
    if not eta > 0.0:
        raise InvalidParameterError(f"eta must be positive, got {eta}")
    if t_cap < 1e3:
        raise InvalidParameterError("t_cap must be at least 1e3")
    if beta > alpha_i + 1e-12:
        raise InvalidParameterError(f"beta = {beta} exceeds alpha_i = {alpha_i}")


def _sup_ratio(eta, beta, alpha_i, p, alpha_min, logt, den, safety):
    if math.isclose(p, 1.0) and math.isclose(alpha_i, beta):
        # numerator and denominator coincide
        return 1.0
    vals = _ratio(np.exp(logt), eta, beta, alpha_i, p, den)
    k = int(np.nanargmax(vals))
    best = float(vals[k])
    if 0 < k < logt.size - 1:
        res = optimize.minimize_scalar(
            lambda s: -_ratio(math.exp(s), eta, beta, alpha_i, p),
            bounds=(logt[k - 1], logt[k + 1]),
            method="bounded",
            options={"xatol": 1e-10},
        )
        best = max(best, -float(res.fun))
    return max(safety * best, tail_limit(eta, beta, alpha_i, p, alpha_min))


def _log_grid(t_cap, npoints):
    return np.linspace(0.0, math.log(t_cap), npoints)


def capital_I(eta: float, beta: float, alpha_i: float, p: float, t_cap: float = T_CAP, npoints: int = 2000, alpha_min=None, safety: float = SAFETY) -> float:
    """Numerical ``sup_{t >= 1}`` of the envelope ratio for one component.

    The ratio is scanned on ``npoints`` log-spaced points of ``[1, t_cap]``,
    an interior maximum is polished with a bounded scalar search, and the
    analytic t -> infinity limit is included.  The scanned maximum is inflated
    by ``safety`` to cover what the grid may miss; the equal-order p = 1 case
    is exactly 1 and skips the scan.  ``alpha_min`` defaults to ``beta * p``.
    """
    _check_I_args(eta, beta, alpha_i, t_cap)
    if alpha_min is None:
        alpha_min = beta * p
    logt = _log_grid(t_cap, npoints)
    den = ml(beta, 1.0, -eta * np.exp(beta * logt)) ** p
    return _sup_ratio(eta, beta, alpha_i, p, alpha_min, logt, den, safety)


# }}}


# {{{ eta search


def condition_values(eta: float, ratios, orders: MultiOrder, p: float, m: float, **kw) -> np.ndarray:
    """Left-hand sides ``f_i(v)/v_i + eta/m^(p-1) I_i(eta)``, one per component."""
    beta = orders.min / p
    t_cap = kw.get("t_cap", T_CAP)
    logt = _log_grid(t_cap, kw.get("npoints", 2000))
    den = ml(beta, 1.0, -eta * np.exp(beta * logt)) ** p
    cache = {}
    out = np.empty(len(ratios))
    for i, a in enumerate(orders.alphas):
        if a not in cache:
            _check_I_args(eta, beta, a, t_cap)
            cache[a] = _sup_ratio(eta, beta, a, p, orders.min, logt, den, kw.get("safety", SAFETY))
        out[i] = ratios[i] + eta / m ** (p - 1.0) * cache[a]
    return out


def search_eta(
    f: VectorField,
    v,
    orders: MultiOrder,
    p: float,
    m: float,
    *,
    eta_hi: float = ETA_HI,
    iterations: int = 60,
    margin_eps: float = MARGIN_EPS,
    t_cap: float = T_CAP,
    npoints: int = 2000,
    safety: float = SAFETY,
) -> float:
    """Largest eta in ``(0, eta_hi]`` meeting the envelope condition, by bisection.

    Raises :class:`InfeasibleError` if f(v) is not strictly negative or no
    eta down to 1e-12 works.
    """
    v = as_weight(v, f.dimension)
    if not m > 0.0:
        raise InvalidParameterError("m must be positive; the zero state needs no envelope")
    ratios = f(v) / v
    if not np.all(ratios < 0.0):
        raise InfeasibleError(f"f(v) is not strictly negative: f(v)/v = {ratios.tolist()}")

    def feasible(eta):
        vals = condition_values(eta, ratios, orders, p, m, t_cap=t_cap, npoints=npoints, safety=safety)
        return bool(np.all(vals < -margin_eps))

    if feasible(eta_hi):
        return eta_hi
    hi = eta_hi
    lo = eta_hi / 2.0
    while not feasible(lo):
        hi = lo
        lo /= 2.0
        if lo < ETA_FLOOR:
            raise InfeasibleError("no feasible decay rate down to 1e-12")
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        if feasible(mid):
            lo = mid
        else:
            hi = mid

    for probe in lo * np.array([0.5, 0.1, 0.01]):
        if not feasible(probe):
            warnings.warn(
                f"envelope condition infeasible at eta = {probe:.3e} below the returned {lo:.3e}",
                NonMonotoneWarning,
                stacklevel=2,
            )
            break
    return lo


# }}}


@dataclass(frozen=True)
class EnvelopeParams:
    beta: float
    eta: float
    amplitudes: np.ndarray
    v: np.ndarray
    p: float
    m: float

    def values(self, times) -> np.ndarray:
        """Envelope ``C_i E_beta(-eta t^beta)``, shape ``(len(times), d)``."""
        times = np.asarray(times, dtype=float)
        if self.m == 0.0:
            return np.zeros((times.size, self.amplitudes.size))
        profile = ml(self.beta, 1.0, -self.eta * times**self.beta)
        return np.outer(profile, self.amplitudes)


def build_envelope(f: VectorField, v, orders: MultiOrder, p: float, omega, eta: float | None = None, **search_kw) -> EnvelopeParams:
    """Envelope for one initial state; eta is searched unless given."""
    v = as_weight(v, f.dimension)
    m = weighted_norm(omega, v)
    beta = orders.min / p
    if m == 0.0:
        return EnvelopeParams(beta, 0.0, np.zeros_like(v), v, p, 0.0)
    if eta is None:
        eta = search_eta(f, v, orders, p, m, **search_kw)
    amplitudes = m / ml(beta, 1.0, -eta) * v
    return EnvelopeParams(beta, float(eta), amplitudes, v, p, m)


# {{{ checks


def envelope_check(traj: Trajectory, env: EnvelopeParams, tol: float | None = None) -> Verdict:
    bound = env.values(traj.times)
    if tol is None:
        tol = 1e-4 * float(np.max(env.amplitudes)) if env.m > 0 else default_tolerance(traj.step)
    margin = bound - traj.states
    n, i = np.unravel_index(int(np.argmin(margin)), margin.shape)
    return Verdict.from_margin(
        "envelope",
        traj.times[n],
        margin[n, i],
        tol,
        f"Phi_i(t) <= C_i E_beta(-eta t^beta), beta={env.beta:.6g}, eta={env.eta:.6g}; worst component {i + 1}",
        component=int(i),
    )


def boundedness_check(traj: Trajectory, v, tol: float | None = None) -> Verdict:
    v = as_weight(v, traj.states.shape[1])
    if tol is None:
        tol = default_tolerance(traj.step)
    norms = np.max(np.abs(traj.states) / v, axis=1)
    bound = weighted_norm(traj.initial, v)
    n = int(np.argmax(norms))
    return Verdict.from_margin(
        "boundedness",
        traj.times[n],
        bound - norms[n],
        tol,
        f"max_t |Phi(t)|_v <= |omega|_v = {bound:.6g}",
    )


def positivity_check(traj: Trajectory, tol: float | None = None) -> Verdict:
    if tol is None:
        tol = default_tolerance(traj.step)
    n, i = np.unravel_index(int(np.argmin(traj.states)), traj.states.shape)
    return Verdict.from_margin(
        "positivity",
        traj.times[n],
        traj.states[n, i],
        tol,
        f"min over t and i of Phi_i(t); worst component {i + 1}",
        component=int(i),
    )


def ordering_check(lower: Trajectory, upper: Trajectory, tol: float | None = None, name: str = "monotonicity") -> Verdict:
    if tol is None:
        tol = default_tolerance(lower.step)
    gap = upper.states - lower.states
    n, i = np.unravel_index(int(np.argmin(gap)), gap.shape)
    return Verdict.from_margin(
        name,
        lower.times[n],
        gap[n, i],
        tol,
        f"Phi(t, lo) <= Phi(t, hi) componentwise; worst component {i + 1}",
        component=int(i),
    )


def monotonicity_check(f: VectorField, orders: MultiOrder, omega_lo, omega_hi, cfg: SolveConfig, tol: float | None = None) -> Verdict:
    omega_lo = np.asarray(omega_lo, dtype=float)
    omega_hi = np.asarray(omega_hi, dtype=float)
    if np.any(omega_lo > omega_hi):
        raise InvalidParameterError("omega_lo must be componentwise <= omega_hi")
    lo = integrate(f, orders, omega_lo, cfg)
    hi = integrate(f, orders, omega_hi, cfg)
    return ordering_check(lo, hi, tol)


def decay_lower_bound(traj: Trajectory, exponent: float, t_min: float = 1.0) -> Verdict:
    """Informational: is ``Phi_i(t) t^exponent`` bounded away from zero for t >= t_min?

    Reported for the equal-order case where the decay rate is claimed to be
    sharp; it is evidence only, and ``passed`` just records positivity of the
    smallest scaled value.
    """
    mask = traj.times >= t_min
    scaled = traj.states[mask] * traj.times[mask, None] ** exponent
    n, i = np.unravel_index(int(np.argmin(scaled)), scaled.shape)
    return Verdict(
        "rate_lower_bound",
        bool(scaled[n, i] > 0.0),
        float(traj.times[mask][n]),
        float(scaled[n, i]),
        0.0,
        "informational: min over t >= t_min of Phi_i(t) t^alpha",
    )


# }}}
