"""Fractional Kolmogorov systems ``D^alpha w = diag(w) (b + f(w))``.

With b > 0 and f cooperative, homogeneous of degree p >= 1 and admitting a
decay direction, there is a unique positive equilibrium w* (b + f(w*) = 0)
and solutions from the open orthant approach it no slower than t^(-min(alpha)/p).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ConvergenceError, DomainViolationError, HypothesisViolationError, InvalidParameterError
from .field import VectorField, analyze
from .report import Verdict
from .solver import MultiOrder, SolveConfig, Trajectory, integrate

EQ_TOL = 1e-10
NEWTON_MAX_ITER = 100
ORTHANT_FLOOR = 1e-8
FIRST_DECADE = (10.0, 100.0)
BOUND_FACTOR = 2.0


@dataclass(frozen=True)
class KolmogorovSystem:
    rates: np.ndarray
    interaction: VectorField
    assembled: VectorField
    degree: float

    @property
    def dimension(self) -> int:
        return self.interaction.dimension


def assemble(b, f: VectorField, screen: bool = True, seed: int = 0) -> KolmogorovSystem:
    """Build ``g(w) = w * (b + f(w))``.

    With ``screen`` the interaction is checked for cooperativity, homogeneity
    of degree >= 1 and a decay direction; a failure raises
    :class:`HypothesisViolationError`.  Without screening the degree is
    recorded as nan.
    """
    b = np.asarray(b, dtype=float)
    if b.shape != (f.dimension,):
        raise InvalidParameterError(f"rates have shape {b.shape}, expected ({f.dimension},)")
    if not np.all(b > 0.0):
        raise InvalidParameterError(f"rates must be strictly positive, got {b.tolist()}")

    degree = math.nan
    if screen:
        rep = analyze(f, seed=seed)
        if not rep.ok:
            raise HypothesisViolationError("interaction fails screening:\n" + "\n".join(rep.lines()))
        degree = rep.degree

    def g(w):
        return w * (b + f(w))

    jac = None
    if f.jacobian_func is not None:

        def jac(w):
            return np.diag(b + f(w)) + w[:, None] * f.jacobian(w)

    name = f"kolmogorov({f.name})" if f.name else "kolmogorov"
    return KolmogorovSystem(b, f, VectorField(f.dimension, g, jac, name=name, clip_negative=f.clip_negative), degree)


@dataclass(frozen=True)
class Equilibrium:
    point: np.ndarray
    residual: float
    iterations: int = 0


def find_equilibrium(system: KolmogorovSystem, guess, tol: float = EQ_TOL, max_iter: int = NEWTON_MAX_ITER) -> Equilibrium:
    """Damped Newton iteration on ``b + f(w) = 0`` from a positive guess.

    Steps are halved until the iterate stays in ``w >= 1e-8`` and the
    residual does not grow.
    """
    w = np.asarray(guess, dtype=float)
    if w.shape != (system.dimension,) or not np.all(w > 0.0):
        raise InvalidParameterError(f"guess must be a strictly positive {system.dimension}-vector")
    b = system.rates
    f = system.interaction

    def resid(x):
        return b + f(x)

    r = resid(w)
    rn = float(np.max(np.abs(r)))
    for it in range(max_iter):
        if rn <= tol:
            return Equilibrium(w, rn, it)
        try:
            delta = np.linalg.solve(f.jacobian(w), -r)
        except np.linalg.LinAlgError as exc:
            raise ConvergenceError(f"singular Jacobian at {w.tolist()}", residual=rn) from exc
        lam = 1.0
        while lam > 1e-12:
            trial = w + lam * delta
            if np.all(trial >= ORTHANT_FLOOR):
                rt = resid(trial)
                rtn = float(np.max(np.abs(rt)))
                if rtn < rn or lam < 1e-3:
                    break
            lam *= 0.5
        else:
            raise DomainViolationError(f"Newton step cannot stay in the positive orthant from {w.tolist()}")
        if not np.all(trial >= ORTHANT_FLOOR):
            raise DomainViolationError(f"Newton iterate left the positive orthant: {trial.tolist()}")
        w, r, rn = trial, rt, rtn
    if rn <= tol:
        return Equilibrium(w, rn, max_iter)
    raise ConvergenceError(f"no convergence in {max_iter} Newton iterations", residual=rn)


def equilibrium_error(traj: Trajectory, point) -> np.ndarray:
    """``|Phi(t) - w*|_inf`` along the trajectory."""
    return np.max(np.abs(traj.states - np.asarray(point, dtype=float)), axis=1)


def loglog_slope(t, e) -> float:
    """Least-squares slope of log e against log t (zero errors are dropped)."""
    mask = (e > 0.0) & (t > 0.0)
    if np.count_nonzero(mask) < 2:
        return math.nan
    return float(np.polyfit(np.log(t[mask]), np.log(e[mask]), 1)[0])


@dataclass(frozen=True)
class RateReport:
    verdict: Verdict
    exponent: float
    bound: float
    slope: float
    converging: bool


def rate_from_trajectory(traj: Trajectory, eq: Equilibrium, exponent: float, t_min: float = FIRST_DECADE[0]) -> RateReport:
    """Self-consistency test of ``e(t) <= K t^(-exponent)`` on ``[t_min, t_final]``.

    K is inferred as twice the largest scaled error ``e(t) t^exponent`` on the
    first decade ``[10, 100]``; the margin is K minus the largest scaled error
    on the whole window.  The trajectory is flagged as not converging when e
    does not decrease over the last decade.
    """
    t = traj.times
    if t[-1] < FIRST_DECADE[1]:
        raise InvalidParameterError(f"rate check needs t_final >= {FIRST_DECADE[1]:g}, got {t[-1]:g}")
    e = equilibrium_error(traj, eq.point)
    window = t >= t_min
    scaled = e[window] * t[window] ** exponent
    first = (t[window] <= FIRST_DECADE[1])
    bound = BOUND_FACTOR * float(np.max(scaled[first]))
    k = int(np.argmax(scaled))
    slope = loglog_slope(t[window], e[window])

    last = t >= t[-1] / 10.0
    converging = bool(e[-1] < float(np.max(e[last])) or float(np.max(e[window])) <= EQ_TOL * 1e3)

    if not converging:
        verdict = Verdict(
            "rate",
            False,
            float(t[-1]),
            -float(e[-1]),
            0.0,
            "attractivity failure: e(t) = |Phi(t) - w*|_inf does not decrease over the last decade",
        )
    else:
        tol = 1e-12 + 1e-9 * bound
        verdict = Verdict.from_margin(
            "rate",
            float(t[window][k]),
            bound - float(scaled[k]),
            tol,
            f"self-consistency: sup e(t) t^{exponent:g} on [{t_min:g}, {t[-1]:g}] <= "
            f"{BOUND_FACTOR:g} x first-decade max = {bound:.6g}; log-log slope {slope:.4f}",
            slope=slope,
        )
    return RateReport(verdict, exponent, bound, slope, converging)


def rate_check(
    system: KolmogorovSystem,
    orders: MultiOrder,
    omega,
    eq: Equilibrium,
    cfg: SolveConfig,
    traj: Optional[Trajectory] = None,
    degree: Optional[float] = None,
) -> RateReport:
    """Integrate (unless ``traj`` is given) and test the rate ``t^(-min(alpha)/p)``.

    p is the interaction degree; pass ``degree`` when the system was assembled
    without screening.
    """
    p = system.degree if degree is None else degree
    if not (math.isfinite(p) and p >= 1.0 - 1e-9):
        raise InvalidParameterError(f"interaction degree must be >= 1, got {p}")
    if abs(p - round(p)) <= 1e-6:
        p = float(round(p))
    if traj is None:
        traj = integrate(system.assembled, orders, omega, cfg)
    return rate_from_trajectory(traj, eq, orders.min / p)


def equilibrium_verdict(eq: Equilibrium, expected=None, tol: float = EQ_TOL) -> Verdict:
    margin = tol - eq.residual
    desc = f"b + f(w*) = 0 at w* = {np.array2string(eq.point, precision=12)}"
    if expected is not None:
        dist = float(np.max(np.abs(eq.point - np.asarray(expected, dtype=float))))
        margin = min(margin, tol - dist)
        desc += f"; distance to expected {dist:.3e}"
    return Verdict(
        "equilibrium",
        margin >= 0.0,
        math.nan,
        margin,
        tol,
        desc,
    )
