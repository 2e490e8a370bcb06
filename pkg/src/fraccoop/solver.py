"""Multi-order fractional Adams predictor-corrector.

Component i of ``D^{alpha_i} w_i = f_i(w)`` is advanced with its own order,
using the equivalent Volterra form

    w_i(t) = omega_i + 1/Gamma(alpha_i) int_0^t (t-s)^(alpha_i-1) f_i(w(s)) ds.

The predictor applies the product-rectangle rule to the memory integral, the
corrector the product-trapezoid rule.  Every step touches the whole history,
so the cost is O(N^2) per component with O(N) storage.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import BlowUpError, DimensionMismatchError, InvalidParameterError
from .field import VectorField
from .special_fn import (
    SampledFunction,
    power_first_difference,
    power_second_difference,
    rl_integral,
    trapezoid_start_weights,
)

MAX_STEPS = 10_000_000
BLOWUP_LIMIT = 1e12
UNDERSHOOT_FLOOR = -1e-6


class UndershootWarning(RuntimeWarning):
    """A state component fell below the positivity floor during integration."""


@dataclass(frozen=True)
class MultiOrder:
    alphas: tuple

    def __post_init__(self):
        alphas = tuple(float(a) for a in np.atleast_1d(self.alphas))
        if not alphas:
            raise InvalidParameterError("at least one order is required")
        for a in alphas:
            if not 0.0 < a <= 1.0:
                raise InvalidParameterError(f"orders must lie in (0, 1], got {a}")
        object.__setattr__(self, "alphas", alphas)

    @classmethod
    def uniform(cls, alpha: float, dimension: int) -> MultiOrder:
        return cls((alpha,) * dimension)

    @property
    def dimension(self) -> int:
        return len(self.alphas)

    @property
    def min(self) -> float:
        return min(self.alphas)

    def as_array(self) -> np.ndarray:
        return np.array(self.alphas)


@dataclass(frozen=True)
class SolveConfig:
    t_final: float
    step: float
    corrector_sweeps: int = 1

    def __post_init__(self):
        if not (self.t_final > 0 and self.step > 0):
            raise InvalidParameterError("t_final and step must be positive")
        if self.corrector_sweeps < 1:
            raise InvalidParameterError("corrector_sweeps must be >= 1")
        n = self.t_final / self.step
        if n > MAX_STEPS:
            raise InvalidParameterError(f"t_final/step = {n:.3g} exceeds {MAX_STEPS}")
        if abs(n - round(n)) > 1e-6 * max(1.0, n):
            raise InvalidParameterError("t_final must be an integer multiple of step")

    @property
    def nsteps(self) -> int:
        return int(round(self.t_final / self.step))


@dataclass(frozen=True)
class Trajectory:
    orders: MultiOrder
    times: np.ndarray
    states: np.ndarray
    initial: np.ndarray

    @property
    def step(self) -> float:
        return float(self.times[-1] / (self.times.size - 1))

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]

    def to_csv(self, path) -> None:
        write_csv(path, self.times, self.states)


def _grid(t_final: float, n: int) -> np.ndarray:
    return t_final * (np.arange(n + 1) / n)


def integrate(f: VectorField, orders: MultiOrder, omega, cfg: SolveConfig) -> Trajectory:
    """Integrate ``D^alpha w = f(w)``, ``w(0) = omega`` on ``[0, cfg.t_final]``.

    Raises :class:`BlowUpError` when a state turns non-finite or exceeds
    ``1e12`` in max-norm; the error carries the partial trajectory.
    Components dropping below ``-1e-6`` trigger one :class:`UndershootWarning`;
    states are never clamped.
    """
    omega = np.asarray(omega, dtype=float)
    d = orders.dimension
    if omega.shape != (d,) or f.dimension != d:
        raise DimensionMismatchError(f"omega {omega.shape}, orders {d}, field {f.dimension} disagree")
    if np.any(omega < 0.0):
        raise InvalidParameterError(f"initial state must be nonnegative, got {omega.tolist()}")

    n_steps = cfg.nsteps
    h = cfg.t_final / n_steps
    alphas = orders.as_array()

    # weights stored reversed so each step reads a contiguous tail slice
    rect = np.empty((d, n_steps))
    trap = np.empty((d, n_steps))
    start = np.empty((d, n_steps + 1))
    for i, a in enumerate(alphas):
        rect[i] = power_first_difference(a, n_steps)[::-1]
        trap[i] = power_second_difference(a + 1.0, n_steps)[::-1]
        start[i, 1:] = trapezoid_start_weights(a, np.arange(1, n_steps + 1))
    start[:, 0] = 0.0
    c_pred = h**alphas / np.array([math.gamma(a + 1.0) for a in alphas])
    c_corr = h**alphas / np.array([math.gamma(a + 2.0) for a in alphas])

    states = np.empty((n_steps + 1, d))
    fhist = np.empty((d, n_steps + 1))
    states[0] = omega
    fhist[:, 0] = f(omega)
    warned = False

    for n in range(n_steps):
        lo = n_steps - 1 - n
        pred = omega + c_pred * np.einsum("ij,ij->i", rect[:, lo:], fhist[:, : n + 1])
        memory = start[:, n + 1] * fhist[:, 0]
        if n > 0:
            memory += np.einsum("ij,ij->i", trap[:, lo + 1 :], fhist[:, 1 : n + 1])
        w = pred
        for _ in range(cfg.corrector_sweeps):
            w = omega + c_corr * (f(w) + memory)
        fw = f(w)

        if not (np.all(np.isfinite(w)) and np.all(np.isfinite(fw)) and np.max(np.abs(w)) <= BLOWUP_LIMIT):
            partial = Trajectory(orders, _grid(n * h, n) if n > 0 else np.zeros(1), states[: n + 1].copy(), omega)
            raise BlowUpError(f"state left the finite range at t = {(n + 1) * h:.6g}", last_valid=n, trajectory=partial)
        if not warned and np.min(w) < UNDERSHOOT_FLOOR:
            warnings.warn(
                f"component undershoot {np.min(w):.3e} at t = {(n + 1) * h:.6g}",
                UndershootWarning,
                stacklevel=2,
            )
            warned = True
        states[n + 1] = w
        fhist[:, n + 1] = fw

    return Trajectory(orders, _grid(cfg.t_final, n_steps), states, omega.copy())


def evaluate_along(f: VectorField, traj: Trajectory) -> np.ndarray:
    return np.array([f(w) for w in traj.states])


def residual(f: VectorField, traj: Trajectory, stride: int = 10) -> float:
    """Max deviation of the states from the Volterra form, checked every ``stride`` points.

    The memory integral is recomputed from f along the trajectory with the
    product-trapezoid quadrature of :func:`rl_integral`.
    """
    values = evaluate_along(f, traj)
    worst = 0.0
    for i, a in enumerate(traj.orders.alphas):
        integral = rl_integral(SampledFunction(traj.times, values[:, i]), a).values
        dev = np.abs(traj.initial[i] + integral - traj.states[:, i])[::stride]
        worst = max(worst, float(np.max(dev)))
    return worst


def residual_tolerance(orders: MultiOrder, step: float) -> float:
    """``50 h^q`` with ``q = min_i min(2, 1 + alpha_i)``."""
    q = min(min(2.0, 1.0 + a) for a in orders.alphas)
    return 50.0 * step**q


def convergence_order(f: VectorField, orders: MultiOrder, omega, t_final: float, h0: float, exact=None) -> float:
    """Empirical order from runs at ``h0``, ``h0/2`` and ``h0/4``.

    With ``exact`` (the state at ``t_final``) the errors are measured against
    it using the two coarser runs.  Otherwise successive differences
    ``|w_h - w_{h/2}| / |w_{h/2} - w_{h/4}|`` are used.  Returns ``math.inf``
    when the discrete solutions are exact.
    """
    finals = []
    for k in range(3):
        cfg = SolveConfig(t_final, h0 / 2**k)
        finals.append(integrate(f, orders, omega, cfg).final)
    if exact is not None:
        exact = np.asarray(exact, dtype=float)
        e0 = np.max(np.abs(finals[0] - exact))
        e1 = np.max(np.abs(finals[1] - exact))
    else:
        e0 = np.max(np.abs(finals[0] - finals[1]))
        e1 = np.max(np.abs(finals[1] - finals[2]))
    if e0 == 0.0 and e1 == 0.0:
        return math.inf
    if e1 == 0.0:
        return math.inf
    return math.log2(e0 / e1)


# {{{ csv


def write_csv(path, times, states) -> None:
    """``t,w1,...,wd`` header, 17 significant digits, LF line endings."""
    states = np.atleast_2d(np.asarray(states, dtype=float))
    d = states.shape[1]
    header = ",".join(["t"] + [f"w{i + 1}" for i in range(d)])
    data = np.column_stack([np.asarray(times, dtype=float), states])
    with open(path, "w", newline="\n") as fh:
        fh.write(header + "\n")
        np.savetxt(fh, data, fmt="%.17g", delimiter=",", newline="\n")


def read_csv(path):
    with open(path) as fh:
        header = fh.readline().strip().split(",")
    if not header or header[0] != "t" or header[1:] != [f"w{i}" for i in range(1, len(header))]:
        raise ValueError(f"unexpected trajectory header {header}")
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return data[:, 0], data[:, 1:]


# }}}
