"""Vector fields and screening of the cooperative/homogeneous hypotheses.

Three hypotheses are checked numerically on a field f:

* cooperative: Df(x) is Metzler (nonnegative off-diagonal) for x >= 0, x != 0;
* homogeneous of degree p: f(lam x) = lam^p f(x);
* decay direction: some v > 0 has f(v) < 0 componentwise.

All three are sampled, so a pass is evidence rather than proof.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.stats import qmc

from .errors import DegenerateFieldError, DimensionMismatchError, FieldEvaluationError, InvalidParameterError
from .report import Verdict, info_line

TOL_METZLER = 1e-9
BOUNDARY_OFFSET = 1e-4
# smallest admissible entry of a max-normalized decay direction
MIN_WEIGHT = 1e-6


@dataclass(frozen=True)
class VectorField:
    """An autonomous field ``f: R^d -> R^d`` with an optional analytic Jacobian.

    With ``clip_negative`` the field is evaluated at ``max(w, 0)``; this keeps
    fields with square roots defined when a numerical state dips marginally
    below zero.
    """

    dimension: int
    func: Callable[[np.ndarray], np.ndarray]
    jacobian_func: Optional[Callable[[np.ndarray], np.ndarray]] = None
    name: str = ""
    clip_negative: bool = False

    def __call__(self, w) -> np.ndarray:
        w = np.asarray(w, dtype=float)
        if self.clip_negative:
            w = np.maximum(w, 0.0)
        return np.asarray(self.func(w), dtype=float)

    def jacobian(self, w) -> np.ndarray:
        w = np.asarray(w, dtype=float)
        if self.clip_negative:
            w = np.maximum(w, 0.0)
        if self.jacobian_func is not None:
            return np.asarray(self.jacobian_func(w), dtype=float)
        return fd_jacobian(self.func, w)


def fd_jacobian(func, x) -> np.ndarray:
    """Central-difference Jacobian, one-sided where x_j - h_j would leave the orthant."""
    x = np.asarray(x, dtype=float)
    d = x.size
    jac = np.empty((d, d))
    for j in range(d):
        h = 1e-6 * max(1.0, abs(x[j]))
        e = np.zeros(d)
        e[j] = h
        if x[j] - h >= 0.0:
            jac[:, j] = (np.asarray(func(x + e)) - np.asarray(func(x - e))) / (2.0 * h)
        else:
            f0 = np.asarray(func(x))
            jac[:, j] = (-3.0 * f0 + 4.0 * np.asarray(func(x + e)) - np.asarray(func(x + 2 * e))) / (2.0 * h)
    return jac


def as_weight(v, dimension: int | None = None) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    if v.ndim != 1 or not np.all(v > 0.0) or not np.all(np.isfinite(v)):
        raise InvalidParameterError(f"weight vector must be strictly positive, got {v}")
    if dimension is not None and v.size != dimension:
        raise DimensionMismatchError(f"weight has {v.size} entries, expected {dimension}")
    return v


def weighted_norm(w, v) -> float:
    """``max_i |w_i| / v_i``."""
    w = np.asarray(w, dtype=float)
    v = as_weight(v)
    if w.shape[-1] != v.size:
        raise DimensionMismatchError(f"vector has {w.shape[-1]} entries, weight has {v.size}")
    return float(np.max(np.abs(w) / v))


# {{{ cooperativity


def sample_points(dimension: int, samples: int, box_radius: float, seed: int = 0) -> np.ndarray:
    """Scrambled Sobol points in ``[1e-4, box_radius]^d``."""
    sampler = qmc.Sobol(d=dimension, scramble=True, seed=seed)
    m = max(int(math.ceil(math.log2(max(samples, 1)))), 0)
    u = sampler.random_base2(m)[:samples]
    return BOUNDARY_OFFSET + u * (box_radius - BOUNDARY_OFFSET)


def check_cooperative(f: VectorField, samples: int = 256, box_radius: float = 1.0, seed: int = 0) -> Verdict:
    """Sample Df on the positive box and test that it is Metzler.

    The margin is the smallest off-diagonal entry seen; the verdict details
    carry its (row, column) and the sample point.
    """
    if samples < 1:
        raise InvalidParameterError("samples must be >= 1")
    if not box_radius > BOUNDARY_OFFSET:
        raise InvalidParameterError(f"box_radius must exceed {BOUNDARY_OFFSET}")
    d = f.dimension
    pts = sample_points(d, samples, box_radius, seed)
    worst = math.inf
    worst_entry = None
    worst_point = None
    offdiag = ~np.eye(d, dtype=bool)
    for x in pts:
        try:
            jac = f.jacobian(x)
        except (ArithmeticError, ValueError) as exc:
            raise FieldEvaluationError(f"Jacobian evaluation failed at {x.tolist()}: {exc}", x) from exc
        if not np.all(np.isfinite(jac)):
            raise FieldEvaluationError(f"non-finite Jacobian at {x.tolist()}", x)
        if d == 1:
            continue
        vals = np.where(offdiag, jac, np.inf)
        k = int(np.argmin(vals))
        if vals.flat[k] < worst:
            worst = float(vals.flat[k])
            worst_entry = divmod(k, d)
            worst_point = x.copy()
    if d == 1:
        worst = 0.0
    desc = f"Metzler test of Df on {samples} samples in (0, {box_radius:g}]^{d}"
    if worst_entry is not None:
        i, j = worst_entry
        desc += f"; min off-diagonal d f{i + 1}/d w{j + 1} = {worst:.3e}"
    return Verdict.from_margin(
        "cooperative",
        math.nan,
        worst,
        TOL_METZLER,
        desc,
        entry=worst_entry,
        point=None if worst_point is None else worst_point.tolist(),
        samples=samples,
        box_radius=box_radius,
    )


# }}}


# {{{ homogeneity


def degree_at(f: VectorField, x, lam: float) -> float:
    fx = np.max(np.abs(f(x)))
    flx = np.max(np.abs(f(lam * np.asarray(x, dtype=float))))
    return math.log(flx / fx) / math.log(lam)


def estimate_homogeneity_degree(f: VectorField, probes: int = 8, seed: int = 0, scales=(2.0, 4.0)):
    """Estimate p in ``f(lam x) = lam^p f(x)`` from random positive probes.

    Returns ``(p, residual)`` where residual is the worst relative defect
    ``|f(lam x) - lam^p f(x)|_inf / |f(x)|_inf`` using the mean estimate.
    """
    if probes < 2:
        raise InvalidParameterError("probes must be >= 2")
    rng = np.random.default_rng(seed)
    xs = rng.uniform(0.1, 1.0, size=(probes, f.dimension))
    pairs = []
    estimates = []
    for x in xs:
        fx = f(x)
        nx = np.max(np.abs(fx))
        if not nx > 0.0:
            continue
        for lam in scales:
            flx = f(lam * x)
            estimates.append(math.log(np.max(np.abs(flx)) / nx) / math.log(lam))
            pairs.append((fx, flx, lam, nx))
    if not estimates:
        raise DegenerateFieldError("field vanishes at every probe point")
    p = float(np.mean(estimates))
    residual = max(float(np.max(np.abs(flx - lam**p * fx))) / nx for fx, flx, lam, nx in pairs)
    return p, residual


# }}}


# {{{ decay direction


def decay_margin(f: VectorField, v) -> float:
    """``min_i -f_i(v) / v_i``; positive iff f(v) < 0."""
    v = np.asarray(v, dtype=float)
    return float(np.min(-f(v) / v))


def _decay_score(f: VectorField, v) -> float:
    # search objective: min_i -f_i(v) for max-normalized v; unlike the
    # decay margin it does not reward driving an entry of v to zero
    return float(np.min(-f(v)))


def find_decay_direction(f: VectorField, budget: int = 2000, seed: int = 0, scale: float = 1.0) -> Optional[np.ndarray]:
    """Search for ``v > 0`` with ``f(v) < 0``, or return None.

    The uniform direction is returned as is when it already works.
    Otherwise random points of the unit simplex (normalized to max-norm one)
    seed a multiplicative coordinate ascent on ``min_i -f_i(v)``.  The result
    is rescaled by ``scale``.
    """
    if budget < 1:
        raise InvalidParameterError("budget must be >= 1")
    d = f.dimension
    if np.all(f(np.full(d, scale)) < 0.0):
        return np.full(d, float(scale))
    rng = np.random.default_rng(seed)
    cands = rng.dirichlet(np.ones(d), size=budget)
    cands = np.vstack([np.ones(d), cands])
    cands /= cands.max(axis=1, keepdims=True)
    cands = np.maximum(cands, MIN_WEIGHT)

    margins = np.array([_decay_score(f, c) for c in cands])
    order = np.argsort(-margins, kind="stable")[: min(5, len(cands))]

    best_v, best_m = None, -math.inf
    evals = 0
    for idx in order:
        v = cands[idx].copy()
        m = margins[idx]
        step = 0.5
        while step > 1e-6 and evals < 20 * budget:
            improved = False
            for i in range(d):
                for factor in (1.0 + step, 1.0 / (1.0 + step)):
                    trial = v.copy()
                    trial[i] *= factor
                    trial /= trial.max()
                    if trial.min() < MIN_WEIGHT:
                        continue
                    tm = _decay_score(f, trial)
                    evals += 1
                    if tm > m:
                        v, m, improved = trial, tm, True
            if not improved:
                step *= 0.5
        if m > best_m:
            best_v, best_m = v, m

    if best_v is None or not best_m > 0.0:
        return None
    best_v = best_v * scale
    if not np.all(f(best_v) < 0.0):
        return None
    return best_v


# }}}


@dataclass
class HypothesisReport:
    cooperative: Verdict
    degree: float
    degree_residual: float
    v_candidate: Optional[np.ndarray]
    f_at_v: Optional[np.ndarray] = None
    notes: list = field(default_factory=list)

    @property
    def homogeneous(self) -> bool:
        return self.degree_residual <= 1e-8

    @property
    def ok(self) -> bool:
        return self.cooperative.passed and self.homogeneous and self.degree >= 1.0 - 1e-9 and self.v_candidate is not None

    def lines(self) -> list[str]:
        out = [self.cooperative.line()]
        out.append(info_line("degree", p=self.degree, residual=self.degree_residual))
        hom = "PASS" if self.homogeneous and self.degree >= 1.0 - 1e-9 else "FAIL"
        out.append(f"CHECK homogeneous {hom} worst_t=nan margin={0.0 - self.degree_residual:.6e} tol=1.000000e-08")
        if self.v_candidate is None:
            out.append("CHECK decay_direction FAIL worst_t=nan margin=nan tol=0.000000e+00")
        else:
            margin = float(np.min(-self.f_at_v / self.v_candidate))
            out.append(f"CHECK decay_direction PASS worst_t=nan margin={margin:.6e} tol=0.000000e+00")
            out.append(info_line("decay_direction", v=self.v_candidate, f_v=self.f_at_v))
        return out


def analyze(f: VectorField, samples: int = 256, box_radius: float = 1.0, probes: int = 8, budget: int = 2000, seed: int = 0) -> HypothesisReport:
    coop = check_cooperative(f, samples, box_radius, seed)
    try:
        p, res = estimate_homogeneity_degree(f, probes, seed)
    except DegenerateFieldError:
        p, res = math.nan, math.inf
    v = find_decay_direction(f, budget, seed)
    fv = None if v is None else f(v)
    return HypothesisReport(coop, p, res, v, fv)
