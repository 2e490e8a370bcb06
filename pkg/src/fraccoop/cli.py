"""Command-line front end.

Exit codes: 0 success, 1 a check failed (or the solver blew up), 2 bad
input, 3 no feasible decay rate.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

import numpy as np

from . import attractivity as att
from .errors import (
    BlowUpError,
    ConvergenceError,
    DomainViolationError,
    FieldEvaluationError,
    FieldParseError,
    FraccoopError,
    HypothesisViolationError,
    InfeasibleError,
)
from .field import analyze as analyze_field
from .fieldfile import load_field
from .kolmogorov import assemble, equilibrium_error, equilibrium_verdict, find_equilibrium, rate_from_trajectory
from .report import info_line, write_report
from .solver import MultiOrder, SolveConfig, integrate
from .svg import trajectory_panels, write_svg
from .systems import EXAMPLES

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_INPUT = 2
EXIT_INFEASIBLE = 3

DEFAULT_TFINAL = 50.0
DEFAULT_STEP = 1e-3


def seed_from_env() -> int:
    raw = os.environ.get("FRACCOOP_SEED", "0")
    try:
        return int(raw)
    except ValueError:
        raise ValueError(f"FRACCOOP_SEED must be an integer, got {raw!r}") from None


def _vector(text: str, dimension: int, what: str) -> np.ndarray:
    try:
        vals = [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise ValueError(f"--{what}: expected comma-separated numbers, got {text!r}") from None
    if len(vals) == 1 and dimension > 1:
        vals = vals * dimension
    if len(vals) != dimension:
        raise ValueError(f"--{what}: expected {dimension} values, got {len(vals)}")
    return np.array(vals)


def _emit(lines, out=None):
    for line in lines:
        print(line, file=out or sys.stdout)


def _pipeline_lines(verdicts, infos):
    return [v.line() for v in verdicts] + list(infos)


# {{{ commands


def cmd_reproduce(args) -> int:
    ex = EXAMPLES[args.example]
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    seed = seed_from_env()
    orders = MultiOrder(ex.orders)
    omega = np.array(ex.omega)
    cfg = SolveConfig(args.tfinal, args.step)
    verdicts, infos = [], []
    envelope = None

    if ex.is_kolmogorov:
        system = assemble(ex.rates, ex.field, seed=seed)
        infos.append(info_line("degree", p=system.degree))
        eq = find_equilibrium(system, np.ones(ex.field.dimension))
        verdicts.append(equilibrium_verdict(eq, ex.equilibrium))
        traj = integrate(system.assembled, orders, omega, cfg)
        verdicts.append(att.positivity_check(traj))
        err = equilibrium_error(traj, eq.point)
        infos.append(info_line("equilibrium", point=eq.point, residual=eq.residual))
        infos.append(info_line("distance_to_equilibrium", t=traj.times[-1], e=err[-1]))
        if traj.times[-1] >= 100.0:
            rate = rate_from_trajectory(traj, eq, orders.min / system.degree)
            verdicts.append(rate.verdict)
            infos.append(info_line("rate", exponent=rate.exponent, bound=rate.bound, slope=rate.slope))
        else:
            infos.append(info_line("rate_skipped", t_final=traj.times[-1], needed=100.0))
    else:
        hyp = analyze_field(ex.field, seed=seed)
        infos.extend(hyp.lines())
        traj = integrate(ex.field, orders, omega, cfg)
        verdicts.append(att.positivity_check(traj))
        verdicts.append(att.boundedness_check(traj, ex.v))
        env = att.build_envelope(ex.field, ex.v, orders, ex.degree, omega)
        envelope = env.values(traj.times)
        verdicts.append(att.envelope_check(traj, env))
        infos.append(info_line("envelope", beta=env.beta, eta=env.eta, C=env.amplitudes))
        if ex.number == 2:
            verdicts.append(att.monotonicity_check(ex.field, orders, omega / 2.0, omega, cfg))

    traj.to_csv(out / "trajectory.csv")
    write_report(out / "verdicts.txt", verdicts, infos)
    write_svg(out / "orbit.svg", trajectory_panels(traj.times, traj.states, envelope, title=f"example {ex.number}"))
    _emit(_pipeline_lines(verdicts, infos))
    return EXIT_OK if all(v.passed for v in verdicts) else EXIT_FAIL


def cmd_analyze(args) -> int:
    definition = load_field(args.field)
    seed = seed_from_env()
    rep = analyze_field(definition.field, seed=seed)
    lines = rep.lines()
    if definition.rates is not None:
        lines.append(info_line("rates", b=definition.rates))
    _emit(lines)
    if args.strict and not rep.ok:
        return EXIT_FAIL
    return EXIT_OK


def cmd_envelope(args) -> int:
    definition = load_field(args.field)
    f = definition.field
    d = definition.dimension
    orders = MultiOrder(_vector(args.orders, d, "orders"))
    omega = _vector(args.omega, d, "omega")
    rep = analyze_field(f, seed=seed_from_env())
    _emit(rep.lines())
    if not rep.homogeneous:
        raise InfeasibleError(f"field is not homogeneous (degree residual {rep.degree_residual:.3e})")
    p = float(round(rep.degree)) if abs(rep.degree - round(rep.degree)) <= 1e-6 else rep.degree
    if p < 1.0:
        raise InfeasibleError(f"homogeneity degree {p:.6g} is below 1")
    if args.v is not None:
        v = _vector(args.v, d, "v")
    elif rep.v_candidate is not None:
        v = rep.v_candidate
    else:
        raise InfeasibleError("no decay direction v with f(v) < 0 was found")

    env = att.build_envelope(f, v, orders, p, omega)
    _emit(
        [
            info_line("envelope", eta=env.eta, beta=env.beta, m=env.m, p=p),
            info_line("amplitudes", C=env.amplitudes, v=env.v),
        ]
    )
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    cfg = SolveConfig(args.tfinal, args.step)
    traj = integrate(f, orders, omega, cfg)
    verdict = att.envelope_check(traj, env)
    traj.to_csv(out / "trajectory.csv")
    write_svg(out / "envelope.svg", trajectory_panels(traj.times, traj.states, env.values(traj.times), title="envelope"))
    write_report(out / "verdicts.txt", [verdict], [info_line("envelope", eta=env.eta, beta=env.beta, C=env.amplitudes)])
    _emit([verdict.line()])
    return EXIT_OK if verdict.passed else EXIT_FAIL


def cmd_simulate(args) -> int:
    definition = load_field(args.field)
    d = definition.dimension
    orders = MultiOrder(_vector(args.orders, d, "orders"))
    omega = _vector(args.omega, d, "omega")
    cfg = SolveConfig(args.tfinal, args.step)
    f = definition.field
    if definition.rates is not None:
        f = assemble(definition.rates, f, screen=False).assembled
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    try:
        traj = integrate(f, orders, omega, cfg)
    except BlowUpError as exc:
        if exc.trajectory is not None:
            exc.trajectory.to_csv(out / "trajectory.csv")
        raise
    traj.to_csv(out / "trajectory.csv")
    write_svg(out / "orbit.svg", trajectory_panels(traj.times, traj.states))
    _emit([info_line("final", t=traj.times[-1], w=traj.final), att.positivity_check(traj).line()])
    return EXIT_OK


# }}}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fraccoop", description="Multi-order fractional cooperative systems: simulation and checks.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("reproduce", help="run a built-in example through the full pipeline")
    p.add_argument("--example", type=int, choices=sorted(EXAMPLES), required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--tfinal", type=float, default=DEFAULT_TFINAL)
    p.add_argument("--step", type=float, default=DEFAULT_STEP)
    p.set_defaults(func=cmd_reproduce)

    p = sub.add_parser("analyze", help="screen a field file for the hypotheses")
    p.add_argument("field")
    p.add_argument("--strict", action="store_true", help="exit 1 when a hypothesis fails")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("envelope", help="compute the decay envelope and overlay it on a trajectory")
    p.add_argument("field")
    p.add_argument("--orders", required=True)
    p.add_argument("--omega", required=True)
    p.add_argument("--v")
    p.add_argument("--out", required=True)
    p.add_argument("--tfinal", type=float, default=DEFAULT_TFINAL)
    p.add_argument("--step", type=float, default=DEFAULT_STEP)
    p.set_defaults(func=cmd_envelope)

    p = sub.add_parser("simulate", help="integrate a field file")
    p.add_argument("field")
    p.add_argument("--orders", required=True)
    p.add_argument("--omega", required=True)
    p.add_argument("--tfinal", type=float, required=True)
    p.add_argument("--step", type=float, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_simulate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except FieldParseError as exc:
        print(f"error: {getattr(args, 'field', '')}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except InfeasibleError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (HypothesisViolationError, BlowUpError, ConvergenceError, DomainViolationError, FieldEvaluationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except (OSError, ValueError, FraccoopError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
