"""Verdicts and their line-oriented text serialization.

One verdict per line::

    CHECK <name> PASS|FAIL worst_t=<v> margin=<v> tol=<v>

Auxiliary numbers (decay rates, equilibria, degrees) are written as
``INFO <name> key=value ...`` lines so the file stays grep-able.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field


def _fmt(x) -> str:
    if hasattr(x, "item") and getattr(x, "ndim", 1) == 0:
        x = x.item()
    if isinstance(x, (int, float)) and not isinstance(x, bool):
        x = float(x)
        if math.isnan(x):
            return "nan"
        return f"{x:.6e}"
    return str(x)


@dataclass(frozen=True)
class Verdict:
    """Pass/fail outcome of a property check.

    ``worst_margin`` is signed: negative values are violations.  The check
    passes iff ``worst_margin >= -tolerance``.
    """

    name: str
    passed: bool
    worst_time: float
    worst_margin: float
    tolerance: float
    description: str = ""
    details: dict = field(default_factory=dict)

    @classmethod
    def from_margin(cls, name, worst_time, worst_margin, tolerance, description="", **details):
        passed = bool(worst_margin >= -tolerance)
        return cls(name, passed, float(worst_time), float(worst_margin), float(tolerance), description, details)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (
            f"CHECK {self.name} {status} worst_t={_fmt(self.worst_time)} "
            f"margin={_fmt(self.worst_margin)} tol={_fmt(self.tolerance)}"
        )


def info_line(name: str, **values) -> str:
    parts = []
    for key, val in values.items():
        if isinstance(val, (list, tuple)) or getattr(val, "ndim", 0) > 0:
            val = ",".join(_fmt(float(x)) for x in list(val))
        else:
            val = _fmt(val)
        parts.append(f"{key}={val}")
    return f"INFO {name} " + " ".join(parts)


def parse_check_line(line: str) -> dict:
    """Inverse of :meth:`Verdict.line` for the fixed fields."""
    tokens = line.split()
    if len(tokens) != 6 or tokens[0] != "CHECK" or tokens[2] not in ("PASS", "FAIL"):
        raise ValueError(f"not a CHECK line: {line!r}")
    out = {"name": tokens[1], "passed": tokens[2] == "PASS"}
    for tok in tokens[3:]:
        key, _, val = tok.partition("=")
        out[key] = float(val)
    return out


def write_report(path, verdicts, infos=()) -> None:
    lines = [v.line() for v in verdicts] + list(infos)
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
