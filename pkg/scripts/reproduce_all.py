"""Run the three built-in examples through the CLI pipeline.

Usage: python3 scripts/reproduce_all.py [out_dir] [--tfinal F] [--step H]
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

from fraccoop.cli import main


def run(out: Path, extra: list[str]) -> int:
    worst = 0
    for n in (1, 2, 3):
        start = time.perf_counter()
        print(f"== example {n}")
        code = main(["reproduce", "--example", str(n), "--out", str(out / f"example{n}"), *extra])
        print(f"== example {n}: exit {code} in {time.perf_counter() - start:.1f}s")
        worst = max(worst, code)
    return worst


if __name__ == "__main__":
    parser = argparse.ArgumentParser()
    parser.add_argument("out", nargs="?", default="out")
    parser.add_argument("--tfinal")
    parser.add_argument("--step")
    args = parser.parse_args()
    extra = []
    if args.tfinal:
        extra += ["--tfinal", args.tfinal]
    if args.step:
        extra += ["--step", args.step]
    sys.exit(run(Path(args.out), extra))
