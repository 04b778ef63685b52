#!/usr/bin/env python
"""Run `annotate` twice on a corpus (optionally with different --jobs) and compare output trees byte for byte."""

import argparse
import sys
import tempfile
import time
from pathlib import Path

from clothfold.cli import main as cli_main


def tree(root: Path) -> dict:
    return {str(p.relative_to(root)): p.read_bytes() for p in sorted(root.rglob("*")) if p.is_file()}


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("input", nargs="?", default=str(Path(__file__).resolve().parents[1] / "data" / "synthetic"))
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--jobs", type=int, nargs=2, default=(1, 4), metavar=("A", "B"))
    args = parser.parse_args()
    with tempfile.TemporaryDirectory() as tmp:
        outs = []
        for i, jobs in enumerate(args.jobs):
            out = Path(tmp) / f"run{i}"
            t0 = time.perf_counter()
            cli_main(["annotate", args.input, "--output", str(out), "--seed", str(args.seed), "--jobs", str(jobs)])
            print(f"run {i} (--jobs {jobs}): {time.perf_counter() - t0:.2f} s")
            outs.append(tree(out))
        a, b = outs
        diff = sorted(k for k in set(a) | set(b) if a.get(k) != b.get(k))
        print(f"{len(a)} files, {len(diff)} differ")
        for k in diff[:20]:
            print("  ", k)
        sys.exit(1 if diff else 0)


if __name__ == "__main__":
    main()
