#!/usr/bin/env python
"""Regenerate the bundled synthetic sequence corpus under data/synthetic/."""

import argparse
from pathlib import Path

from clothfold.synthetic import write_corpus


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default=str(Path(__file__).resolve().parents[1] / "data" / "synthetic"))
    args = parser.parse_args()
    for p in write_corpus(args.out):
        print(p)


if __name__ == "__main__":
    main()
