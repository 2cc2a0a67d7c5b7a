#!/usr/bin/env python3
"""Forge the nonunitary-intertwiner series with the phase-locked gate."""

import argparse
import sys

from dysonforge import cli


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--config", default="configs/nonunitary_series.json")
    ap.add_argument("--out", default="out/nonunitary")
    args = ap.parse_args()
    for step in (["forge", "--config", args.config, "--out", args.out],
                 ["verify-fock", "--config", args.config, "--out", args.out],
                 ["report", "--out", args.out]):
        code = cli.main(step)
        if code != 0:
            return code
    return 0


if __name__ == "__main__":
    sys.exit(main())
