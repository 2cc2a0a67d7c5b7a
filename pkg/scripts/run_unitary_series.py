#!/usr/bin/env python3
"""Forge the unitary-intertwiner series and verify it at operator level.

Writes ledger.json, per-step coefficient tables and Fock-space reports to
the output directory (default out/unitary).
"""

import argparse
import sys

from dysonforge import cli


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--config", default="configs/unitary_series.json")
    ap.add_argument("--out", default="out/unitary")
    ap.add_argument("--nmax", type=int, default=None)
    args = ap.parse_args()

    forge_args = ["forge", "--config", args.config, "--out", args.out]
    if args.nmax is not None:
        forge_args += ["--nmax", str(args.nmax)]
    code = cli.main(forge_args)
    if code != 0:
        return code
    code = cli.main(["verify-fock", "--config", args.config, "--out", args.out])
    if code != 0:
        return code
    return cli.main(["report", "--out", args.out])


if __name__ == "__main__":
    sys.exit(main())
