#!/usr/bin/env python3
"""Plot the Hermitian coefficient functions of a forged series.

Reads h_series_<n>.csv files from a forge output directory and draws
f+(t), f-(t) for every admitted step of one family.
"""

import argparse
import csv
import sys
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default="out/unitary")
    ap.add_argument("--family", choices=["eta", "eta_tilde"], default="eta_tilde")
    ap.add_argument("--save", default=None)
    args = ap.parse_args()

    out = Path(args.out)
    files = sorted(out.glob("h_series_*.csv"),
                   key=lambda p: int(p.stem.split("_")[-1]))
    if not files:
        print(f"no series tables in {out}; run a forge script first")
        return 1

    fig, axes = plt.subplots(1, 2, figsize=(11, 4), sharex=True)
    for path in files:
        n = int(path.stem.split("_")[-1])
        with open(path) as fh:
            rows = list(csv.DictReader(fh))
        key_p, key_m = f"{args.family}_f_plus", f"{args.family}_f_minus"
        if key_p not in rows[0]:
            continue
        t = [float(r["t"]) for r in rows]
        axes[0].plot(t, [float(r[key_p]) for r in rows], label=f"n={n}")
        axes[1].plot(t, [float(r[key_m]) for r in rows], label=f"n={n}")
    axes[0].set_title("f+ along the series")
    axes[1].set_title("f- along the series")
    for ax in axes:
        ax.set_xlabel("t")
        ax.legend(fontsize=7, ncol=2)
    target = args.save or str(out / f"h_series_{args.family}.png")
    fig.tight_layout()
    fig.savefig(target, dpi=150)
    print("wrote", target)
    return 0


if __name__ == "__main__":
    sys.exit(main())
