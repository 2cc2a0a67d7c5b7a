#!/usr/bin/env python3
"""Run the three seed-1 pairings whose Hermiticity gate refuses.

Exit code 2 from each forge run is the expected outcome; the script
reports the refused gate residuals recorded in the ledgers.
"""

import json
import sys
from pathlib import Path

from dysonforge import cli


def main():
    ok = True
    for j in (2, 3, 4):
        out = Path(f"out/breakdown_eta1_eta{j}")
        code = cli.main(["forge", "--config",
                         f"configs/breakdown_eta1_eta{j}.json",
                         "--out", str(out)])
        doc = json.loads((out / "ledger.json").read_text())
        refused = [e for e in doc["entries"] if e["refused"]]
        worst = min(e["gate_residual"] for e in refused) if refused else 0.0
        print(f"pair (1,{j}): exit {code}, {len(refused)} refused steps, "
              f"smallest refused residual {worst:.3e}")
        ok = ok and code == cli.EXIT_REFUSED and worst > 1e-3
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
