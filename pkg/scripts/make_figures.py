#!/usr/bin/env python3
"""Produce the CSVs (quick sweeps) and render every figure family.

Requires the figures package to be built once: cd figures && npm install &&
npm run build.  Use --full for the full-size sweeps.
"""

import argparse
import subprocess
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
SPECS = [
    "scalar_error_vs_nts.spec",
    "scalar_error_vs_eps.spec",
    "system_error_vs_nts.spec",
    "asymptotic_distance.spec",
    "snapshot_zoom.spec",
    "timeseries.spec",
    "hopping_slices.spec",
    "hopping_densities.spec",
]


def main() -> int:
    parser = argparse.ArgumentParser()
    parser.add_argument("--full", action="store_true", help="full-size sweeps")
    parser.add_argument("--skip-solve", action="store_true", help="reuse existing CSVs")
    args = parser.parse_args()
    if not args.skip_solve:
        from run_all_experiments import run

        rc = run(quick=not args.full)
        if rc != 0:
            return rc
    cli = ROOT / "figures" / "dist" / "cli.js"
    if not cli.exists():
        print("figures package is not built; run: cd figures && npm install && npm run build")
        return 2
    cmd = ["node", str(cli), "render"]
    for spec in SPECS:
        cmd += ["--spec", str(ROOT / "figures" / "specs" / spec)]
    return subprocess.run(cmd, cwd=ROOT / "figures").returncode


if __name__ == "__main__":
    sys.path.insert(0, str(Path(__file__).resolve().parent))
    sys.exit(main())
