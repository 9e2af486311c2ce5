#!/usr/bin/env python3
"""Drive every preset end to end and collect CSVs under results/.

Roughly five minutes of compute; pass --quick to shrink the sweeps for a
smoke run.  The figure renderer in figures/ consumes the outputs.
"""

import argparse
import sys
import time

from phasefold.cli import main as cli_main

SWEEPS = [
    ("convergence", "scalar_smooth_a"),
    ("convergence", "scalar_spectral_phase"),
    ("convergence", "scalar_upwind_phase"),
    ("convergence", "scalar_uncorrected"),
    ("convergence", "scalar_vanishing_a"),
    ("convergence", "system_rotation"),
    ("convergence", "system_spectral_phase"),
    ("convergence", "system_upwind_phase"),
    ("convergence", "system_uncorrected"),
    ("asymptotic", "scalar_asymptotic"),
    ("timeseries", "scalar_timeseries"),
    ("hopping", "hopping_eps_1"),
    ("hopping", "hopping_eps_1_32"),
    ("hopping", "hopping_eps_1_256"),
]


def run(quick: bool) -> int:
    for command, preset in SWEEPS:
        args = [command, "--preset", preset]
        if quick:
            if command == "convergence":
                args += ["--nts", "20,40"]
            if preset == "hopping_eps_1_256":
                continue  # the resolved 1/256 reference dominates the runtime
        t0 = time.perf_counter()
        rc = cli_main(args)
        print(f"[{command} {preset}] rc={rc} ({time.perf_counter() - t0:.1f}s)")
        if rc != 0:
            return rc
    return 0


if __name__ == "__main__":
    parser = argparse.ArgumentParser()
    parser.add_argument("--quick", action="store_true", help="shrunken sweeps")
    sys.exit(run(parser.parse_args().quick))
