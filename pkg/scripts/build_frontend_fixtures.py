#!/usr/bin/env python3
"""Regenerate the bundled experiment outputs under frontend/fixtures/.

Runs the CLI on the shipped configs and collects the CSV/JSON outputs the
figure renderer consumes. Deterministic; run from the repository root.
"""

import shutil
import sys
from pathlib import Path

from aifdom.cli import main

REPO = Path(__file__).resolve().parents[1]
FIXTURES = REPO / "frontend" / "fixtures"

# (config stem, commands to run)
RUNS = [
    ("fop_baseline", ["simulate", "certify", "spectrum", "nyquist"]),
    ("fop_oscillatory_theta2_4", ["simulate", "certify", "spectrum", "nyquist"]),
    ("fop_oscillatory_k4", ["simulate", "certify"]),
    ("hill_low_slope_theta2_4", ["simulate", "certify"]),
    ("hill_low_slope_k4", ["simulate", "certify"]),
    ("hill_high_slope_theta2_4", ["simulate", "certify"]),
    ("hill_high_slope_k4", ["simulate", "certify"]),
    ("robust_eta_theta2_4", ["simulate", "robust-certify"]),
    ("robust_eta_k4", ["simulate", "robust-certify"]),
    ("all_sequestration", ["simulate", "certify"]),
]


KEEP_LOCI = 6  # representative subset of the locus family, evenly spaced


def prune_loci(out: Path) -> None:
    loci = sorted(out.glob("nyquist_*.csv"))
    if len(loci) <= KEEP_LOCI:
        return
    step = (len(loci) - 1) // (KEEP_LOCI - 1)
    keep = {loci[min(i * step, len(loci) - 1)] for i in range(KEEP_LOCI)}
    for path in loci:
        if path not in keep:
            path.unlink()


def run() -> None:
    for stem, commands in RUNS:
        out = FIXTURES / stem
        if out.exists():
            shutil.rmtree(out)
        config = REPO / "configs" / f"{stem}.yaml"
        for command in commands:
            rc = main([command, "--config", str(config), "--out", str(out)])
            if rc != 0:
                sys.exit(f"{command} on {config} failed with exit code {rc}")
        prune_loci(out)
        print(f"built {out}")


if __name__ == "__main__":
    run()
