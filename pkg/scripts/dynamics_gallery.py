#!/usr/bin/env python3
"""Run every learning algorithm on the two-state dynamics MDP from all three
standard starting points and emit trajectory CSVs with polytope-overlay SVGs.

Usage: python scripts/dynamics_gallery.py [--outdir OUT] [--seed S]
"""
import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from vfpolytope.cli import main as vfp

RUNS = {
    "vi": ["--iters", "50"],
    "pi": [],
    "pg": ["--iters", "2000", "--eta", "0.05"],
    "entpg": ["--iters", "1000", "--eta", "0.05", "--entropy-coeff", "0.1"],
    "npg": ["--iters", "300", "--eta", "0.05"],
    "cem": ["--iters", "100"],
    "cemcn": ["--iters", "100"],
}


def run() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--outdir", default="out/dynamics")
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    for algo, extra in RUNS.items():
        for init in ("vertex", "boundary", "interior"):
            stem = outdir / f"{algo}_{init}"
            code = vfp(
                [
                    "dynamics", "--mdp", "dyn2", "--algo", algo, "--init", init,
                    "--seed", str(args.seed),
                    "--out", f"{stem}.csv", "--svg", f"{stem}.svg", *extra,
                ]
            )
            if code != 0:
                return code
            print(f"wrote {stem}.csv and {stem}.svg")
    return 0


if __name__ == "__main__":
    sys.exit(run())
