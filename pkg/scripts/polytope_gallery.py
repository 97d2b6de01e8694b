#!/usr/bin/env python3
"""Sample every built-in MDP's value set and emit figure-ready CSV + SVG.

Usage: python scripts/polytope_gallery.py [--outdir OUT] [--n N] [--seed S]
"""
import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from vfpolytope.cli import main as vfp
from vfpolytope.mdp import FIXTURE_NAMES


def run() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--outdir", default="out/polytopes")
    parser.add_argument("--n", type=int, default=50_000)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    for name in FIXTURE_NAMES:
        csv = outdir / f"{name}.csv"
        svg = outdir / f"{name}.svg"
        code = vfp(
            [
                "sample", "--mdp", name, "--n", str(args.n),
                "--seed", str(args.seed), "--out", str(csv), "--svg", str(svg),
            ]
        )
        if code != 0:
            return code
        print(f"wrote {csv} and {svg}")
    return 0


if __name__ == "__main__":
    sys.exit(run())
