"""Run every shipped config through the command line interface into one results directory."""

import argparse
import sys
from pathlib import Path

from catsuppress import cli

CONFIGS = Path(__file__).resolve().parents[1] / "configs"
SCENARIO = {"headline": "optimize_recovery"}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="results")
    ap.add_argument("--threads", type=int, default=0)
    ap.add_argument("--only", nargs="*", help="config stems to run (default: all)")
    args = ap.parse_args()

    worst = 0
    for cfg in sorted(CONFIGS.glob("*.toml")):
        if args.only and cfg.stem not in args.only:
            continue
        scenario = SCENARIO.get(cfg.stem, cfg.stem)
        out = str(Path(args.out) / cfg.stem)
        code = cli.run([scenario, "--config", str(cfg), "--out", out, "--threads", str(args.threads)])
        print(f"{cfg.stem}: exit {code}")
        worst = max(worst, code)
    sys.exit(worst)


if __name__ == "__main__":
    main()
