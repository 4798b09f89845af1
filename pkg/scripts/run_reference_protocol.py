"""Reference experiment: every registry problem, all five beta rules, 100 random starts.

Writes runs.csv, summary.csv, per-run JSON and both performance profiles under
the chosen output directory.

    python scripts/run_reference_protocol.py --out-dir out --parallelism 8
"""

import argparse
import sys

from icg import cli


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out-dir", default="out")
    ap.add_argument("--tag", default="reference")
    ap.add_argument("--parallelism", type=int, default=8)
    ap.add_argument("--seeds", default="0..99")
    args = ap.parse_args(argv)

    code = cli.main(["bench", "--problems", "all", "--variants", "sd,fr,cd,dy,mdy",
                     "--seeds", args.seeds, "--parallelism", str(args.parallelism),
                     "--out-dir", args.out_dir, "--tag", args.tag])
    if code:
        return code
    return cli.main(["profile", "--runs", f"{args.out_dir}/{args.tag}/runs.csv"])


if __name__ == "__main__":
    sys.exit(main())
