#!/usr/bin/env python3
"""Emit the two-panel curve data for the standard parameter pair.

Writes <out>_curves.csv with (t, W1, W2) on a uniform grid and
<out>_parametric.csv with the planar curve (W1, W2).  Equivalent to
`weierpath eval --figure1`, kept as a script so the experiment is easy to
tweak (grid density, truncation level, alternative parameters).
"""

import argparse

from weierpath.cli import main as cli_main


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--N", type=int, default=25, help="truncation level")
    ap.add_argument("--points", type=int, default=4097)
    ap.add_argument("--out", default="figure1")
    args = ap.parse_args()
    return cli_main([
        "eval", "--figure1", "--N", str(args.N),
        "--points", str(args.points), "--out", args.out,
    ])


if __name__ == "__main__":
    raise SystemExit(main())
