"""``make-figures``: render one of the three standard figures from CSVs.

    make-figures --fig 1 --in spectrum_L12.csv --out spectrum.png --highlight 0
    make-figures --fig 2 --in sweep_a.csv sweep_b.csv --out scaling.svg
    make-figures --fig 3 --in correlations_L12.csv --out profiles.png

Figure 1 scatters coherence length against energy, figure 2 plots the size
sweep with a least-squares line per branch, figure 3 draws correlation
profiles.  Exit codes match the producing tool: 0 on success, 1 on runtime
failure, 2 on bad flags or a table that does not match its schema.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_USAGE = 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="make-figures",
        description="render a standard figure from campaign CSV tables")
    parser.add_argument("--fig", type=int, required=True, choices=(1, 2, 3),
                        help="1 spectrum profile, 2 size scaling, "
                             "3 correlation profiles")
    parser.add_argument("--in", dest="inputs", nargs="+", required=True,
                        metavar="CSV", help="input table(s); only --fig 2 "
                        "accepts more than one")
    parser.add_argument("--out", required=True,
                        help="output image, .png or .svg")
    parser.add_argument("--highlight", type=int, action="append", default=[],
                        metavar="STATE",
                        help="state index to mark (repeatable; figs 1 and 3)")
    parser.add_argument("--ref-site", type=int, default=1,
                        help="reference site named in the fig 3 axis label")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        from .plots import FigureSpec, render

        spec = FigureSpec(inputs=tuple(Path(p) for p in args.inputs),
                          figure=args.fig,
                          out=Path(args.out),
                          highlights=tuple(args.highlight),
                          ref_site=args.ref_site)
        written = render(spec)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    print(f"wrote {written}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
