"""CLI: plots <kind> --in <path...> --out <file>."""

from __future__ import annotations

import argparse
import sys

from .figures import FIGURE_KINDS, FigureSpec, SchemaError, render


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise SchemaError(message)


def main(argv=None) -> int:
    parser = _Parser(prog="plots", description=__doc__)
    parser.add_argument("kind", choices=FIGURE_KINDS)
    parser.add_argument("--in", dest="inputs", nargs="+", required=True,
                        help="input CSV/JSON files")
    parser.add_argument("--out", required=True, help="output image file")
    parser.add_argument("--title", default="", help="figure title")
    try:
        args = parser.parse_args(argv)
        spec = FigureSpec(kind=args.kind, inputs=tuple(args.inputs),
                          output=args.out, title=args.title)
        annotation = render(spec)
        if annotation:
            print(annotation)
        return 0
    except (SchemaError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
