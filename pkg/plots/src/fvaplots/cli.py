"""Batch figure rendering: ``plot <kind> <input.csv> <output.{svg,png}>``."""

from __future__ import annotations

import argparse
import sys

from .figures import FIGURE_KINDS, RENDERERS
from .io import SchemaError


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="plot",
                                     description="render fvawwr CSV outputs as figures")
    parser.add_argument("kind", choices=FIGURE_KINDS)
    parser.add_argument("input", help="CSV produced by the fvawwr CLI")
    parser.add_argument("output", help="target image path (.svg or .png; both written)")
    args = parser.parse_args(argv)
    try:
        RENDERERS[args.kind](args.input, args.output)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except SchemaError as exc:
        print(f"error: SchemaError: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
