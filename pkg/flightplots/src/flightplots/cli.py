"""flightplot <kind> --in <csv> --out <img>"""

import argparse
import sys

from flightplots.render import KINDS, EmptyLogError, PlotSpec, SchemaError, render


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="flightplot", description="Render figures from flight-log CSVs"
    )
    parser.add_argument("kind", choices=KINDS)
    parser.add_argument("--in", dest="input_path", required=True, help="input CSV")
    parser.add_argument("--out", dest="output_path", required=True, help="output image")
    args = parser.parse_args(argv)
    try:
        info = render(PlotSpec(args.kind, args.input_path, args.output_path))
    except SchemaError as e:
        print(f"schema mismatch: {e}", file=sys.stderr)
        return 1
    except (EmptyLogError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    print(f"wrote {info.path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
