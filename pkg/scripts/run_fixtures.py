"""Build every problem file in a directory and print its row table, sizes and quotient."""

import argparse
import time
from pathlib import Path

from sparseres.cli import build_from_problem, format_table, parse_problem, row_table
from sparseres.core import NotEssential
from sparseres.symbolic import CapExceeded, extract_resultant, render


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("directory", nargs="?", default="problems")
    parser.add_argument("--cap", type=int, default=32)
    args = parser.parse_args()
    for path in sorted(Path(args.directory).glob("*.json")):
        prob = parse_problem(path.read_text(encoding="utf-8"))
        print(f"== {path.stem}")
        start = time.perf_counter()
        try:
            m = build_from_problem(prob)
        except NotEssential as err:
            print(f"   {err}\n")
            continue
        print(format_table(row_table(m), ("row", "coefficients of", "cell", "type")))
        print(f"   size {len(m.points)}, extraneous {len(m.non_mixed)}, mixed counts {m.mixed_counts()}")
        try:
            res = extract_resultant(m, args.cap)
            text = render(res, m.system.symbol_name)
            print(f"   Res: {len(res.terms)} terms" + (f" = {text}" if len(text) < 200 else ""))
        except CapExceeded:
            print("   Res: above the symbolic cap")
        print(f"   {time.perf_counter() - start:.2f}s\n")


if __name__ == "__main__":
    main()
