"""Run the acceptance battery and write one JSON report per criterion.

    python scripts/run_acceptance.py [--quick] [--seed 0] [--only 1,3] [--out runs/acceptance]
"""

import argparse
import json
import sys
from pathlib import Path

from shiftrate import acceptance as acc


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--quick", action="store_true", help="reduced sample sizes")
    ap.add_argument("--only", default=None, help="comma-separated criterion numbers")
    ap.add_argument("--out", default="runs/acceptance")
    args = ap.parse_args()
    only = [int(v) for v in args.only.split(",")] if args.only else None
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    results = acc.run_all(args.seed, quick=args.quick, only=only, echo=print)
    for r in results:
        (out / f"criterion_{r.number}.json").write_text(json.dumps(r.to_json(), indent=2, default=str) + "\n")
    passed = sum(r.passed for r in results)
    print(f"{passed}/{len(results)} criteria passed; reports in {out}")
    return 0 if passed == len(results) else 1


if __name__ == "__main__":
    sys.exit(main())
