"""Full pipeline on the two-atom example in the plane; prints each golden
check and exits nonzero on any mismatch."""

import argparse
import json
import sys

from motpave.cli import run_example_2_2


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--mc-samples", type=int, default=100_000)
    ap.add_argument("--json", action="store_true")
    args = ap.parse_args(argv)
    report, ok = run_example_2_2(args.seed, args.mc_samples)
    if args.json:
        print(json.dumps(report, indent=2, sort_keys=True))
    else:
        for name, v in report["checks"].items():
            print(f"{'ok  ' if v else 'FAIL'} {name}")
        for name, v in report["support_functional"].items():
            print(f"G-functional {name:5s} {v['G']:.5f}  (mean dimension {v['dimension']['exact']})")
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
