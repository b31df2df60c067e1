"""Run every seeded suite through the full pipeline and print a summary, or
the canonical JSON report with --json."""

import argparse
import sys
import time
from collections import Counter

from motpave import sweeps


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--json", action="store_true", help="print the deterministic suite report")
    args = ap.parse_args(argv)
    t0 = time.perf_counter()
    analyses = sweeps.run_all()
    if args.json:
        sys.stdout.write(sweeps.suite_report(analyses))
        return 0
    for name, ans in analyses.items():
        ordered = [a for a in ans if a.order.holds]
        dims = Counter(c.dim for a in ordered for c in a.cm.components)
        print(f"{name:12s} instances={len(ans):4d} in_order={len(ordered):4d} "
              f"component_dims={dict(sorted(dims.items()))}")
    print(f"time: {time.perf_counter() - t0:.1f}s")
    return 0


if __name__ == "__main__":
    sys.exit(main())
