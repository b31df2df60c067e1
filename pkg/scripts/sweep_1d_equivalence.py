"""Compare the LP paving with the potential-function interval decomposition
on seeded 1-d martingale pairs and print a per-instance mismatch count."""

import argparse
import random
import sys

from motpave import oned, paving
from motpave.geometry import Polytope
from motpave.instances import random_1d_martingale_pair
from motpave.sweeps import SEED_1D_ORDER


def mismatches(inst):
    cm = paving.irreducible_paving(inst.mu, inst.nu)
    jm = paving.j_maps(cm)
    dec = oned.bj_decomposition(inst.mu, inst.nu)
    bad = 0
    for i, (x,) in enumerate(inst.mu.points):
        iv = dec.interval_of(x)
        want = Polytope.hull([(x,)]) if iv is None else Polytope.hull([(iv.left,), (iv.right,)])
        bad += cm.component_of(i).closure != want
        if iv is not None:
            got = {y for (y,) in inst.nu.points if jm.of_atom(i).in_lower((y,))}
            exp = {y for (y,) in inst.nu.points if iv.contains(y) or y in iv.J_endpoints}
            bad += got != exp
    return bad


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("-n", type=int, default=200)
    ap.add_argument("--seed", type=int, default=SEED_1D_ORDER)
    args = ap.parse_args(argv)
    rng = random.Random(args.seed)
    total = 0
    for k in range(args.n):
        inst = random_1d_martingale_pair(rng)
        m = mismatches(inst)
        total += m
        if m:
            print(f"instance {k}: {m} mismatches")
    print(f"{args.n} instances, {total} mismatches")
    return 1 if total else 0


if __name__ == "__main__":
    sys.exit(main())
