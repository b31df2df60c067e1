"""Primal value against pointwise and quasi-sure superhedging on seeded 2-d
instances, with and without an infinite cost on a polar pair."""

import argparse
import random
import sys
from fractions import Fraction

from motpave import coupling as cp
from motpave import duality as du
from motpave.sweeps import suite_2d


def fmt(v):
    return "inf" if v is du.INF else str(v)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("-n", type=int, default=10)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    rng = random.Random(args.seed)
    print(f"{'k':>3} {'primal':>10} {'quasisure':>10} {'pointwise':>10} | {'gap primal':>10} {'gap qs':>8} {'gap pw':>7}")
    for k, inst in enumerate(suite_2d(args.n)):
        mu, nu = inst.mu, inst.nu
        c = du.CostFunction.from_rows([[Fraction(rng.randint(0, 9), rng.randint(1, 4)) for _ in nu.points]
                                       for _ in mu.points])
        phat = cp.maximal_support_coupling(mu, nu)
        row = [du.primal_value(c, mu, nu, phat).value, du.dual_value_quasisure(c, mu, nu, phat).value,
               du.dual_value_pointwise(c, mu, nu).value]
        polar = [(i, j) for i in range(len(mu)) for j in range(len(nu)) if (i, j) not in phat.support_pairs()]
        gap = ["-"] * 3
        if polar:
            g = du.gap_witness_cost(mu, nu, polar[0], base=c)
            gap = [du.primal_value(g, mu, nu, phat).value, du.dual_value_quasisure(g, mu, nu, phat).value,
                   du.dual_value_pointwise(g, mu, nu).value]
        print(f"{k:3d} {fmt(row[0]):>10} {fmt(row[1]):>10} {fmt(row[2]):>10} | "
              f"{fmt(gap[0]):>10} {fmt(gap[1]):>8} {fmt(gap[2]):>7}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
