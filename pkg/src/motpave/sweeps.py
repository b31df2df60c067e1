"""Seeded instance suites and the per-instance analysis the acceptance
checks and experiment scripts run over them."""

from __future__ import annotations

import json
import random
from dataclasses import dataclass

from . import coupling as cp
from . import measures, oned, paving
from .instances import (Instance, example_2_2, random_1d_martingale_pair, random_1d_pair,
                        random_2d_martingale_pair)

SEED_1D_ORDER = 2024
SEED_1D_MIXED = 3031
SEED_2D = 4042
VERTEX_SAMPLES = 12


def suite_1d_order(n: int = 200, seed: int = SEED_1D_ORDER) -> list[Instance]:
    rng = random.Random(seed)
    return [random_1d_martingale_pair(rng) for _ in range(n)]


def suite_1d_mixed(n: int = 200, seed: int = SEED_1D_MIXED) -> list[Instance]:
    rng = random.Random(seed)
    return [random_1d_pair(rng) for _ in range(n)]


def suite_2d(n: int = 50, seed: int = SEED_2D) -> list[Instance]:
    rng = random.Random(seed)
    return [random_2d_martingale_pair(rng) for _ in range(n)]


@dataclass
class Analysis:
    instance: Instance
    order: measures.OrderResult
    phat: cp.Coupling | None = None
    cm: paving.ComponentMap | None = None
    jm: paving.JMaps | None = None
    vertices: list | None = None
    bj: oned.IntervalDecomposition | None = None


def analyse(inst: Instance, seed: int, k: int = VERTEX_SAMPLES) -> Analysis:
    order = measures.convex_order(inst.mu, inst.nu)
    an = Analysis(inst, order)
    if not order.holds:
        return an
    an.phat = cp.maximal_support_coupling(inst.mu, inst.nu)
    an.cm = paving.irreducible_paving(inst.mu, inst.nu, an.phat)
    an.jm = paving.j_maps(an.cm)
    an.vertices = cp.sample_vertices(inst.mu, inst.nu, k, seed)
    if inst.mu.dim == 1:
        an.bj = oned.bj_decomposition(inst.mu, inst.nu)
    return an


def _m(rows):
    return [[str(v) for v in r] for r in rows]


def report(an: Analysis) -> dict:
    inst = an.instance
    out = {
        "mu": [[[str(c) for c in p], str(w)] for p, w in inst.mu.atoms()],
        "nu": [[[str(c) for c in p], str(w)] for p, w in inst.nu.atoms()],
        "convex_order": an.order.holds,
    }
    if not an.order.holds:
        f = an.order.witness
        out["witness"] = [[[str(c) for c in a], str(b)] for a, b in zip(f.slopes, f.intercepts)]
        return out
    out["phat"] = _m(an.phat.p)
    out["components"] = [
        {"closure": [[str(c) for c in v] for v in comp.closure.vertices],
         "mu_atoms": list(comp.mu_atoms), "J_lower_atoms": list(J.lower_atoms)}
        for comp, J in zip(an.cm.components, an.jm.per_component)]
    out["vertices"] = [_m(v.p) for v in an.vertices]
    if an.bj is not None:
        out["bj"] = [[str(iv.left), str(iv.right), [str(e) for e in iv.J_endpoints]]
                     for iv in an.bj.intervals]
    return out


def all_suites() -> dict[str, list[Instance]]:
    return {"example_2_2": [example_2_2()], "1d_order": suite_1d_order(),
            "1d_mixed": suite_1d_mixed(), "2d": suite_2d()}


def suite_report(analyses: dict[str, list[Analysis]]) -> str:
    return json.dumps({name: [report(a) for a in ans] for name, ans in analyses.items()},
                      sort_keys=True, separators=(",", ":"))


def run_all() -> dict[str, list[Analysis]]:
    return {name: [analyse(inst, seed=k) for k, inst in enumerate(insts)]
            for name, insts in all_suites().items()}
