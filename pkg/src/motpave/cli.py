"""``motpave`` command line front-end.

Exit codes: 0 success, 2 domain error (bad instance, not in convex order),
1 internal consistency failure or golden mismatch.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import sys
import time
from fractions import Fraction
from pathlib import Path

from . import coupling as cp
from . import duality, geometry, measures, oned, paving
from .errors import InstanceError, InvariantError, MOTError
from .instances import EXAMPLE_2_2_P1, EXAMPLE_2_2_P2, Instance, example_2_2, table
from .measures import DiscreteMeasure, to_fraction

_INSTANCE_KEYS = {"dim", "mu", "nu", "cost", "seed"}


# -- parsing --------------------------------------------------------------

def _measure_from_json(atoms, dim, label):
    if not isinstance(atoms, list) or not atoms:
        raise InstanceError(f"{label}: expected a non-empty list of atoms")
    out = []
    for a in atoms:
        if not isinstance(a, dict) or set(a) != {"point", "mass"}:
            raise InstanceError(f"{label}: each atom needs exactly 'point' and 'mass'")
        if not isinstance(a["point"], list) or len(a["point"]) != dim:
            raise InstanceError(f"{label}: point {a['point']!r} does not have dimension {dim}")
        out.append((a["point"], a["mass"]))
    return DiscreteMeasure.from_atoms(out)


def _load_json(path):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InstanceError(f"cannot read {path}: {exc}") from exc
    try:
        return json.loads(text, parse_float=Fraction)
    except json.JSONDecodeError as exc:
        raise InstanceError(f"{path}: invalid JSON ({exc})") from exc


def parse_instance(data: dict) -> Instance:
    if not isinstance(data, dict):
        raise InstanceError("instance must be a JSON object")
    extra = set(data) - _INSTANCE_KEYS
    if extra:
        raise InstanceError(f"unknown instance keys: {sorted(extra)}")
    for k in ("dim", "mu", "nu"):
        if k not in data:
            raise InstanceError(f"missing key {k!r}")
    dim = data["dim"]
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 1:
        raise InstanceError("dim must be a positive integer")
    mu = _measure_from_json(data["mu"], dim, "mu")
    nu = _measure_from_json(data["nu"], dim, "nu")
    cost = None
    if data.get("cost") is not None:
        cost = parse_cost(data["cost"])
        cost.check_shape(mu, nu)
    seed = data.get("seed")
    if seed is not None and (not isinstance(seed, int) or isinstance(seed, bool)):
        raise InstanceError("seed must be an integer")
    return Instance(mu, nu, cost, seed)


def parse_cost(rows) -> duality.CostFunction:
    if isinstance(rows, dict) and set(rows) == {"cost"}:
        rows = rows["cost"]
    if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
        raise InstanceError("cost must be a list of rows")
    return duality.CostFunction.from_rows(rows)


def load_instance(path) -> Instance:
    return parse_instance(_load_json(path))


# -- rendering ------------------------------------------------------------

def rat(q) -> dict:
    if q is duality.INF:
        return {"exact": "inf", "float": None}
    q = Fraction(q)
    return {"exact": str(q), "float": float(q)}


def pt(p) -> list[str]:
    return [str(c) for c in p]


def matrix(rows) -> list[list[str]]:
    return [[str(v) if v is not duality.INF else "inf" for v in row] for row in rows]


def instance_json(inst: Instance) -> dict:
    out = {
        "dim": inst.mu.dim,
        "mu": [{"point": pt(p), "mass": str(m)} for p, m in inst.mu.atoms()],
        "nu": [{"point": pt(p), "mass": str(m)} for p, m in inst.nu.atoms()],
    }
    if inst.cost is not None:
        out["cost"] = matrix(inst.cost.table)
    if inst.seed is not None:
        out["seed"] = inst.seed
    return out


def digest(inst: Instance) -> str:
    blob = json.dumps(instance_json(inst), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


def f_json(f: measures.PiecewiseAffineConvex) -> dict:
    return {"pieces": [{"slope": pt(a), "intercept": str(b)} for a, b in zip(f.slopes, f.intercepts)]}


def certificate_json(c: duality.DualCertificate | None):
    if c is None:
        return None
    return {"phi": [str(v) for v in c.phi], "psi": [str(v) for v in c.psi],
            "h": [pt(v) for v in c.h], "constraint_set": [list(p) for p in sorted(c.constraint_set)]}


def _text(obj, indent=0) -> list[str]:
    pad = "  " * indent
    lines = []
    if isinstance(obj, dict):
        if set(obj) == {"exact", "float"}:
            return [pad + (obj["exact"] if obj["float"] is None else f"{obj['exact']}  (~{obj['float']:.6g})")]
        for k, v in obj.items():
            if isinstance(v, (dict, list)) and v and not _flat(v):
                lines.append(f"{pad}{k}:")
                lines.extend(_text(v, indent + 1))
            else:
                lines.append(f"{pad}{k}: {_inline(v)}")
    elif isinstance(obj, list):
        for v in obj:
            if isinstance(v, (dict, list)) and not _flat(v):
                lines.append(f"{pad}-")
                lines.extend(_text(v, indent + 1))
            else:
                lines.append(f"{pad}- {_inline(v)}")
    else:
        lines.append(pad + _inline(obj))
    return lines


def _flat(v):
    if isinstance(v, dict):
        return set(v) == {"exact", "float"}
    return all(not isinstance(x, (dict, list)) or (isinstance(x, list) and all(not isinstance(y, (dict, list)) for y in x))
               for x in v)


def _inline(v):
    if isinstance(v, dict) and set(v) == {"exact", "float"}:
        return v["exact"]
    if isinstance(v, list):
        return "[" + ", ".join(_inline(x) for x in v) + "]"
    if v is None:
        return "-"
    return str(v).lower() if isinstance(v, bool) else str(v)


def render(report: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report, indent=2, sort_keys=True)
    return "\n".join(_text(report))


# -- commands -------------------------------------------------------------

def _need_seed(args, inst):
    seed = args.seed if args.seed is not None else inst.seed
    if seed is None:
        raise InstanceError("a seed is required (--seed or \"seed\" in the instance)")
    return seed


def coupling_json(c: cp.Coupling) -> dict:
    return {"p": matrix(c.p), "supports": [list(c.support(i)) for i in range(len(c.mu))]}


def cmd_check_order(inst, args) -> dict:
    res = measures.convex_order(inst.mu, inst.nu)
    out = {"holds": res.holds}
    if res.holds:
        out["coupling"] = coupling_json(res.coupling)
    else:
        f = res.witness
        out["witness"] = f_json(f)
        out["mu_f"] = rat(inst.mu.integrate(f))
        out["nu_f"] = rat(inst.nu.integrate(f))
    if inst.mu.dim == 1:
        pot = oned.potential_order(inst.mu, inst.nu)
        if pot != res.holds:
            raise InvariantError("LP and potential criteria disagree")
        out["potential_criterion"] = pot
    return out


def cmd_coupling(inst, args) -> dict:
    method = "per_pair" if args.jobs > 1 else "cover"
    phat = cp.maximal_support_coupling(inst.mu, inst.nu, method=method, jobs=args.jobs)
    out = {"maximal": coupling_json(phat),
           "support_dimension": rat(cp.support_dimension(phat))}
    if args.vertices is not None:
        seed = _need_seed(args, inst)
        vs = cp.sample_vertices(inst.mu, inst.nu, args.vertices, seed)
        out["maximal"]["support_functional"] = cp.support_functional(phat, seed)
        out["vertices"] = []
        for v in vs:
            d = coupling_json(v)
            d["support_dimension"] = rat(cp.support_dimension(v))
            d["support_functional"] = cp.support_functional(v, seed)
            out["vertices"].append(d)
    return out


def paving_json(inst, cm, jm, polar) -> dict:
    comps = []
    for comp, J in zip(cm.components, jm.per_component):
        comps.append({
            "closure": [pt(v) for v in comp.closure.vertices],
            "dim": comp.dim,
            "mu_atoms": list(comp.mu_atoms),
            "nu_atoms": list(comp.nu_atoms),
            "J_lower_atoms": list(J.lower_atoms),
            "J_upper_boundary": None if J.upper_boundary is None else [pt(v) for v in J.upper_boundary.vertices],
            "J_lower_equals_upper": J.lower_equals_upper(),
        })
    return {"components": comps, "atom_component": list(cm.atom_component),
            "polar": [[int(v) for v in row] for row in polar],
            "maximal": coupling_json(cm.phat)}


def _polar_matrix(inst, jm):
    rows = []
    for x in inst.mu.points:
        row = []
        for y in inst.nu.points:
            r = paving.classify_pair(x, y, inst.mu, inst.nu, jm)
            if r.polar == r.in_lower:
                raise InvariantError("polarity disagrees with J_lower membership")
            row.append(r.polar)
        rows.append(row)
    return rows


def cmd_paving(inst, args) -> dict:
    method = "per_pair" if args.jobs > 1 else "cover"
    phat = cp.maximal_support_coupling(inst.mu, inst.nu, method=method, jobs=args.jobs)
    cm = paving.irreducible_paving(inst.mu, inst.nu, phat)
    jm = paving.j_maps(cm)
    return paving_json(inst, cm, jm, _polar_matrix(inst, jm))


def cmd_dual(inst, args) -> dict:
    cost = parse_cost(_load_json(args.cost)) if args.cost else inst.cost
    if cost is None:
        raise InstanceError("no cost: pass --cost or include \"cost\" in the instance")
    cost.check_shape(inst.mu, inst.nu)
    phat = cp.maximal_support_coupling(inst.mu, inst.nu)
    primal = duality.primal_value(cost, inst.mu, inst.nu, phat)
    out = {"primal": {"value": rat(primal.value),
                      "coupling": None if primal.coupling is None else matrix(primal.coupling.p),
                      "offending_pair": None if primal.offending is None else list(primal.offending)}}
    modes = ["pointwise", "quasisure"] if args.mode == "both" else [args.mode]
    for mode in modes:
        if mode == "pointwise":
            dv = duality.dual_value_pointwise(cost, inst.mu, inst.nu)
        else:
            dv = duality.dual_value_quasisure(cost, inst.mu, inst.nu, phat)
        out[mode] = {"value": rat(dv.value), "certificate": certificate_json(dv.certificate),
                     "offending_pair": None if dv.offending is None else list(dv.offending)}
    return out


def potentials_grid(inst, points: int):
    Um, Un = oned.potential(inst.mu), oned.potential(inst.nu)
    ts = set(Um.atoms) | set(Un.atoms)
    lo, hi = min(ts) - 1, max(ts) + 1
    step = (hi - lo) / (points - 1)
    grid = [lo + k * step for k in range(points)]
    return [(t, Um(t), Un(t), Un(t) - Um(t)) for t in grid]


def cmd_potentials(inst, args) -> dict:
    if inst.mu.dim != 1:
        raise InstanceError("potentials need a 1-d instance")
    rows = potentials_grid(inst, args.points)
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["t", "U_mu", "U_nu", "gap"])
            for r in rows:
                w.writerow([format(float(v), ".12g") for v in r])
    dec = oned.bj_decomposition(inst.mu, inst.nu)
    return {
        "contact_points": [str(t) for t in oned.contact_points(inst.mu, inst.nu)],
        "intervals": [{"left": str(iv.left), "right": str(iv.right), "mu_atoms": list(iv.mu_atoms),
                       "J_endpoints": [str(e) for e in iv.J_endpoints]} for iv in dec.intervals],
        "singletons": list(dec.singletons),
        "grid_points": len(rows),
        "csv": args.csv,
    }


def run_example_2_2(seed: int = 0, mc_samples: int = geometry.DEFAULT_MC_SAMPLES) -> tuple[dict, bool]:
    inst = example_2_2()
    mu, nu = inst.mu, inst.nu
    P1, P2 = table(EXAMPLE_2_2_P1, 2, 4), table(EXAMPLE_2_2_P2, 2, 4)
    checks = {}
    checks["convex_order"] = measures.convex_order(mu, nu).holds
    vs = cp.sample_vertices(mu, nu, 50, seed)
    checks["vertices_are_P1_P2"] = sorted(v.p for v in vs) == sorted([P1, P2])
    phat = cp.maximal_support_coupling(mu, nu)
    half = Fraction(1, 2)
    checks["phat_is_midpoint"] = phat.p == tuple(tuple(half * (a + b) for a, b in zip(r1, r2))
                                                for r1, r2 in zip(P1, P2))
    cm = paving.irreducible_paving(mu, nu, phat)
    seg = geometry.Polytope.hull([(0, 1), (0, -1)])
    tri = geometry.Polytope.hull([(0, 1), (0, -1), (2, 0)])
    checks["two_components"] = len(cm.components) == 2
    checks["I_x0"] = cm.component_of(0).closure == seg
    checks["I_x1"] = cm.component_of(1).closure == tri
    jm = paving.j_maps(cm)
    polar = _polar_matrix(inst, jm)
    checks["only_polar_pair_x0_y2"] = [(i, j) for i, r in enumerate(polar) for j, v in enumerate(r) if v] == [(0, 3)]
    sf = {"phat": cp.support_functional(phat, seed, mc_samples)}
    dims = {"phat": cp.support_dimension(phat)}
    for name, tab in (("P1", P1), ("P2", P2)):
        c = cp.Coupling(mu, nu, tab)
        sf[name] = cp.support_functional(c, seed, mc_samples)
        dims[name] = cp.support_dimension(c)
    checks["support_functional_phat_largest"] = sf["phat"] > sf["P1"] and sf["phat"] > sf["P2"]
    checks["support_functional_matches_dimensions"] = all(
        (sf["phat"] > sf[k]) == (dims["phat"] > dims[k]) for k in ("P1", "P2"))
    c_eq = duality.CostFunction.from_function(mu, nu, lambda x, y: int(x == y))
    c_ne = duality.CostFunction.from_function(mu, nu, lambda x, y: int(x != y))
    pv1, pv2 = duality.primal_value(c_eq, mu, nu, phat), duality.primal_value(c_ne, mu, nu, phat)
    checks["primal_c1"] = pv1.value == half and pv1.coupling.p == P1
    checks["primal_c2"] = pv2.value == Fraction(3, 4) and pv2.coupling.p == P2
    gap = duality.gap_witness_cost(mu, nu, (0, 3))
    qs = duality.dual_value_quasisure(gap, mu, nu, phat)
    pw = duality.dual_value_pointwise(gap, mu, nu)
    checks["duality_gap"] = qs.value == 0 and pw.value is duality.INF
    report = {
        "instance": instance_json(inst),
        "instance_digest": digest(inst),
        "vertices": [matrix(v.p) for v in sorted(vs, key=lambda v: v.p)],
        "paving": paving_json(inst, cm, jm, polar),
        "support_functional": {k: {"G": v, "dimension": rat(dims[k])} for k, v in sf.items()},
        "primal": {"c_eq": rat(pv1.value), "c_ne": rat(pv2.value)},
        "gap_witness": {"quasisure": rat(qs.value), "pointwise": rat(pw.value)},
        "seed": seed,
        "mc_samples": mc_samples,
        "checks": checks,
    }
    return report, all(checks.values())


COMMANDS = {
    "check-order": cmd_check_order,
    "coupling": cmd_coupling,
    "paving": cmd_paving,
    "dual": cmd_dual,
    "potentials": cmd_potentials,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--instance", help="instance JSON file")
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--jobs", type=int, default=1, help="worker processes for per-pair LPs")
    common.add_argument("--format", choices=["text", "json"], default="text")
    common.add_argument("--timing", action="store_true", help="append wall-clock time (text format only)")

    parser = argparse.ArgumentParser(prog="motpave", description="Irreducible convex paving for discrete martingale transport.")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("check-order", parents=[common], help="convex order test with coupling or violating convex function")
    p = sub.add_parser("coupling", parents=[common], help="maximal-support coupling, optionally sampled vertices")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--maximal", action="store_true", default=True)
    g.add_argument("--vertices", type=int, metavar="K", default=None)
    sub.add_parser("paving", parents=[common], help="components, J maps and the polar-pair matrix")
    p = sub.add_parser("dual", parents=[common], help="primal value and superhedging duals")
    p.add_argument("--cost", help="cost JSON file ([[str|\"inf\"]] or {\"cost\": ...})")
    p.add_argument("--mode", choices=["pointwise", "quasisure", "both"], default="both")
    p = sub.add_parser("potentials", parents=[common], help="1-d potential functions and interval decomposition")
    p.add_argument("--csv", help="write t,U_mu,U_nu,gap to this path")
    p.add_argument("--points", type=int, default=201)
    sub.add_parser("example-2-2", parents=[common], help="run the full pipeline on the two-point example in R^2")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    t0 = time.perf_counter()
    try:
        if args.command == "example-2-2":
            results, ok = run_example_2_2(seed=0 if args.seed is None else args.seed)
            report = {"command": "example-2-2", "results": results}
        else:
            if not args.instance:
                raise InstanceError("--instance is required")
            inst = load_instance(args.instance)
            results = COMMANDS[args.command](inst, args)
            ok = True
            report = {"command": args.command, "instance_digest": digest(inst), "results": results}
            if args.seed is not None:
                report["seed"] = args.seed
    except MOTError as exc:
        print(f"motpave: error: {exc}", file=sys.stderr)
        return 2
    except InvariantError as exc:
        print(f"motpave: internal check failed: {exc}", file=sys.stderr)
        return 1
    print(render(report, args.format))
    if args.timing and args.format == "text":
        print(f"time: {time.perf_counter() - t0:.3f}s")
    if not ok:
        print("motpave: golden value mismatch", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
