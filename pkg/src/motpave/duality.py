"""Primal martingale transport value, pointwise and quasi-sure superhedging
duals, and tangent convex functions.

The quasi-sure dual only enforces superhedging on pairs that some martingale
coupling charges; the pointwise dual enforces it everywhere. With a cost
that is infinite on a polar pair the two differ: the first stays equal to the
primal value, the second is infinite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from . import lp
from .coupling import Coupling, maximal_support_coupling
from .errors import InstanceError, InvariantError, NotInConvexOrder
from .measures import DiscreteMeasure, PiecewiseAffineConvex, to_fraction

INF = math.inf
_ZERO = Fraction(0)


def _parse_entry(v):
    if v is INF or (isinstance(v, float) and v == INF):
        return INF
    if isinstance(v, str) and v.strip().lower() in ("inf", "+inf", "infinity"):
        return INF
    return to_fraction(v)


@dataclass(frozen=True)
class CostFunction:
    """c(x_i, y_j) as a table of nonnegative rationals or :data:`INF`."""

    table: tuple[tuple[object, ...], ...]

    def __post_init__(self):
        for row in self.table:
            for v in row:
                if v is not INF and (not isinstance(v, Fraction) or v < 0):
                    raise InstanceError(f"cost entries must be nonnegative rationals or inf, got {v!r}")

    @classmethod
    def from_rows(cls, rows: Iterable[Iterable]) -> "CostFunction":
        return cls(tuple(tuple(_parse_entry(v) for v in row) for row in rows))

    @classmethod
    def from_function(cls, mu, nu, c) -> "CostFunction":
        return cls.from_rows([[c(x, y) for y in nu.points] for x in mu.points])

    def shape(self) -> tuple[int, int]:
        return len(self.table), len(self.table[0]) if self.table else 0

    def check_shape(self, mu, nu):
        if len(self.table) != len(mu) or any(len(r) != len(nu) for r in self.table):
            raise InstanceError("cost table shape does not match the marginals")

    def infinite_pairs(self) -> list[tuple[int, int]]:
        return [(i, j) for i, row in enumerate(self.table) for j, v in enumerate(row) if v is INF]


@dataclass(frozen=True)
class DualCertificate:
    """phi on supp mu, psi on supp nu, h: supp mu -> R^d, with
    phi(x) + psi(y) + h(x).(y - x) >= c(x, y) on ``constraint_set``."""

    phi: tuple[Fraction, ...]
    psi: tuple[Fraction, ...]
    h: tuple[tuple[Fraction, ...], ...]
    constraint_set: frozenset[tuple[int, int]]

    def value(self, mu, nu) -> Fraction:
        return (sum((m * f for m, f in zip(mu.masses, self.phi)), _ZERO)
                + sum((m * g for m, g in zip(nu.masses, self.psi)), _ZERO))

    def hedge(self, mu, nu, i, j) -> Fraction:
        x, y = mu.points[i], nu.points[j]
        return (self.phi[i] + self.psi[j]
                + sum((hk * (yk - xk) for hk, yk, xk in zip(self.h[i], y, x)), _ZERO))

    def violations(self, cost: CostFunction, mu, nu) -> list[tuple[int, int]]:
        return [(i, j) for i, j in sorted(self.constraint_set)
                if cost.table[i][j] is INF or self.hedge(mu, nu, i, j) < cost.table[i][j]]

    def shifted_nonnegative(self) -> "DualCertificate":
        """Move a constant from psi to phi so that min phi = 0. Raises
        ValueError when psi then still has a negative entry."""
        s = min(self.phi)
        phi = tuple(v - s for v in self.phi)
        psi = tuple(v + s for v in self.psi)
        if min(psi) < 0:
            raise ValueError("no constant shift makes both potentials nonnegative")
        return DualCertificate(phi, psi, self.h, self.constraint_set)


@dataclass(frozen=True)
class DualValue:
    value: object  # Fraction or INF
    certificate: DualCertificate | None = None
    offending: tuple[int, int] | None = None


@dataclass(frozen=True)
class PrimalValue:
    value: object  # Fraction or INF
    coupling: Coupling | None = None
    offending: tuple[int, int] | None = None


def _nonpolar(mu, nu, phat):
    if phat is None:
        phat = maximal_support_coupling(mu, nu)
    return phat.support_pairs()


def primal_value(cost: CostFunction, mu: DiscreteMeasure, nu: DiscreteMeasure,
                 phat: Coupling | None = None) -> PrimalValue:
    """sup over M(mu, nu) of P[c]. Infinite cost on a polar pair is ignored
    (that column is fixed at zero); on a charged pair the value is INF."""
    cost.check_shape(mu, nu)
    support = _nonpolar(mu, nu, phat)
    for ij in cost.infinite_pairs():
        if ij in support:
            return PrimalValue(INF, offending=ij)
    pairs = [(i, j) for i in range(len(mu)) for j in range(len(nu))
             if cost.table[i][j] is not INF]
    prob = lp.build_mot_lp(mu, nu, pairs, objective=lambda q: cost.table[q[0]][q[1]])
    out = lp.solve(prob)
    if not out.optimal:
        raise NotInConvexOrder()
    return PrimalValue(out.value, Coupling.from_vector(mu, nu, prob.names, out.x))


def _dual_lp(cost, mu, nu, pairs):
    """min mu[phi] + nu[psi] s.t. phi_i + psi_j + h_i.(y_j - x_i) - s_ij = c_ij.

    Variable layout: phi (n), psi (m), h (n*d), all free; then slacks."""
    n, m, d = len(mu), len(nu), mu.dim
    nfree = n + m + n * d
    nv = nfree + len(pairs)
    A, b = [], []
    for r, (i, j) in enumerate(pairs):
        row = [_ZERO] * nv
        row[i] = Fraction(1)
        row[n + j] = Fraction(1)
        for k in range(d):
            row[n + m + i * d + k] = nu.points[j][k] - mu.points[i][k]
        row[nfree + r] = Fraction(-1)
        A.append(tuple(row))
        b.append(cost.table[i][j])
    c = tuple(mu.masses) + tuple(nu.masses) + (_ZERO,) * (n * d + len(pairs))
    return lp.LinearProgram(tuple(A), tuple(b), c, "min", frozenset(range(nfree)))


def _solve_dual(cost, mu, nu, pairs) -> DualValue:
    n, m, d = len(mu), len(nu), mu.dim
    pairs = sorted(pairs)
    if not pairs:
        raise InstanceError("empty constraint set")
    out = lp.solve(_dual_lp(cost, mu, nu, pairs))
    if out.status == lp.UNBOUNDED:
        raise InvariantError("superhedging dual unbounded below on a feasible instance")
    if not out.optimal:
        raise InvariantError("superhedging dual infeasible with finite costs")
    x = out.x
    cert = DualCertificate(x[:n], x[n:n + m],
                           tuple(tuple(x[n + m + i * d: n + m + (i + 1) * d]) for i in range(n)),
                           frozenset(pairs))
    if cert.violations(cost, mu, nu):
        raise InvariantError("dual certificate violates its constraints")
    return DualValue(out.value, cert)


def dual_value_pointwise(cost: CostFunction, mu: DiscreteMeasure, nu: DiscreteMeasure) -> DualValue:
    """Superhedging on every pair of supp mu x supp nu; INF as soon as one
    cost entry is infinite."""
    cost.check_shape(mu, nu)
    inf = cost.infinite_pairs()
    if inf:
        return DualValue(INF, offending=inf[0])
    pairs = [(i, j) for i in range(len(mu)) for j in range(len(nu))]
    return _solve_dual(cost, mu, nu, pairs)


def dual_value_quasisure(cost: CostFunction, mu: DiscreteMeasure, nu: DiscreteMeasure,
                         phat: Coupling | None = None) -> DualValue:
    """Superhedging only on nonpolar pairs."""
    cost.check_shape(mu, nu)
    support = _nonpolar(mu, nu, phat)
    for ij in cost.infinite_pairs():
        if ij in support:
            return DualValue(INF, offending=ij)
    return _solve_dual(cost, mu, nu, support)


def gap_witness_cost(mu, nu, polar_pair: tuple[int, int], base: CostFunction | None = None) -> CostFunction:
    """``base`` (default zero) with the entry at ``polar_pair`` set to INF."""
    rows = [list(r) for r in base.table] if base is not None else \
        [[_ZERO] * len(nu) for _ in range(len(mu))]
    i, j = polar_pair
    rows[i][j] = INF
    return CostFunction(tuple(tuple(r) for r in rows))


@dataclass(frozen=True)
class TangentConvexFn:
    """T_p f(x, y) = f(y) - f(x) - p(x).(y - x) tabulated on supp mu x supp nu."""

    table: tuple[tuple[Fraction, ...], ...]
    f: PiecewiseAffineConvex
    p: tuple[tuple[Fraction, ...], ...]  # subgradient chosen at each atom of mu


def tangent_transform(f: PiecewiseAffineConvex, mu: DiscreteMeasure, nu: DiscreteMeasure) -> TangentConvexFn:
    p = tuple(f.subgradient(x) for x in mu.points)
    fy = [f(y) for y in nu.points]
    rows = []
    for i, x in enumerate(mu.points):
        fx = f(x)
        rows.append(tuple(fy[j] - fx - sum((pk * (yk - xk) for pk, yk, xk in zip(p[i], y, x)), _ZERO)
                          for j, y in enumerate(nu.points)))
    return TangentConvexFn(tuple(rows), f, p)


def nu_ominus_mu(f: PiecewiseAffineConvex, mu: DiscreteMeasure, nu: DiscreteMeasure) -> Fraction:
    """nu[f] - mu[f]; equals Q[T_p f] for every martingale coupling Q."""
    return nu.integrate(f) - mu.integrate(f)
