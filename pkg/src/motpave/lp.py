"""Exact rational linear programming.

A dense two-phase tableau simplex with Bland's pivoting rule. Arithmetic is
carried out in ``gmpy2.mpq`` for speed; everything crossing the module
boundary is a :class:`fractions.Fraction`.

Problems are stated in equality form::

    max (or min)  c.x   subject to   A x = b,   x_j >= 0 unless j is free.

The martingale transport polytope M(mu, nu) is built by :func:`build_mot_lp`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from gmpy2 import mpq

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"


def _q(x) -> mpq:
    if isinstance(x, Fraction):
        return mpq(x.numerator, x.denominator)
    return mpq(x)


def _f(x: mpq) -> Fraction:
    return Fraction(int(x.numerator), int(x.denominator))


@dataclass(frozen=True)
class LinearProgram:
    """Equality-form LP with rational data.

    ``free`` lists indices of sign-unrestricted variables; all others are
    nonnegative. ``names`` is optional bookkeeping (e.g. ``(i, j)`` pairs).
    """

    A: tuple[tuple[Fraction, ...], ...]
    b: tuple[Fraction, ...]
    c: tuple[Fraction, ...]
    sense: str = "max"
    free: frozenset[int] = frozenset()
    names: tuple | None = None

    def __post_init__(self):
        n = len(self.c)
        if len(self.A) != len(self.b):
            raise ValueError("row count of A and b differ")
        for row in self.A:
            if len(row) != n:
                raise ValueError("inconsistent row length")
        if self.sense not in ("max", "min"):
            raise ValueError(f"unknown sense {self.sense!r}")
        if any(j < 0 or j >= n for j in self.free):
            raise ValueError("free index out of range")

    @property
    def n_vars(self) -> int:
        return len(self.c)

    @property
    def n_rows(self) -> int:
        return len(self.b)

    def with_objective(self, c: Sequence, sense: str = "max") -> "LinearProgram":
        return LinearProgram(self.A, self.b, tuple(Fraction(v) for v in c),
                             sense, self.free, self.names)

    def residuals(self, x: Sequence[Fraction]) -> list[Fraction]:
        return [sum((a * v for a, v in zip(row, x) if a), Fraction(0)) - bi
                for row, bi in zip(self.A, self.b)]


@dataclass(frozen=True)
class LPOutcome:
    """Result of :func:`solve`.

    ``duals`` holds row multipliers ``y``. At optimality ``b.y`` equals the
    optimal value and ``A^T y`` dominates ``c`` in the sense of the LP
    (``>=`` for max, ``<=`` for min, equality on free variables). When
    infeasible, ``duals`` is a Farkas certificate: ``A^T y <= 0`` on
    nonnegative variables, ``= 0`` on free ones, and ``b.y > 0``.
    """

    status: str
    value: Fraction | None = None
    x: tuple[Fraction, ...] | None = None
    duals: tuple[Fraction, ...] | None = None
    pivots: int = field(default=0, compare=False)

    @property
    def optimal(self) -> bool:
        return self.status == OPTIMAL


class _Tableau:
    # rows: B^{-1}[A | I | b]; columns 0..n-1 structural, n..n+m-1 artificial
    def __init__(self, A, b):
        m, n = len(A), len(A[0]) if A else 0
        self.m, self.n = m, n
        self.rows = []
        for i, (row, bi) in enumerate(zip(A, b)):
            art = [mpq(0)] * m
            art[i] = mpq(1)
            self.rows.append(list(row) + art + [bi])
        self.basis = [n + i for i in range(m)]
        self.obj = None
        self.pivots = 0

    def set_objective(self, cost):
        # obj[j] = c_j - c_B B^{-1} A_j ; obj[-1] = -c_B x_B
        width = self.n + self.m + 1
        obj = [mpq(0)] * width
        for j, cj in enumerate(cost):
            obj[j] = cj
        for i, bj in enumerate(self.basis):
            cb = cost[bj]
            if cb:
                row = self.rows[i]
                for k in range(width):
                    if row[k]:
                        obj[k] -= cb * row[k]
        self.obj = obj

    def pivot(self, r, e):
        prow = self.rows[r]
        pv = prow[e]
        if pv != 1:
            prow[:] = [v / pv if v else v for v in prow]
        nz = [k for k, v in enumerate(prow) if v]
        for i, row in enumerate(self.rows):
            if i != r:
                f = row[e]
                if f:
                    for k in nz:
                        row[k] -= f * prow[k]
        f = self.obj[e]
        if f:
            obj = self.obj
            for k in nz:
                obj[k] -= f * prow[k]
        self.basis[r] = e
        self.pivots += 1

    def run(self, allowed):
        """Bland's rule: smallest improving index enters; ratio ties go to the
        smallest basic index."""
        while True:
            obj = self.obj
            e = next((j for j in allowed if obj[j] > 0), None)
            if e is None:
                return OPTIMAL
            best_r, best_ratio = None, None
            for i, row in enumerate(self.rows):
                a = row[e]
                if a > 0:
                    ratio = row[-1] / a
                    if (best_r is None or ratio < best_ratio
                            or (ratio == best_ratio and self.basis[i] < self.basis[best_r])):
                        best_r, best_ratio = i, ratio
            if best_r is None:
                return UNBOUNDED
            self.pivot(best_r, e)

    def duals(self, cost):
        # artificial column n+i carries B^{-1} e_i, so obj there = c_a_i - y_i
        return [cost[self.n + i] - self.obj[self.n + i] for i in range(self.m)]


def solve(lp: LinearProgram) -> LPOutcome:
    """Solve ``lp`` exactly. Never raises on infeasible or unbounded input."""
    n0, m = lp.n_vars, lp.n_rows
    free = sorted(lp.free)
    # split free variables: x_j = x_j^+ - x_j^-, the minus parts appended
    neg_of = {j: n0 + k for k, j in enumerate(free)}
    n = n0 + len(free)
    sign = 1 if lp.sense == "max" else -1

    A, b, flips = [], [], []
    for row, bi in zip(lp.A, lp.b):
        r = [_q(v) for v in row] + [-_q(row[j]) for j in free]
        bq = _q(bi)
        if bq < 0:
            r = [-v for v in r]
            bq = -bq
            flips.append(-1)
        else:
            flips.append(1)
        A.append(r)
        b.append(bq)
    c = [sign * _q(v) for v in lp.c] + [-sign * _q(lp.c[j]) for j in free]

    if m == 0:
        if any(v > 0 for v in c):
            return LPOutcome(UNBOUNDED)
        return LPOutcome(OPTIMAL, Fraction(0), tuple(Fraction(0) for _ in range(n0)), ())

    T = _Tableau(A, b)
    phase1 = [mpq(0)] * n + [mpq(-1)] * m
    T.set_objective(phase1)
    T.run(range(n))
    if T.obj[-1] != 0:  # -(-sum a) = sum of artificials at optimum
        y = [-v for v in T.duals(phase1)]
        farkas = tuple(_f(fl * v) for fl, v in zip(flips, y))
        return LPOutcome(INFEASIBLE, duals=farkas, pivots=T.pivots)

    # drive zero-level artificials out of the basis where possible
    for i in range(m):
        if T.basis[i] >= n:
            row = T.rows[i]
            e = next((j for j in range(n) if row[j]), None)
            if e is not None:
                T.pivot(i, e)

    phase2 = c + [mpq(0)] * m
    T.set_objective(phase2)
    status = T.run(range(n))
    if status == UNBOUNDED:
        return LPOutcome(UNBOUNDED, pivots=T.pivots)

    xs = [mpq(0)] * n
    for i, j in enumerate(T.basis):
        if j < n:
            xs[j] = T.rows[i][-1]
    x = [xs[j] for j in range(n0)]
    for j, jn in neg_of.items():
        x[j] -= xs[jn]
    value = sum((_q(cj) * xj for cj, xj in zip(lp.c, x) if cj), mpq(0))
    y = T.duals(phase2)
    duals = tuple(_f(sign * fl * v) for fl, v in zip(flips, y))
    return LPOutcome(OPTIMAL, _f(value), tuple(_f(v) for v in x), duals, T.pivots)


def check_dual(lp: LinearProgram, out: LPOutcome) -> bool:
    """Exact verification of the certificate carried by ``out``."""
    y = out.duals
    cols = range(lp.n_vars)
    aty = [sum((lp.A[i][j] * y[i] for i in range(lp.n_rows) if lp.A[i][j]), Fraction(0))
           for j in cols]
    if out.status == INFEASIBLE:
        by = sum((bi * yi for bi, yi in zip(lp.b, y)), Fraction(0))
        ok = all(aty[j] == 0 if j in lp.free else aty[j] <= 0 for j in cols)
        return ok and by > 0
    if out.status == OPTIMAL:
        by = sum((bi * yi for bi, yi in zip(lp.b, y)), Fraction(0))
        if by != out.value:
            return False
        for j in cols:
            if j in lp.free:
                if aty[j] != lp.c[j]:
                    return False
            elif lp.sense == "max" and aty[j] < lp.c[j]:
                return False
            elif lp.sense == "min" and aty[j] > lp.c[j]:
                return False
        return True
    return False


def build_mot_lp(mu, nu, pairs: Sequence[tuple[int, int]] | None = None,
                 objective=None) -> LinearProgram:
    """Martingale transport polytope M(mu, nu) as an equality-form LP.

    Variables are the masses p_ij on the given ``pairs`` (default: all of
    supp mu x supp nu, row-major). Rows: mu marginals, nu marginals, then
    ``d`` martingale rows per atom of mu: sum_j p_ij (y_j - x_i) = 0.
    ``objective`` maps a pair to its coefficient; absent pairs get 0.
    """
    n, m, d = len(mu), len(nu), mu.dim
    if pairs is None:
        pairs = [(i, j) for i in range(n) for j in range(m)]
    pairs = tuple(pairs)
    zero = Fraction(0)
    one = Fraction(1)
    A, b = [], []
    for i in range(n):
        A.append(tuple(one if pi == i else zero for pi, _ in pairs))
        b.append(mu.masses[i])
    for j in range(m):
        A.append(tuple(one if pj == j else zero for _, pj in pairs))
        b.append(nu.masses[j])
    for i in range(n):
        x = mu.points[i]
        for k in range(d):
            A.append(tuple(nu.points[pj][k] - x[k] if pi == i else zero
                           for pi, pj in pairs))
            b.append(zero)
    if objective is None:
        c = (zero,) * len(pairs)
    elif callable(objective):
        c = tuple(Fraction(objective(p)) for p in pairs)
    else:
        c = tuple(Fraction(objective.get(p, 0)) for p in pairs)
    return LinearProgram(tuple(A), tuple(b), c, "max", frozenset(), pairs)
