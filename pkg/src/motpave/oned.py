"""Potential functions on the line and the irreducible interval
decomposition they induce. Used as an independent check on the general
paving algorithm."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from . import lp
from .errors import InstanceError, NotInConvexOrder
from .measures import DiscreteMeasure

_ZERO = Fraction(0)


@dataclass(frozen=True)
class Potential:
    """U(t) = sum_k m_k |a_k - t|, piecewise linear with kinks at the atoms."""

    atoms: tuple[Fraction, ...]
    masses: tuple[Fraction, ...]

    @property
    def breakpoints(self) -> tuple[Fraction, ...]:
        return self.atoms

    @property
    def slopes(self) -> tuple[Fraction, ...]:
        """Slope on (-inf, a_0), (a_0, a_1), ..., (a_last, inf)."""
        out = [Fraction(-1)]
        for m in self.masses:
            out.append(out[-1] + 2 * m)
        return tuple(out)

    @property
    def mean(self) -> Fraction:
        return sum((a * m for a, m in zip(self.atoms, self.masses)), _ZERO)

    def __call__(self, t) -> Fraction:
        t = Fraction(t)
        return sum((m * abs(a - t) for a, m in zip(self.atoms, self.masses)), _ZERO)


def potential(m: DiscreteMeasure) -> Potential:
    if m.dim != 1:
        raise InstanceError("potential functions need a 1-d measure")
    pairs = sorted((p[0], w) for p, w in m.atoms())
    return Potential(tuple(a for a, _ in pairs), tuple(w for _, w in pairs))


def potential_order(mu: DiscreteMeasure, nu: DiscreteMeasure) -> bool:
    """mu <= nu in convex order iff the means agree and U_mu <= U_nu. Both
    sides are piecewise linear with matching tails once the means agree, so
    checking the union of kinks suffices."""
    Um, Un = potential(mu), potential(nu)
    if Um.mean != Un.mean:
        return False
    return all(Um(t) <= Un(t) for t in set(Um.atoms) | set(Un.atoms))


@dataclass(frozen=True)
class Interval:
    left: Fraction
    right: Fraction
    mu_atoms: tuple[int, ...]  # atoms of mu in (left, right)
    nu_atoms: tuple[int, ...]  # atoms of nu in [left, right]
    left_in_J: bool
    right_in_J: bool

    def contains(self, t) -> bool:
        return self.left < t < self.right

    @property
    def J_endpoints(self) -> tuple[Fraction, ...]:
        return tuple(e for e, keep in ((self.left, self.left_in_J), (self.right, self.right_in_J)) if keep)


@dataclass(frozen=True)
class IntervalDecomposition:
    intervals: tuple[Interval, ...]
    singletons: tuple[int, ...]  # mu atoms outside every interval

    def interval_of(self, t) -> Interval | None:
        return next((iv for iv in self.intervals if iv.contains(t)), None)


def contact_points(mu: DiscreteMeasure, nu: DiscreteMeasure) -> list[Fraction]:
    """Kinks of U_mu or U_nu where the two potentials touch."""
    Um, Un = potential(mu), potential(nu)
    return sorted(t for t in set(Um.atoms) | set(Un.atoms) if Um(t) == Un(t))


def bj_decomposition(mu: DiscreteMeasure, nu: DiscreteMeasure) -> IntervalDecomposition:
    """Maximal open intervals where U_mu < U_nu, with their J sets.

    The difference U_nu - U_mu is linear between consecutive kinks, so the
    set {U_mu < U_nu} is a union of open gaps between contact kinks. An
    endpoint joins J when some coupling moves mass into it from atoms inside
    the interval (one LP per endpoint that is a nu atom).
    """
    if mu.dim != 1 or nu.dim != 1:
        raise InstanceError("bj_decomposition needs 1-d measures")
    if not potential_order(mu, nu):
        raise NotInConvexOrder()
    Um, Un = potential(mu), potential(nu)
    kinks = sorted(set(Um.atoms) | set(Un.atoms))
    gap = [Un(t) - Um(t) for t in kinks]
    zeros = [k for k, g in enumerate(gap) if g == 0]
    prob = lp.build_mot_lp(mu, nu)
    xs = [p[0] for p in mu.points]
    ys = [p[0] for p in nu.points]
    intervals = []
    for a, b in zip(zeros, zeros[1:]):
        if b == a + 1 and gap[a] == 0 and gap[b] == 0:
            continue  # difference vanishes on the whole segment
        l, r = kinks[a], kinks[b]
        inside = tuple(i for i, x in enumerate(xs) if l < x < r)
        closed = tuple(j for j, y in enumerate(ys) if l <= y <= r)

        def charged(e):
            if e not in ys:
                return False
            j = ys.index(e)
            out = lp.solve(prob.with_objective([int(i in inside and jj == j) for i, jj in prob.names]))
            return out.value > 0

        intervals.append(Interval(l, r, inside, closed, charged(l), charged(r)))
    covered = {i for iv in intervals for i in iv.mu_atoms}
    singles = tuple(i for i in range(len(mu)) if i not in covered)
    return IntervalDecomposition(tuple(intervals), singles)
