"""Martingale couplings: the maximal-support coupling, vertex sampling of
M(mu, nu), and the Gaussian support functional."""

from __future__ import annotations

import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from . import geometry, lp
from .errors import InvariantError, NotInConvexOrder
from .measures import DiscreteMeasure

_ZERO = Fraction(0)


@dataclass(frozen=True)
class Coupling:
    """Masses p[i][j] on supp mu x supp nu. Construction checks marginals,
    martingale rows and nonnegativity exactly."""

    mu: DiscreteMeasure
    nu: DiscreteMeasure
    p: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        if self.residuals() != [] or any(v < 0 for row in self.p for v in row):
            raise InvariantError("not a martingale coupling")

    @classmethod
    def from_vector(cls, mu, nu, pairs, x) -> "Coupling":
        p = [[_ZERO] * len(nu) for _ in range(len(mu))]
        for (i, j), v in zip(pairs, x):
            p[i][j] = v
        return cls(mu, nu, tuple(tuple(r) for r in p))

    def residuals(self) -> list:
        """Nonzero constraint residuals as (kind, index, value); empty when
        every marginal and martingale row holds exactly."""
        mu, nu, p = self.mu, self.nu, self.p
        bad = []
        for i, row in enumerate(p):
            r = sum(row) - mu.masses[i]
            if r:
                bad.append(("mu", i, r))
            x = mu.points[i]
            for k in range(mu.dim):
                r = sum((v * (nu.points[j][k] - x[k]) for j, v in enumerate(row) if v), _ZERO)
                if r:
                    bad.append(("martingale", (i, k), r))
        for j in range(len(nu)):
            r = sum(p[i][j] for i in range(len(mu))) - nu.masses[j]
            if r:
                bad.append(("nu", j, r))
        return bad

    def support(self, i: int) -> tuple[int, ...]:
        """Indices of nu atoms charged from mu atom i."""
        return tuple(j for j, v in enumerate(self.p[i]) if v > 0)

    def support_pairs(self) -> frozenset[tuple[int, int]]:
        return frozenset((i, j) for i in range(len(self.mu)) for j in self.support(i))

    def kernel(self, i: int) -> tuple[Fraction, ...]:
        m = self.mu.masses[i]
        return tuple(v / m for v in self.p[i])

    def support_hull(self, i: int) -> geometry.Polytope:
        return geometry.Polytope.hull(self.nu.points[j] for j in self.support(i))

    def expectation(self, table) -> Fraction:
        return sum((v * table[i][j] for i, row in enumerate(self.p)
                    for j, v in enumerate(row) if v), _ZERO)

    @staticmethod
    def mixture(couplings: Sequence["Coupling"], weights=None) -> "Coupling":
        k = len(couplings)
        if weights is None:
            weights = [Fraction(1, k)] * k
        first = couplings[0]
        n, m = len(first.mu), len(first.nu)
        p = tuple(tuple(sum((w * c.p[i][j] for w, c in zip(weights, couplings)), _ZERO)
                        for j in range(m)) for i in range(n))
        return Coupling(first.mu, first.nu, p)


def _mot_lp(mu, nu):
    prob = lp.build_mot_lp(mu, nu)
    probe = lp.solve(prob)
    if not probe.optimal:
        raise NotInConvexOrder()
    return prob


def max_pair_mass(mu, nu, i: int, j: int, prob=None) -> tuple[Fraction, Coupling]:
    """max p_ij over M(mu, nu), with an optimal coupling."""
    prob = prob or lp.build_mot_lp(mu, nu)
    out = lp.solve(prob.with_objective([int(q == (i, j)) for q in prob.names]))
    if not out.optimal:
        raise NotInConvexOrder()
    return out.value, Coupling.from_vector(mu, nu, prob.names, out.x)


def _pair_task(args):
    mu, nu, i, j = args
    return max_pair_mass(mu, nu, i, j)


def maximal_support_coupling(mu: DiscreteMeasure, nu: DiscreteMeasure,
                             method: str = "cover", jobs: int = 1) -> Coupling:
    """A coupling whose conditional supports contain those of every other
    coupling: the uniform average of LP maximizers.

    ``method="per_pair"`` maximizes p_ij separately for each pair (fanned out
    over ``jobs`` processes). ``method="cover"`` gets the same support with
    fewer solves: repeatedly maximize the total mass on pairs not yet seen
    charged, keep the maximizer, and stop once that optimum is zero (all
    remaining pairs are then polar).
    """
    prob = _mot_lp(mu, nu)
    n, m = len(mu), len(nu)
    found = []
    if method == "per_pair":
        pairs = [(i, j) for i in range(n) for j in range(m)]
        if jobs > 1:
            with ProcessPoolExecutor(jobs) as ex:
                results = list(ex.map(_pair_task, [(mu, nu, i, j) for i, j in pairs]))
        else:
            results = [max_pair_mass(mu, nu, i, j, prob) for i, j in pairs]
        found = [c for v, c in results if v > 0]
    elif method == "cover":
        unseen = set(prob.names)
        while unseen:
            out = lp.solve(prob.with_objective([int(q in unseen) for q in prob.names]))
            if out.value == 0:
                break
            c = Coupling.from_vector(mu, nu, prob.names, out.x)
            found.append(c)
            unseen -= c.support_pairs()
    else:
        raise ValueError(f"unknown method {method!r}")
    if not found:  # only possible when every p_ij is forced to zero, i.e. never
        raise InvariantError("no coupling found for a feasible instance")
    return Coupling.mixture(found)


def sample_vertices(mu: DiscreteMeasure, nu: DiscreteMeasure, k: int, seed: int) -> list[Coupling]:
    """Vertices of M(mu, nu) reached by maximizing ``k`` random integer
    objectives; duplicates removed, first-seen order kept."""
    prob = _mot_lp(mu, nu)
    rng = random.Random(seed)
    seen, out = set(), []
    for _ in range(k):
        c = [rng.randint(-1000, 1000) for _ in prob.names]
        res = lp.solve(prob.with_objective(c))
        if res.x not in seen:
            seen.add(res.x)
            out.append(Coupling.from_vector(mu, nu, prob.names, res.x))
    return out


def support_functional(P: Coupling, seed: int, mc_samples: int = geometry.DEFAULT_MC_SAMPLES) -> float:
    """mu[G(conv supp P_X)]."""
    return float(sum(float(m) * geometry.G(P.support_hull(i), mc_samples, seed)
                     for i, m in enumerate(P.mu.masses)))


def support_dimension(P: Coupling) -> Fraction:
    """mu[dim conv supp P_X], the exact integer part driving the ordering
    of :func:`support_functional`."""
    return sum((m * P.support_hull(i).dim for i, m in enumerate(P.mu.masses)), _ZERO)
