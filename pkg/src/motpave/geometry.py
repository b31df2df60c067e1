"""Exact convex geometry over the rationals.

Polytopes are stored by their extreme points. Facets are enumerated
combinatorially in the affine coordinates of the hull, which is cheap at the
sizes used here (a dozen points, dimension at most 3 or 4). Membership tests
go through exact LPs; the facet description backs relative faces,
intersections, and the floating-point sampler inside :func:`G`.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from . import lp
from .errors import InstanceError
from .measures import Point, as_point

CLOSURE = "closure"
RELATIVE_INTERIOR = "relative_interior"
RELATIVE_BOUNDARY = "relative_boundary"

DEFAULT_MC_SAMPLES = 100_000

_ZERO = Fraction(0)


def _sub(u, v):
    return tuple(a - b for a, b in zip(u, v))


def _dot(u, v):
    return sum((a * b for a, b in zip(u, v) if a and b), _ZERO)


def rref(rows: Sequence[Sequence[Fraction]]) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form; returns (nonzero rows, pivot columns)."""
    M = [list(r) for r in rows]
    if not M:
        return [], []
    ncol = len(M[0])
    pivots = []
    r = 0
    for c in range(ncol):
        p = next((i for i in range(r, len(M)) if M[i][c] != 0), None)
        if p is None:
            continue
        M[r], M[p] = M[p], M[r]
        pv = M[r][c]
        M[r] = [v / pv for v in M[r]]
        for i in range(len(M)):
            if i != r and M[i][c] != 0:
                f = M[i][c]
                M[i] = [a - f * b for a, b in zip(M[i], M[r])]
        pivots.append(c)
        r += 1
        if r == len(M):
            break
    return M[:r], pivots


def nullspace(rows: Sequence[Sequence[Fraction]], ncol: int) -> list[tuple[Fraction, ...]]:
    R, piv = rref(rows)
    out = []
    for fcol in (c for c in range(ncol) if c not in piv):
        v = [_ZERO] * ncol
        v[fcol] = Fraction(1)
        for row, pc in zip(R, piv):
            v[pc] = -row[fcol]
        out.append(tuple(v))
    return out


def solve_square(M: Sequence[Sequence[Fraction]], rhs: Sequence[Fraction]):
    """Unique solution of M x = rhs, or None if M is singular."""
    k = len(M)
    R, piv = rref([list(r) + [b] for r, b in zip(M, rhs)])
    if piv != list(range(k)):
        return None
    return tuple(row[-1] for row in R)


@dataclass(frozen=True)
class AffineSubspace:
    """base + span(basis); ``basis`` is in reduced row echelon form, so the
    affine coordinates of x are x[p] - base[p] over the pivot columns p."""

    base: Point
    basis: tuple[Point, ...]
    pivots: tuple[int, ...]

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def ambient_dim(self) -> int:
        return len(self.base)

    def coordinates(self, x) -> tuple[Fraction, ...] | None:
        """Affine coordinates of x, or None when x is off the subspace."""
        v = _sub(x, self.base)
        t = tuple(v[p] for p in self.pivots)
        recon = [sum((tk * b[j] for tk, b in zip(t, self.basis)), _ZERO)
                 for j in range(len(v))]
        if tuple(recon) != v:
            return None
        return t

    def contains(self, x) -> bool:
        return self.coordinates(x) is not None

    def point(self, t: Sequence[Fraction]) -> Point:
        return tuple(self.base[j] + sum((tk * b[j] for tk, b in zip(t, self.basis)), _ZERO)
                     for j in range(len(self.base)))

    def equations(self) -> list[tuple[Point, Fraction]]:
        """(n, c) with n.x = c cutting out the subspace."""
        normals = nullspace(self.basis, self.ambient_dim) if self.basis else [
            tuple(Fraction(int(i == j)) for j in range(self.ambient_dim))
            for i in range(self.ambient_dim)]
        return [(n, _dot(n, self.base)) for n in normals]


def affine_hull(points: Iterable) -> AffineSubspace:
    pts = [as_point(p) for p in points]
    if not pts:
        raise InstanceError("empty point set")
    d = len(pts[0])
    if any(len(p) != d for p in pts):
        raise InstanceError("points of mixed dimension")
    base = pts[0]
    R, piv = rref([_sub(p, base) for p in pts[1:]])
    return AffineSubspace(base, tuple(tuple(r) for r in R), tuple(piv))


def in_hull(x, points: Sequence[Point], strict: bool = False) -> bool:
    """Exact LP test x in conv(points); with ``strict``, x must be a strictly
    positive combination of all points, i.e. x in ri conv(points).

    Variables: t >= 0 and s_k >= 0 with lambda_k = t + s_k; maximize t.
    """
    k = len(points)
    d = len(x)
    one = Fraction(1)
    A = [(Fraction(k),) + (one,) * k]
    b = [one]
    for j in range(d):
        A.append((sum((p[j] for p in points), _ZERO),) + tuple(p[j] for p in points))
        b.append(x[j])
    c = (one if strict else _ZERO,) + (_ZERO,) * k
    out = lp.solve(lp.LinearProgram(tuple(A), tuple(b), c))
    if not out.optimal:
        return False
    return out.value > 0 if strict else True


@dataclass(frozen=True, eq=False)
class Polytope:
    """conv(vertices) with ``vertices`` its extreme points, sorted."""

    vertices: tuple[Point, ...]

    @classmethod
    def hull(cls, points: Iterable) -> "Polytope":
        pts = sorted(set(as_point(p) for p in points))
        if not pts:
            raise InstanceError("empty point set")
        if len(pts) > 2:
            pts = [p for i, p in enumerate(pts)
                   if not in_hull(p, pts[:i] + pts[i + 1:])]
        return cls(tuple(pts))

    def __eq__(self, other):
        return isinstance(other, Polytope) and self.vertices == other.vertices

    def __hash__(self):
        return hash(self.vertices)

    def __repr__(self):
        vs = ", ".join("(" + ", ".join(str(c) for c in v) + ")" for v in self.vertices)
        return f"Polytope[{vs}]"

    @property
    def ambient_dim(self) -> int:
        return len(self.vertices[0])

    @cached_property
    def aff(self) -> AffineSubspace:
        return affine_hull(self.vertices)

    @property
    def dim(self) -> int:
        return self.aff.dim

    @cached_property
    def local_vertices(self) -> tuple[tuple[Fraction, ...], ...]:
        return tuple(self.aff.coordinates(v) for v in self.vertices)

    @cached_property
    def facets(self) -> tuple[tuple[tuple[Fraction, ...], Fraction], ...]:
        """Facet inequalities a.t <= b in affine coordinates of ``aff``."""
        k = self.dim
        if k == 0:
            return ()
        V = self.local_vertices
        found = {}
        for S in itertools.combinations(range(len(V)), k):
            s0 = V[S[0]]
            ns = nullspace([_sub(V[i], s0) for i in S[1:]], k)
            if len(ns) != 1:
                continue
            a = ns[0]
            b = _dot(a, s0)
            vals = [_dot(a, v) - b for v in V]
            if all(v <= 0 for v in vals):
                pass
            elif all(v >= 0 for v in vals):
                a, b = tuple(-x for x in a), -b
            else:
                continue
            lead = next(abs(x) for x in a if x)
            key = (tuple(x / lead for x in a), b / lead)
            found[key] = None
        return tuple(found)

    def vertices_on(self, facet_ids: Iterable[int]) -> list[Point]:
        F = [self.facets[i] for i in facet_ids]
        return [v for v, t in zip(self.vertices, self.local_vertices)
                if all(_dot(a, t) == b for a, b in F)]

    def halfspaces(self) -> tuple[list, list]:
        """Ambient description: (equalities [(n, c)], inequalities [(a, b)])
        meaning n.x = c and a.x <= b."""
        A = self.aff
        eqs = A.equations()
        ineqs = []
        for a, b in self.facets:
            row = [_ZERO] * A.ambient_dim
            for ak, p in zip(a, A.pivots):
                row[p] += ak
            ineqs.append((tuple(row), b + _dot(a, tuple(A.base[p] for p in A.pivots))))
        return eqs, ineqs

    def contains_h(self, x, mode: str = CLOSURE) -> bool:
        """Membership through the facet description (independent of the LP
        route used by :func:`contains`)."""
        t = self.aff.coordinates(as_point(x))
        if t is None:
            return False
        slack = [b - _dot(a, t) for a, b in self.facets]
        if any(s < 0 for s in slack):
            return False
        if mode == CLOSURE:
            return True
        interior = all(s > 0 for s in slack)
        return interior if mode == RELATIVE_INTERIOR else not interior


@dataclass(frozen=True)
class RelOpenConvexSet:
    """Either ri(closure) (``open=True``) or the closed polytope itself.
    Two relatively open sets are equal exactly when their closures are."""

    closure: Polytope
    open: bool = True

    @property
    def dim(self) -> int:
        return self.closure.dim

    def __contains__(self, x) -> bool:
        return contains(self.closure, x, RELATIVE_INTERIOR if self.open else CLOSURE)


def relative_interior(P: Polytope) -> RelOpenConvexSet:
    return RelOpenConvexSet(P, True)


def contains(P: Polytope, x, mode: str = CLOSURE) -> bool:
    x = as_point(x)
    if len(x) != P.ambient_dim:
        raise InstanceError("dimension mismatch")
    if mode == CLOSURE:
        return in_hull(x, P.vertices)
    if mode == RELATIVE_INTERIOR:
        return in_hull(x, P.vertices, strict=True)
    if mode == RELATIVE_BOUNDARY:
        return in_hull(x, P.vertices) and not in_hull(x, P.vertices, strict=True)
    raise ValueError(f"unknown mode {mode!r}")


def relative_face(a, P: Polytope) -> Polytope | None:
    """Smallest face F of P containing a (so that a lies in ri F), or None
    when a is outside P."""
    a = as_point(a)
    if not contains(P, a):
        return None
    t = P.aff.coordinates(a)
    active = [i for i, (n, b) in enumerate(P.facets) if _dot(n, t) == b]
    if not active:
        return P
    return Polytope(tuple(P.vertices_on(active)))


def conv_union(P1: Polytope, P2: Polytope) -> Polytope:
    return Polytope.hull(P1.vertices + P2.vertices)


def intersect(P1: Polytope, P2: Polytope) -> Polytope | None:
    """P1 & P2 by vertex enumeration over the combined halfspace systems."""
    d = P1.ambient_dim
    e1, h1 = P1.halfspaces()
    e2, h2 = P2.halfspaces()
    eqs, ineqs = e1 + e2, h1 + h2
    rows = [(n, c) for n, c in eqs] + [(a, b) for a, b in ineqs]
    pts = set()
    for S in itertools.combinations(range(len(rows)), d):
        x = solve_square([rows[i][0] for i in S], [rows[i][1] for i in S])
        if x is None:
            continue
        if all(_dot(n, x) == c for n, c in eqs) and all(_dot(a, x) <= b for a, b in ineqs):
            pts.add(x)
    if not pts:
        return None
    return Polytope.hull(pts)


# -- Gaussian measurement -------------------------------------------------

def _frame(P: Polytope):
    """Orthonormal frame of aff P: (p0, Q) with p0 the foot of the origin."""
    A = P.aff
    base = np.array([float(v) for v in A.base])
    if A.dim == 0:
        return base, np.zeros((len(base), 0))
    B = np.array([[float(v) for v in b] for b in A.basis]).T
    Q, _ = np.linalg.qr(B)
    p0 = base - Q @ (Q.T @ base)
    return p0, Q


def gaussian_mass(P: Polytope, mc_samples: int = DEFAULT_MC_SAMPLES, seed: int | None = None,
                  method: str = "auto") -> tuple[float, float]:
    """Gaussian mass g_K(K) of K = P inside its affine hull, with its standard
    error (0 for closed forms).

    The density e^{-|x|^2/2} (2 pi)^{-k/2} on aff P factors as
    e^{-|p0|^2/2} times a standard k-variate normal in an orthonormal frame
    centred at p0. Dimension 0 uses the unit-mass convention for points.
    """
    k = P.dim
    p0, Q = _frame(P)
    scale = math.exp(-0.5 * float(p0 @ p0))
    if k == 0:
        return scale, 0.0
    if method not in ("auto", "mc", "exact"):
        raise ValueError(f"unknown method {method!r}")
    if k == 1 and method != "mc":
        u = sorted(float(Q[:, 0] @ (np.array([float(c) for c in v]) - p0)) for v in P.vertices)
        lo, hi = u[0], u[-1]
        phi = 0.5 * (math.erf(hi / math.sqrt(2)) - math.erf(lo / math.sqrt(2)))
        return scale * phi, 0.0
    if method == "exact":
        raise ValueError("closed form available only in dimensions 0 and 1")
    if seed is None:
        raise ValueError("seed is required for Monte Carlo estimation")
    rng = np.random.default_rng(seed)
    U = rng.standard_normal((mc_samples, k))
    X = p0 + U @ Q.T
    A = P.aff
    piv = list(A.pivots)
    base = np.array([float(A.base[p]) for p in piv])
    T = X[:, piv] - base
    inside = np.ones(mc_samples, dtype=bool)
    for a, b in P.facets:
        inside &= T @ np.array([float(v) for v in a]) <= float(b) + 1e-12
    p = inside.mean()
    p = float(p)
    return scale * p, scale * math.sqrt(p * (1 - p) / mc_samples)


def G(C, mc_samples: int = DEFAULT_MC_SAMPLES, seed: int | None = None,
      method: str = "auto") -> float:
    """dim(C) + Gaussian mass of cl C in aff C; lies in [dim, dim + 1]."""
    P = C.closure if isinstance(C, RelOpenConvexSet) else C
    if P is None:
        raise InstanceError("empty set")
    g, _ = gaussian_mass(P, mc_samples, seed, method)
    return P.dim + g


def compare_G(C1, C2) -> int:
    """Exact comparison of G for nested convex sets C1 subset C2:
    0 when closures agree, -1 otherwise (strict inclusion)."""
    P1 = C1.closure if isinstance(C1, RelOpenConvexSet) else C1
    P2 = C2.closure if isinstance(C2, RelOpenConvexSet) else C2
    if not all(contains(P2, v) for v in P1.vertices):
        raise ValueError("sets are not nested")
    return 0 if P1 == P2 else -1
