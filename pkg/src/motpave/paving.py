"""Irreducible convex paving on supp mu, the boundary maps J_lower / J_upper,
and polar-pair classification."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from . import geometry, lp
from .coupling import Coupling, max_pair_mass, maximal_support_coupling
from .errors import InstanceError, InvariantError
from .geometry import Polytope, RelOpenConvexSet
from .measures import DiscreteMeasure, as_point


@dataclass(frozen=True)
class Component:
    closure: Polytope
    mu_atoms: tuple[int, ...]
    nu_atoms: tuple[int, ...]  # nu atoms lying in the closure

    @property
    def I(self) -> RelOpenConvexSet:
        return RelOpenConvexSet(self.closure)

    @property
    def dim(self) -> int:
        return self.closure.dim


@dataclass(frozen=True)
class ComponentMap:
    mu: DiscreteMeasure
    nu: DiscreteMeasure
    components: tuple[Component, ...]
    atom_component: tuple[int, ...]  # mu atom index -> component index
    phat: Coupling

    def component_of(self, i: int) -> Component:
        return self.components[self.atom_component[i]]

    def I(self, i: int) -> RelOpenConvexSet:
        return self.component_of(i).I


def irreducible_paving(mu: DiscreteMeasure, nu: DiscreteMeasure, phat: Coupling | None = None) -> ComponentMap:
    """I(x) = ri conv supp Phat_x for every atom x of mu, grouped into
    components by equality of closures.

    Raises :class:`NotInConvexOrder` when M(mu, nu) is empty, and
    :class:`InvariantError` if the result is not a partition.
    """
    if phat is None:
        phat = maximal_support_coupling(mu, nu)
    hulls = [phat.support_hull(i) for i in range(len(mu))]
    order: dict[Polytope, list[int]] = {}
    for i, P in enumerate(hulls):
        order.setdefault(P, []).append(i)
    comps, owner = [], [0] * len(mu)
    for k, (P, members) in enumerate(order.items()):
        for i in members:
            owner[i] = k
            if not geometry.contains(P, mu.points[i], geometry.RELATIVE_INTERIOR):
                raise InvariantError(f"atom {i} is not in the relative interior of I(x)")
        ys = tuple(j for j, y in enumerate(nu.points) if geometry.contains(P, y))
        comps.append(Component(P, tuple(members), ys))
    for a in range(len(comps)):
        for b in range(a + 1, len(comps)):
            if ri_intersect(comps[a].closure, comps[b].closure):
                raise InvariantError("irreducible components overlap")
    return ComponentMap(mu, nu, tuple(comps), tuple(owner), phat)


def ri_intersect(P1: Polytope, P2: Polytope) -> bool:
    """Exact test ri P1 & ri P2 != {} : strictly positive weights on both
    vertex lists reaching a common point."""
    V1, V2 = P1.vertices, P2.vertices
    n1, n2 = len(V1), len(V2)
    one, zero = Fraction(1), Fraction(0)
    # t >= 0, s1, s2 >= 0 with weights t + s; maximize t
    A = [(Fraction(n1),) + (one,) * n1 + (zero,) * n2,
         (Fraction(n2),) + (zero,) * n1 + (one,) * n2]
    b = [one, one]
    for k in range(P1.ambient_dim):
        A.append((sum(v[k] for v in V1) - sum(v[k] for v in V2),)
                 + tuple(v[k] for v in V1) + tuple(-v[k] for v in V2))
        b.append(zero)
    c = (one,) + (zero,) * (n1 + n2)
    out = lp.solve(lp.LinearProgram(tuple(A), tuple(b), c))
    return out.optimal and out.value > 0


@dataclass(frozen=True)
class ComponentJ:
    I: RelOpenConvexSet
    lower_atoms: tuple[int, ...]  # nu atoms on the boundary of I charged by Phat
    lower_points: tuple  # their coordinates
    upper_boundary: Polytope | None  # closed hull of the boundary support

    def in_lower(self, y) -> bool:
        y = as_point(y)
        return y in self.lower_points or y in self.I

    def in_upper(self, y) -> bool:
        y = as_point(y)
        if self.upper_boundary is not None and geometry.contains(self.upper_boundary, y):
            return True
        return y in self.I

    def lower_equals_upper(self) -> bool:
        """Whether J_lower and J_upper coincide as sets.

        The boundary hull B meets the boundary of I only in faces of B; those
        are single atoms iff no facet of cl I carries two vertices of B.
        """
        if self.upper_boundary is None:
            return True
        C = self.I.closure
        for a, b in C.facets:
            on = 0
            for v in self.upper_boundary.vertices:
                t = C.aff.coordinates(v)
                if sum((x * y for x, y in zip(a, t)), Fraction(0)) == b:
                    on += 1
            if on > 1:
                return False
        return True


@dataclass(frozen=True)
class JMaps:
    cm: ComponentMap
    per_component: tuple[ComponentJ, ...]

    def of_atom(self, i: int) -> ComponentJ:
        return self.per_component[self.cm.atom_component[i]]


def j_maps(cm: ComponentMap, phat: Coupling | None = None) -> JMaps:
    """J_lower = I plus the charged boundary atoms, J_upper = I plus the closed
    hull of the boundary support, per component. Raises InvariantError if
    members of one component disagree."""
    phat = phat or cm.phat
    if phat.mu != cm.mu or phat.nu != cm.nu:
        raise InstanceError("coupling and component map belong to different instances")
    nu = cm.nu
    out = []
    for comp in cm.components:
        C = comp.closure
        boundary = None
        for i in comp.mu_atoms:
            charged = tuple(j for j in phat.support(i)
                            if geometry.contains(C, nu.points[j], geometry.RELATIVE_BOUNDARY))
            if boundary is None:
                boundary = charged
            elif charged != boundary:
                raise InvariantError("J_lower is not constant on a component")
        upper = Polytope.hull(nu.points[j] for j in boundary) if boundary else None
        out.append(ComponentJ(comp.I, boundary, tuple(nu.points[j] for j in boundary), upper))
    return JMaps(cm, tuple(out))


@dataclass(frozen=True)
class PairClass:
    polar: bool
    max_mass: Fraction
    witness: Coupling | None
    in_lower: bool
    in_upper: bool


def classify_pair(x, y, mu: DiscreteMeasure, nu: DiscreteMeasure, jm: JMaps | None = None) -> PairClass:
    """(x, y) is polar iff no martingale coupling charges it, decided by one
    exact LP. The J memberships are reported alongside; a polar pair inside
    J_lower raises InvariantError."""
    i, j = mu.index(x), nu.index(y)
    if jm is None:
        jm = j_maps(irreducible_paving(mu, nu))
    value, witness = max_pair_mass(mu, nu, i, j)
    J = jm.of_atom(i)
    polar = value == 0
    res = PairClass(polar, value, None if polar else witness, J.in_lower(y), J.in_upper(y))
    if polar and res.in_lower:
        raise InvariantError(f"polar pair ({i}, {j}) lies in J_lower")
    return res
