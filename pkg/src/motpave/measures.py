"""Finitely supported probability measures with exact rational data, and the
convex-order test."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from . import lp
from .errors import InstanceError, InvariantError

Point = tuple[Fraction, ...]


def to_fraction(v) -> Fraction:
    """Exact conversion: ints, Fractions, and strings such as ``"3/8"``,
    ``"0.125"`` or ``"-2"``. Floats are refused (their binary value is rarely
    what was meant)."""
    if isinstance(v, bool):
        raise InstanceError(f"not a rational: {v!r}")
    if isinstance(v, (int, Fraction)):
        return Fraction(v)
    if isinstance(v, str):
        try:
            return Fraction(v.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise InstanceError(f"not a rational: {v!r}") from exc
    if hasattr(v, "numerator") and hasattr(v, "denominator") and not isinstance(v, float):
        return Fraction(int(v.numerator), int(v.denominator))
    raise InstanceError(f"not a rational: {v!r}")


def as_point(coords: Iterable) -> Point:
    return tuple(to_fraction(c) for c in coords)


@dataclass(frozen=True)
class DiscreteMeasure:
    """Probability measure sum_k masses[k] * delta_{points[k]}.

    Atoms keep the order they were given in; indices into ``points`` are how
    couplings and pavings refer to atoms.
    """

    points: tuple[Point, ...]
    masses: tuple[Fraction, ...]

    def __post_init__(self):
        if not self.points:
            raise InstanceError("measure has no atoms")
        if len(self.points) != len(self.masses):
            raise InstanceError("points and masses differ in length")
        d = len(self.points[0])
        if d < 1:
            raise InstanceError("zero-dimensional points")
        if any(len(p) != d for p in self.points):
            raise InstanceError("atoms of mixed dimension")
        if any(m <= 0 for m in self.masses):
            raise InstanceError("atom masses must be positive")
        if sum(self.masses) != 1:
            raise InstanceError(f"masses sum to {sum(self.masses)}, not 1")
        if len(set(self.points)) != len(self.points):
            raise InstanceError("repeated atom")

    @classmethod
    def from_atoms(cls, atoms: Iterable[tuple[Sequence, object]]) -> "DiscreteMeasure":
        pts, ms = [], []
        for p, m in atoms:
            pts.append(as_point(p))
            ms.append(to_fraction(m))
        return cls(tuple(pts), tuple(ms))

    @classmethod
    def dirac(cls, point) -> "DiscreteMeasure":
        return cls((as_point(point),), (Fraction(1),))

    @property
    def dim(self) -> int:
        return len(self.points[0])

    def __len__(self) -> int:
        return len(self.points)

    def index(self, point) -> int:
        try:
            return self.points.index(as_point(point))
        except ValueError:
            raise InstanceError(f"{point} is not an atom") from None

    def integrate(self, f) -> Fraction:
        return sum((m * f(p) for p, m in zip(self.points, self.masses)), Fraction(0))

    def atoms(self):
        return zip(self.points, self.masses)


def mean(m: DiscreteMeasure) -> Point:
    return tuple(sum((w * p[k] for p, w in m.atoms()), Fraction(0)) for k in range(m.dim))


@dataclass(frozen=True)
class PiecewiseAffineConvex:
    """f(y) = max_k (slopes[k] . y + intercepts[k])."""

    slopes: tuple[Point, ...]
    intercepts: tuple[Fraction, ...]

    def __post_init__(self):
        if not self.slopes or len(self.slopes) != len(self.intercepts):
            raise ValueError("need at least one (slope, intercept) piece")

    @classmethod
    def from_pieces(cls, pieces) -> "PiecewiseAffineConvex":
        return cls(tuple(as_point(a) for a, _ in pieces),
                   tuple(to_fraction(b) for _, b in pieces))

    def piece_values(self, y) -> list[Fraction]:
        return [sum((a * v for a, v in zip(s, y)), Fraction(0)) + b
                for s, b in zip(self.slopes, self.intercepts)]

    def __call__(self, y) -> Fraction:
        return max(self.piece_values(y))

    def argmax(self, y) -> int:
        """Lowest index among maximizing pieces."""
        vals = self.piece_values(y)
        top = max(vals)
        return vals.index(top)

    def subgradient(self, y) -> Point:
        return self.slopes[self.argmax(y)]


@dataclass(frozen=True)
class OrderResult:
    holds: bool
    coupling: object = None  # Coupling when holds
    witness: PiecewiseAffineConvex | None = None  # violating f otherwise
    gap: Fraction | None = None  # mu[f] - nu[f] > 0 for the witness

    def __bool__(self):
        return self.holds


def convex_order(mu: DiscreteMeasure, nu: DiscreteMeasure) -> OrderResult:
    """Decide mu <= nu in convex order via feasibility of M(mu, nu).

    On failure the Farkas multipliers (a_i, b_j, h_i) of the marginal and
    martingale rows satisfy a_i + b_j + h_i.(y_j - x_i) <= 0 with
    mu[a] + nu[b] > 0, so f(z) = max_i (a_i + h_i.(z - x_i)) has
    mu[f] - nu[f] >= mu[a] + nu[b] > 0.
    """
    from .coupling import Coupling

    if mu.dim != nu.dim:
        raise InstanceError("dimension mismatch between mu and nu")
    prob = lp.build_mot_lp(mu, nu)
    out = lp.solve(prob)
    if out.optimal:
        return OrderResult(True, coupling=Coupling.from_vector(mu, nu, prob.names, out.x))
    n, m, d = len(mu), len(nu), mu.dim
    y = out.duals
    a, h = y[:n], [y[n + m + d * i: n + m + d * (i + 1)] for i in range(n)]
    slopes = tuple(tuple(hk) for hk in h)
    intercepts = tuple(a[i] - sum((hk * xk for hk, xk in zip(h[i], mu.points[i])), Fraction(0))
                       for i in range(n))
    f = PiecewiseAffineConvex(slopes, intercepts)
    gap = mu.integrate(f) - nu.integrate(f)
    if gap <= 0:
        raise InvariantError("Farkas certificate does not separate mu from nu")
    return OrderResult(False, witness=f, gap=gap)
