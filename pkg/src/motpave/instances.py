"""Named and randomly generated (mu, nu) instances.

The random generators build nu from mu by mean-preserving splits, so the
pairs they return are in convex order by construction, except for
:func:`random_1d_pair`, which mixes ordered and unordered pairs.
"""

from __future__ import annotations

import random
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction

from .measures import DiscreteMeasure, as_point


@dataclass(frozen=True)
class Instance:
    mu: DiscreteMeasure
    nu: DiscreteMeasure
    cost: object = None  # duality.CostFunction
    seed: int | None = None
    name: str = ""


def example_2_2() -> Instance:
    """mu = (d_x0 + d_x1)/2 and nu = (4 d_y0 + d_y-1 + d_y1 + 2 d_y2)/8 in R^2,
    atoms ordered x0, x1 and y0, y-1, y1, y2."""
    x0, x1 = (0, 0), (1, 0)
    y0, ym1, y1, y2 = (0, 0), (0, -1), (0, 1), (2, 0)
    mu = DiscreteMeasure.from_atoms([(x0, "1/2"), (x1, "1/2")])
    nu = DiscreteMeasure.from_atoms([(y0, "4/8"), (ym1, "1/8"), (y1, "1/8"), (y2, "2/8")])
    return Instance(mu, nu, name="example-2.2")


EXAMPLE_2_2_P1 = {(0, 0): Fraction(4, 8), (1, 3): Fraction(2, 8),
                  (1, 2): Fraction(1, 8), (1, 1): Fraction(1, 8)}
EXAMPLE_2_2_P2 = {(0, 0): Fraction(2, 8), (0, 2): Fraction(1, 8), (0, 1): Fraction(1, 8),
                  (1, 0): Fraction(2, 8), (1, 3): Fraction(2, 8)}


def table(entries: dict, n: int, m: int) -> tuple[tuple[Fraction, ...], ...]:
    return tuple(tuple(Fraction(entries.get((i, j), 0)) for j in range(m)) for i in range(n))


def _measure(weights: dict) -> DiscreteMeasure:
    items = sorted((p, w) for p, w in weights.items() if w)
    return DiscreteMeasure(tuple(p for p, _ in items), tuple(w for _, w in items))


def _random_masses(rng, k):
    raw = [rng.randint(1, 4) for _ in range(k)]
    s = sum(raw)
    return [Fraction(r, s) for r in raw]


def random_1d_martingale_pair(rng: random.Random, max_mu: int = 4, span: int = 6) -> Instance:
    """mu on a small integer grid; each atom either stays or splits into
    two grid points straddling it. nu has at most 2 * max_mu atoms."""
    k = rng.randint(1, max_mu)
    xs = rng.sample(range(-span, span + 1), k)
    mu_w = dict(zip(((Fraction(x),) for x in xs), _random_masses(rng, k)))
    nu_w = defaultdict(Fraction)
    for (x,), w in mu_w.items():
        if rng.random() < 0.2:
            nu_w[(x,)] += w
            continue
        a, b = rng.randint(1, 3), rng.randint(1, 3)
        nu_w[(x - a,)] += w * Fraction(b, a + b)
        nu_w[(x + b,)] += w * Fraction(a, a + b)
    return Instance(_measure(mu_w), _measure(dict(nu_w)))


def random_1d_pair(rng: random.Random, max_atoms: int = 5, span: int = 6) -> Instance:
    """Half the time a martingale pair, otherwise two independent measures
    (occasionally recentred so the means agree)."""
    if rng.random() < 0.5:
        return random_1d_martingale_pair(rng, max_mu=min(4, max_atoms), span=span)

    def draw():
        k = rng.randint(1, max_atoms)
        pts = rng.sample(range(-span, span + 1), k)
        return dict(zip(((Fraction(p),) for p in pts), _random_masses(rng, k)))

    mu_w, nu_w = draw(), draw()
    if rng.random() < 0.5:
        m_mu = sum(p[0] * w for p, w in mu_w.items())
        m_nu = sum(p[0] * w for p, w in nu_w.items())
        shift = m_mu - m_nu
        nu_w = {(p[0] + shift,): w for p, w in nu_w.items()}
    return Instance(_measure(mu_w), _measure(nu_w))


_DIRS = [(1, 0), (0, 1), (1, 1), (1, -1), (2, 1), (1, 2), (2, -1), (1, -2)]


def random_2d_martingale_pair(rng: random.Random, max_mu: int = 3, span: int = 3) -> Instance:
    """mu with up to ``max_mu`` atoms on an integer grid; each atom's mass is
    sent by one or two rounds of mean-preserving splits along lattice
    directions, so nu typically has 4-9 atoms, some shared with mu."""
    k = rng.randint(1, max_mu)
    cells = [(a, b) for a in range(-span, span + 1) for b in range(-span, span + 1)]
    xs = rng.sample(cells, k)
    mu_w = dict(zip((as_point(x) for x in xs), _random_masses(rng, k)))
    nu_w = defaultdict(Fraction)

    def split(x, w, depth):
        if depth == 0 or rng.random() < 0.25:
            nu_w[x] += w
            return
        dx, dy = rng.choice(_DIRS)
        a, b = rng.randint(1, 2), rng.randint(1, 2)
        lo = (x[0] - a * dx, x[1] - a * dy)
        hi = (x[0] + b * dx, x[1] + b * dy)
        split(lo, w * Fraction(b, a + b), depth - 1)
        split(hi, w * Fraction(a, a + b), depth - 1)

    for x, w in mu_w.items():
        split(x, w, rng.choice([1, 2]))
    return Instance(_measure(mu_w), _measure(dict(nu_w)))
