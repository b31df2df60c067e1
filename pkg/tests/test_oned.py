import random
from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

from motpave import coupling as cp
from motpave import oned
from motpave.errors import InstanceError, NotInConvexOrder
from motpave.instances import random_1d_martingale_pair
from motpave.measures import DiscreteMeasure


def test_potential_dirac(dirac0):
    U = oned.potential(dirac0)
    assert [U(t) for t in (-2, 0, 3)] == [2, 0, 3]


def test_potential_symmetric(sym1):
    U = oned.potential(sym1)
    # max(1, |t|)
    for t in (0, 1, -1, 2, -2, F(1, 2)):
        assert U(t) == max(1, abs(F(t)))
    assert U.slopes == (-1, 0, 1)


def test_potential_three_atoms():
    m = DiscreteMeasure.from_atoms([((-2,), "1/4"), ((0,), "1/2"), ((2,), "1/4")])
    assert oned.potential(m)(0) == 1


def test_potential_rejects_2d(ex22):
    with pytest.raises(InstanceError):
        oned.potential(ex22.mu)


def test_bj_dirac_split(dirac0, sym1):
    dec = oned.bj_decomposition(dirac0, sym1)
    (iv,) = dec.intervals
    assert (iv.left, iv.right) == (-1, 1)
    assert iv.left_in_J and iv.right_in_J
    assert dec.singletons == ()


def test_bj_identity(sym1):
    dec = oned.bj_decomposition(sym1, sym1)
    assert dec.intervals == () and dec.singletons == (0, 1)


def test_bj_wide(sym1, sym2):
    (iv,) = oned.bj_decomposition(sym1, sym2).intervals
    assert (iv.left, iv.right) == (-2, 2) and iv.mu_atoms == (0, 1)


def test_bj_two_components():
    mu = DiscreteMeasure.from_atoms([((-3,), "1/2"), ((3,), "1/2")])
    nu = DiscreteMeasure.from_atoms([((-4,), "1/4"), ((-2,), "1/4"), ((2,), "1/4"), ((4,), "1/4")])
    dec = oned.bj_decomposition(mu, nu)
    assert [(iv.left, iv.right) for iv in dec.intervals] == [(-4, -2), (2, 4)]
    assert oned.contact_points(mu, nu) == [-4, -2, 2, 4]


def test_bj_not_in_order(sym1, dirac0):
    with pytest.raises(NotInConvexOrder):
        oned.bj_decomposition(sym1, dirac0)


@given(st.integers(0, 10 ** 6))
def test_contact_points_are_barriers(seed):
    inst = random_1d_martingale_pair(random.Random(seed))
    ts = oned.contact_points(inst.mu, inst.nu)
    for Q in cp.sample_vertices(inst.mu, inst.nu, 6, seed):
        for i, (x,) in enumerate(inst.mu.points):
            for j in Q.support(i):
                (y,) = inst.nu.points[j]
                assert not any(min(x, y) < t < max(x, y) for t in ts)


@given(st.integers(0, 10 ** 6))
def test_intervals_disjoint_and_J_within_closure(seed):
    inst = random_1d_martingale_pair(random.Random(seed))
    dec = oned.bj_decomposition(inst.mu, inst.nu)
    ivs = dec.intervals
    for a, b in zip(ivs, ivs[1:]):
        assert a.right <= b.left
    ys = {p[0] for p in inst.nu.points}
    for iv in ivs:
        assert iv.mu_atoms
        for e in iv.J_endpoints:
            assert e in ys
