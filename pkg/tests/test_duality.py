import random
from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

from motpave import coupling as cp
from motpave import duality as du
from motpave.errors import InstanceError
from motpave.instances import EXAMPLE_2_2_P1, EXAMPLE_2_2_P2, random_2d_martingale_pair, table
from motpave.measures import DiscreteMeasure, PiecewiseAffineConvex

ABS = PiecewiseAffineConvex.from_pieces([((-1,), 0), ((1,), 0)])


def _eq(mu, nu):
    return du.CostFunction.from_function(mu, nu, lambda x, y: int(x == y))


def _ne(mu, nu):
    return du.CostFunction.from_function(mu, nu, lambda x, y: int(x != y))


def _zero(mu, nu):
    return du.CostFunction.from_function(mu, nu, lambda x, y: 0)


def test_zero_cost(ex22):
    c = _zero(ex22.mu, ex22.nu)
    assert du.primal_value(c, ex22.mu, ex22.nu).value == 0
    assert du.dual_value_pointwise(c, ex22.mu, ex22.nu).value == 0
    assert du.dual_value_quasisure(c, ex22.mu, ex22.nu).value == 0


def test_primal_indicator_costs(ex22):
    r1 = du.primal_value(_eq(ex22.mu, ex22.nu), ex22.mu, ex22.nu)
    assert r1.value == F(1, 2) and r1.coupling.p == table(EXAMPLE_2_2_P1, 2, 4)
    r2 = du.primal_value(_ne(ex22.mu, ex22.nu), ex22.mu, ex22.nu)
    assert r2.value == F(3, 4) and r2.coupling.p == table(EXAMPLE_2_2_P2, 2, 4)


def test_dual_values_example(ex22):
    c = _eq(ex22.mu, ex22.nu)
    pw = du.dual_value_pointwise(c, ex22.mu, ex22.nu)
    qs = du.dual_value_quasisure(c, ex22.mu, ex22.nu)
    assert pw.value == qs.value == F(1, 2)
    assert pw.certificate.value(ex22.mu, ex22.nu) == F(1, 2)
    assert not pw.certificate.violations(c, ex22.mu, ex22.nu)
    assert (0, 3) not in qs.certificate.constraint_set


def test_gap_witness_example(ex22):
    c = du.gap_witness_cost(ex22.mu, ex22.nu, (0, 3))
    assert du.dual_value_pointwise(c, ex22.mu, ex22.nu).value is du.INF
    qs = du.dual_value_quasisure(c, ex22.mu, ex22.nu)
    assert qs.value == 0
    cert = qs.certificate
    assert all(v == 0 for v in cert.phi + cert.psi)
    assert du.primal_value(c, ex22.mu, ex22.nu).value == 0


def test_infinite_cost_on_charged_pair(ex22):
    c = du.gap_witness_cost(ex22.mu, ex22.nu, (1, 0))
    r = du.primal_value(c, ex22.mu, ex22.nu)
    assert r.value is du.INF and r.offending == (1, 0)
    assert du.dual_value_quasisure(c, ex22.mu, ex22.nu).value is du.INF


def test_cost_parsing():
    c = du.CostFunction.from_rows([["1/2", "inf"], ["0.25", 3]])
    assert c.table == ((F(1, 2), du.INF), (F(1, 4), F(3)))
    with pytest.raises(InstanceError):
        du.CostFunction.from_rows([["-1"]])


def test_shape_mismatch(ex22):
    with pytest.raises(InstanceError):
        du.primal_value(du.CostFunction.from_rows([["0"]]), ex22.mu, ex22.nu)


def test_nonnegative_shift(ex22):
    c = _ne(ex22.mu, ex22.nu)
    cert = du.dual_value_pointwise(c, ex22.mu, ex22.nu).certificate
    try:
        shifted = cert.shifted_nonnegative()
    except ValueError:
        return
    assert min(shifted.phi) == 0 and min(shifted.psi) >= 0
    assert shifted.value(ex22.mu, ex22.nu) == cert.value(ex22.mu, ex22.nu)
    assert not shifted.violations(c, ex22.mu, ex22.nu)


def test_tangent_affine_is_zero(ex22):
    f = PiecewiseAffineConvex.from_pieces([((3, -1), 2)])
    T = du.tangent_transform(f, ex22.mu, ex22.nu)
    assert all(v == 0 for row in T.table for v in row)
    assert du.nu_ominus_mu(f, ex22.mu, ex22.nu) == 0


def test_tangent_abs_value():
    mu = DiscreteMeasure.from_atoms([((1,), "1/2"), ((-1,), "1/2")])
    nu = DiscreteMeasure.from_atoms([((-1,), "1/2"), ((1,), "1/2")])
    T = du.tangent_transform(ABS, mu, nu)
    # x = 1, y = -1: 1 - 1 - 1 * (-2) = 2
    assert T.table[0][0] == 2
    assert T.table[0][1] == 0 and T.table[1][0] == 0


def test_nu_ominus_mu_abs(dirac0, sym1):
    assert du.nu_ominus_mu(ABS, dirac0, sym1) == 1


def test_nu_ominus_mu_l1_example(ex22):
    f = PiecewiseAffineConvex.from_pieces(
        [((sx, sy), -sx * F(1, 2)) for sx in (-1, 1) for sy in (-1, 1)])
    assert f((F(1, 2), 0)) == 0 and f((0, 1)) == F(3, 2)
    assert du.nu_ominus_mu(f, ex22.mu, ex22.nu) >= 0


@given(st.integers(0, 10 ** 6))
def test_tangent_identity_random(seed):
    rng = random.Random(seed)
    inst = random_2d_martingale_pair(rng)
    pieces = [((rng.randint(-3, 3), rng.randint(-3, 3)), F(rng.randint(-4, 4), rng.randint(1, 3)))
              for _ in range(rng.randint(1, 4))]
    f = PiecewiseAffineConvex.from_pieces(pieces)
    T = du.tangent_transform(f, inst.mu, inst.nu)
    target = du.nu_ominus_mu(f, inst.mu, inst.nu)
    assert target >= 0
    for Q in cp.sample_vertices(inst.mu, inst.nu, 4, seed):
        assert Q.expectation(T.table) == target
    assert all(v >= 0 for row in T.table for v in row)
    for i, x in enumerate(inst.mu.points):
        if x in inst.nu.points:
            assert T.table[i][inst.nu.points.index(x)] == 0


@given(st.integers(0, 10 ** 6))
def test_affine_shift_leaves_tangent_table_unchanged(seed):
    rng = random.Random(seed)
    inst = random_2d_martingale_pair(rng)
    pieces = [((rng.randint(-3, 3), rng.randint(-3, 3)), rng.randint(-4, 4)) for _ in range(3)]
    a, b = (rng.randint(-2, 2), rng.randint(-2, 2)), rng.randint(-5, 5)
    f = PiecewiseAffineConvex.from_pieces(pieces)
    g = PiecewiseAffineConvex.from_pieces([((s[0] + a[0], s[1] + a[1]), c + b) for s, c in pieces])
    assert du.tangent_transform(f, inst.mu, inst.nu).table == du.tangent_transform(g, inst.mu, inst.nu).table
    assert du.nu_ominus_mu(f, inst.mu, inst.nu) == du.nu_ominus_mu(g, inst.mu, inst.nu)


@given(st.integers(0, 10 ** 6))
def test_sandwich_random_costs(seed):
    rng = random.Random(seed)
    inst = random_2d_martingale_pair(rng)
    c = du.CostFunction.from_rows([[F(rng.randint(0, 9), rng.randint(1, 4)) for _ in inst.nu.points]
                                   for _ in inst.mu.points])
    phat = cp.maximal_support_coupling(inst.mu, inst.nu)
    p = du.primal_value(c, inst.mu, inst.nu, phat).value
    q = du.dual_value_quasisure(c, inst.mu, inst.nu, phat)
    w = du.dual_value_pointwise(c, inst.mu, inst.nu)
    assert p == q.value == w.value
    assert q.certificate.value(inst.mu, inst.nu) == p
