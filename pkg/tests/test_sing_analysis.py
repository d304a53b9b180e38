from fractions import Fraction

import pytest
from hypothesis import given, settings

from heunpainleve.errors import IrrationalBranch, RankBelowTwo
from heunpainleve.polyalg import INF, RatFunc, degree_or_neg_inf, laurent
from heunpainleve.sing_analysis import (PrincipalOperator, absolute_rank, analyze,
                                        find_singularities, frobenius_attempt,
                                        fuchs_relation_check, index_sum_formula,
                                        is_nonlogarithmic, quadratic_substitution, rank,
                                        reduce_at, residual_order, rounded_rank,
                                        sandwich_exp, sandwich_power, thome)

from conftest import grounded_operators, nonzero_rationals, rationals

z = RatFunc("z")


def fuchsian_with_indices(r1, r2):
    """∂² + p∂ + q with indices r1, r2 at 0 and a Fuchsian infinity."""
    return PrincipalOperator((1 - r1 - r2) / z, r1 * r2 / z ** 2)


def test_rank_values():
    A = PrincipalOperator((3 * z ** 2 + 1) / z ** 3, (2 * z - 2) / z ** 6)
    assert rank(A, 0) == 3 and rounded_rank(A, 0) == 3
    assert rank(A, INF) == 1
    B = PrincipalOperator(1 / z, (1 + z) / z ** 3)
    assert rank(B, 0) == Fraction(3, 2) and absolute_rank(B, 0) == Fraction(3, 2)
    airy = PrincipalOperator(RatFunc(0), -z)
    assert rank(airy, INF) == Fraction(5, 2)


@given(rationals, rationals, nonzero_rationals)
@settings(max_examples=30)
def test_power_sandwich_shifts_indices(r1, r2, kappa):
    A = fuchsian_with_indices(r1, r2)
    at0 = analyze(sandwich_power(A, 0, kappa), 0)
    shifted = {r1 - kappa, r2 - kappa}
    # an Euler operator with indices {0, 1} is ∂², so 0 becomes ordinary
    assert at0.rank == (0 if shifted == {0, 1} else 1)
    assert set(at0.indices) == {RatFunc(s) for s in shifted}
    inf_before = analyze(A, INF).indices
    inf_after = analyze(sandwich_power(A, INF, kappa), INF).indices
    assert inf_after.total == inf_before.total + 2 * kappa


@given(nonzero_rationals, nonzero_rationals)
@settings(max_examples=20)
def test_power_sandwich_keeps_irregular_rank(kappa, c):
    A = PrincipalOperator((3 * z ** 2 + 1) / z ** 3, (2 * z + c) / z ** 6)
    assert rank(sandwich_power(A, 0, kappa), 0) == rank(A, 0)


@given(nonzero_rationals)
@settings(max_examples=20)
def test_exp_sandwich_preserves_low_coefficients(kappa):
    A = PrincipalOperator((3 * z ** 2 + 1) / z ** 4, (2 * z - 2) / z ** 8)
    assert rank(A, 0) == 4
    B = sandwich_exp(A, 0, kappa, 2)
    assert rank(B, 0) == rank(A, 0)
    lp = lambda f, k: laurent(f, 0, k, k)[k]
    assert lp(B.p, -1) == lp(A.p, -1)
    assert lp(B.q, -1) == lp(A.q, -1) and lp(B.q, -2) == lp(A.q, -2)


def test_reduce_at_integer_rank_degree_bounds():
    A = PrincipalOperator((3 * z ** 2 + 1) / z ** 3, (2 * z - 2) / z ** 6)
    red = reduce_at(A, 0)
    assert red.absolute_rank == 3 and len(red.branches) == 2
    for br in red.branches:
        dp = degree_or_neg_inf(br.operator.p, 0)
        dq = degree_or_neg_inf(br.operator.q, 0)
        assert dp == 3 >= dq
        assert rank(br.operator, 0) == 3
        assert br.record.replay(A) == br.operator


def test_reduce_at_half_integer_rank_degree_bounds():
    B = PrincipalOperator(1 / z, (1 + z) / z ** 3)
    red = reduce_at(B, 0)
    assert len(red.branches) == 1
    op = red.branches[0].operator
    assert degree_or_neg_inf(op.p, 0) <= 0
    assert Fraction(degree_or_neg_inf(op.q, 0), 2) == Fraction(3, 2)


def test_reduce_at_errors():
    with pytest.raises(RankBelowTwo):
        reduce_at(fuchsian_with_indices(Fraction(1, 2), 0), 0)
    with pytest.raises(IrrationalBranch):
        reduce_at(PrincipalOperator((3 * z ** 2 + 1) / z ** 3, (2 * z + 5) / z ** 6), 0)


@given(rationals, rationals)
@settings(max_examples=30)
def test_quadratic_substitution_doubles_indices(r1, r2):
    A = fuchsian_with_indices(r1, r2)
    Q = quadratic_substitution(A)
    assert set(analyze(Q, 0).indices) == {RatFunc(2 * r1), RatFunc(2 * r2)}
    # invariant under y -> -y: p odd, q even
    assert Q.p.subs("z", -z) == -Q.p and Q.q.subs("z", -z) == Q.q


@pytest.mark.parametrize("op, point", [
    (PrincipalOperator((3 * z ** 2 + 1) / z ** 3, (2 * z - 2) / z ** 6), 0),
    (PrincipalOperator(RatFunc(0), -z), INF),
    (PrincipalOperator(1 / z, (1 + z) / z ** 3), 0),
])
def test_thome_residual_order(op, point):
    N = 10
    rk = rank(op, point)
    for sol in thome(op, point, N):
        assert residual_order(sol) >= N - 2 * rk


def test_frobenius_and_logarithms():
    C = fuchsian_with_indices(Fraction(2, 3), Fraction(-1, 3))
    assert not frobenius_attempt(C, 6).exists
    assert is_nonlogarithmic(C, 0, 6)
    # indices 0 and 1 with q_{-1} != 0 forces a logarithm
    L = PrincipalOperator(RatFunc(0), 1 / z)
    assert not is_nonlogarithmic(L, 0, 6)
    assert is_nonlogarithmic(PrincipalOperator(RatFunc(0), RatFunc(0)), 0, 6)


@given(grounded_operators(max_sigma_degree=3))
@settings(max_examples=60)
def test_fuchs_relation_random_m3(op):
    assert fuchs_relation_check(op.principal)["holds"]


@given(grounded_operators(max_sigma_degree=2))
@settings(max_examples=40)
def test_fuchs_relation_random_m2(op):
    assert fuchs_relation_check(op.principal)["holds"]


@given(grounded_operators())
@settings(max_examples=30)
def test_index_sum_formulas(op):
    A = op.principal
    for rep in find_singularities(A):
        full = analyze(A, rep.location)
        assert full.indices.total == index_sum_formula(A, rep.location, full.absolute_rank)


def test_fuchs_relation_on_catalog(catalog_entries):
    for tag, e in catalog_entries.items():
        res = fuchs_relation_check(e.family.op.principal, generic=True)
        assert res["holds"], tag
