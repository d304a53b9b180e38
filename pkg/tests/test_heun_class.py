import math
from fractions import Fraction

import pytest
from hypothesis import given, settings

from heunpainleve.errors import NotHeunClass, RootNotAtOrigin, SigmaNotFactored
from heunpainleve.heun_class import (NORMAL_FORM_TABLE, HeunOperator, Z, affine, classify,
                                     heun_sandwich, instantiate_row, mn_class_membership,
                                     replay, riemann_table, swap_infinity,
                                     swap_mapping_properties, to_normal_form)
from heunpainleve.polyalg import RatFunc

from conftest import grounded_operators, grounded_rows, rational_instance, rng_from

ROW_SYMBOLS = sorted({r.symbol for r in NORMAL_FORM_TABLE})


@pytest.mark.parametrize("row", NORMAL_FORM_TABLE, ids=lambda r: f"{r.symbol}{r.variety}")
@pytest.mark.parametrize("seed", range(3))
def test_table_rows_classify_to_their_symbol(row, seed):
    op = instantiate_row(row, rng_from(seed))
    sym = classify(op)
    assert sym.symbol == row.symbol
    assert sum(math.ceil(r) for r in sym.finite_ranks) + math.ceil(sym.infinity_rank) <= 4


@pytest.mark.parametrize("name, symbol, op", riemann_table(), ids=lambda x: str(x)[:12])
def test_riemann_table(name, symbol, op):
    sym = classify(op, generic=True)
    assert sym.riemann_reducible
    assert sym.symbol == symbol
    assert sym.riemann_row.split()[0] == name.split()[0] or sym.riemann_row == name


@given(grounded_operators())
@settings(max_examples=40)
def test_swap_twice_is_identity(op):
    if op.root_multiplicity(0) == 0:
        if not op.roots:
            return
        op = affine(op, 1, op.roots[0][0])
    once = swap_infinity(op)
    assert mn_class_membership(once.principal, 3)["in_class"]
    assert swap_infinity(once) == op


@given(grounded_operators())
@settings(max_examples=25)
def test_swap_exchanges_zero_and_infinity(op):
    if not op.roots:
        return
    op = affine(op, 1, op.roots[0][0])
    before = classify(op)
    after = classify(swap_infinity(op))
    assert before.multiset == after.multiset
    ranks = dict((str(p), r) for p, r in before.points)
    ranks_after = dict((str(p), r) for p, r in after.points)
    assert ranks["0"] == ranks_after["oo"] and ranks["oo"] == ranks_after["0"]


def test_swap_mapping_properties_agree():
    op = HeunOperator.build([0, 1, 3], Z ** 2 - 2 * Z + 1, 2 * Z + 5)
    props = swap_mapping_properties(op)
    assert all(v["agree"] for v in props.values())


def test_swap_needs_root_at_origin():
    with pytest.raises(RootNotAtOrigin):
        swap_infinity(HeunOperator.build([1], Z, RatFunc(1)))


@pytest.mark.parametrize("row", grounded_rows(), ids=lambda r: r.symbol + r.variety)
@pytest.mark.parametrize("seed", range(2))
def test_normal_form_preserves_type_and_replays(row, seed):
    rng = rng_from(100 + seed)
    op = rational_instance(row, rng)
    op = affine(op, Fraction(rng.randint(1, 4), rng.choice([1, -1, 3])), rng.randint(-3, 3))
    simple = [r for r, m in op.roots if m == 1]
    if simple:
        op = heun_sandwich(op, Fraction(rng.randint(1, 5), 2) / (Z - simple[0]))
    nf = to_normal_form(op)
    assert replay(nf.trace, op) == nf.operator
    before, after = classify(op), classify(nf.operator)
    assert before.multiset == after.multiset and before.name == after.name
    if not before.riemann_reducible:
        assert nf.type == after.symbol


def test_heun_operator_validation():
    with pytest.raises(NotHeunClass):
        HeunOperator.build([0, 1, 2, 3], RatFunc(0), RatFunc(0))
    with pytest.raises(NotHeunClass):
        HeunOperator.build([0], Z ** 3, RatFunc(0))
    with pytest.raises(SigmaNotFactored):
        HeunOperator.build([Z], RatFunc(0), RatFunc(0))


def test_mn_membership():
    op = HeunOperator.build([0, 1, 3], Z ** 2, Z)
    assert mn_class_membership(op.principal, 3)["in_class"]
