import pytest
from hypothesis import given, settings

from heunpainleve.errors import NoSubcaseApplies
from heunpainleve.heun_class import HeunOperator, Z
from heunpainleve.isomonodromy import (
    T,
    TimeFamily,
    condition_I,
    condition_II,
    condition_III,
    general_conditions,
    hamilton_rhs,
    hamiltonian,
    infer_scale,
    motion_from_c,
    select_subcase,
    verify_full_compatibility,
)
from heunpainleve.polyalg import RatFunc

from conftest import polynomials

EXPECTED = {
    "VI": ("A1", 1), "ndegV": ("Ap", 1), "degV": ("Aq", -1), "ndegIII'": ("Ap", 1),
    "degIII'1": ("Ap", 1), "degIII'2": ("Aq", RatFunc(1) / 2),
    "ddegIII'": ("Aq", RatFunc(1) / 2), "IV": ("Bp", -1), "P34": ("Bq", RatFunc(-1) / 2),
    "II": ("Bp", -1), "I": ("Bq", -2),
}


def test_subcases_and_scales(catalog_entries):
    for e in catalog_entries.values():
        tag, eps = EXPECTED[e.type.tag]
        found = select_subcase(e.family)
        assert [s.tag for s in found] == [tag], e.type.tag
        assert found[0].scale == eps
        assert infer_scale(e.family.op, tag, found[0].s) == eps


def test_subcase_conditions_vanish(catalog_entries):
    for e in catalog_entries.values():
        assert all(x.is_zero for x in general_conditions(e.family, e.data.c)), e.type.tag


def test_subcase_conditions_on_base_family(catalog_entries):
    # the subcase formulas are written for the base family, where ε = 1
    for e in catalog_entries.values():
        sc = e.subcase
        for cond in (condition_I, condition_II, condition_III):
            assert cond(e.family, sc).is_zero, (e.type.tag, cond.__name__)


def test_full_compatibility(catalog_entries):
    for e in catalog_entries.values():
        assert verify_full_compatibility(e.family, e.data)["ok"], e.type.tag


def test_unified_hamiltonian_agrees(catalog_entries):
    for e in catalog_entries.values():
        assert e.data.unified_agrees, e.type.tag


def test_motion_from_c_matches_hamilton(catalog_entries):
    for e in catalog_entries.values():
        ld, md = motion_from_c(e.family, e.data.c)
        hl, hm = hamilton_rhs(e.data.unified_H)
        assert ld == hl and md == hm, e.type.tag


def test_rescaled_family_chain_rule(catalog_entries):
    # the base family at ε = 1 gives H_b with H(t) = ε H_b(εt)
    for e in catalog_entries.values():
        eps = e.scale
        if eps == 1:
            continue
        base = TimeFamily(e.family.base(eps))
        sc = select_subcase(base)[0]
        assert sc.scale == 1 and sc.tag == e.subcase.tag
        hb = hamiltonian(base, sc).H
        assert e.data.H == eps * hb.subs("t", eps * T), e.type.tag
        lb, mb = hamilton_rhs(hb)
        le, me = hamilton_rhs(e.data.H)
        assert le == eps * lb.subs("t", eps * T)
        assert me == eps * mb.subs("t", eps * T)


def test_pinned_scale_filters():
    from heunpainleve.painleve_catalog import entry

    fam = entry("II").family
    assert select_subcase(TimeFamily(fam.op, scale=-1))[0].scale == -1
    with pytest.raises(NoSubcaseApplies):
        select_subcase(TimeFamily(fam.op, scale=3))


def test_time_free_family_has_no_subcase():
    op = HeunOperator.build([0, 1], 1 + Z, RatFunc(2))
    with pytest.raises(NoSubcaseApplies):
        select_subcase(TimeFamily(op))


@settings(max_examples=30)
@given(polynomials(("lam", "mu", "t"), max_degree=2, max_terms=4))
def test_hamilton_rhs_is_symplectic_gradient(H):
    ld, md = hamilton_rhs(H)
    assert ld == H.diff("mu") and md == -H.diff("lam")
    assert ld.diff("lam") + md.diff("mu") == 0
