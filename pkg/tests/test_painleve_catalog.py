import pytest
from hypothesis import given, settings, strategies as st

from conftest import nonzero_rationals, polynomials
from heunpainleve.errors import NotAutonomousShape, NotQuadraticInMu, UnknownType
from heunpainleve.painleve_catalog import (
    LAM,
    LAMP,
    MU,
    PRINTED_VARIANTS,
    T,
    TYPES,
    _eq_degV,
    _eq_I_II,
    canonical_equivalences,
    catalog_dump,
    catalog_ode,
    derive_second_order,
    entry,
    general_forms_consistent,
    resolve_type,
    solve_quadrature,
    split_quadratic,
    supertype_reductions,
    supertype_scaling,
    verify_entry,
)
from heunpainleve.polyalg import RatFunc


def _v(name):
    return RatFunc(name)


def test_every_entry_verifies(catalog_entries):
    assert len(catalog_entries) == 11
    for e in catalog_entries.values():
        rep = verify_entry(e)
        assert rep.ok, (rep.tag, rep.details)


def test_ten_types_in_eleven_forms():
    assert len(TYPES) == 11
    names = {t.standard_name.split(",")[0] for t in TYPES.values()}
    assert len(names) == 10


def test_aliases_and_unknown():
    assert resolve_type("V") == "ndegV"
    assert resolve_type("34") == "P34"
    with pytest.raises(UnknownType):
        entry("VII")
    with pytest.raises(UnknownType):
        entry("II", {"zeta": 1})


@settings(max_examples=40)
@given(polynomials(("lam", "t"), max_degree=2, max_terms=3),
       polynomials(("lam", "t"), max_degree=2, max_terms=3),
       polynomials(("lam", "t"), max_degree=3, max_terms=3),
       nonzero_rationals)
def test_elimination_matches_chain_rule(f, g, h, k):
    f = f * f + k  # keep f nonzero
    H = f * MU * MU / 2 + g * MU + h
    ld = H.diff("mu")
    md = -H.diff("lam")
    second = ld.diff("t") + ld.diff("lam") * ld + ld.diff("mu") * md
    mu_of = (LAMP - g) / f
    assert derive_second_order(H).rhs == second.subs("mu", mu_of)


def test_split_quadratic_errors():
    with pytest.raises(NotQuadraticInMu):
        split_quadratic(MU ** 3 + LAM)
    with pytest.raises(NotQuadraticInMu):
        split_quadratic(MU + LAM)
    with pytest.raises(NotQuadraticInMu):
        split_quadratic(MU ** 2 / (1 + MU))


def test_printed_iv_alpha_is_off_by_two():
    e = entry("IV")
    assert e.param_dict["alpha"] - PRINTED_VARIANTS["IV alpha"]() == 2
    printed = e.ode_generic.subs_many({"alpha": PRINTED_VARIANTS["IV alpha"](),
                                       "beta": e.param_dict["beta"]})
    assert derive_second_order(e.H).rhs - printed == -4 * LAM


def test_printed_i_ii_alpha_fails_equivalence():
    assert not _eq_I_II(PRINTED_VARIANTS["I-II alpha"]()).ok
    assert _eq_I_II(4 * _v("beta") ** 3).ok


def test_printed_degv_kinf_fails_equivalence():
    assert not _eq_degV(PRINTED_VARIANTS["degV kinf^2"]()).ok
    assert _eq_degV().ok


def test_printed_i_scale_disagrees():
    e = entry("I")
    assert e.printed_scale == PRINTED_VARIANTS["I scale"]() == -6
    assert e.scale == -2
    assert not verify_entry(e).scale_matches_printed
    assert verify_entry(entry("II")).scale_matches_printed


def test_canonical_equivalences():
    res = canonical_equivalences()
    assert len(res) == 4
    for r in res:
        assert r.ok, (r.name, r.notes)


def test_scaling_laws():
    checks = supertype_scaling()
    assert len(checks) == 5
    assert all(c.ok for c in checks), [(c.name, c.equation_ok, c.hamiltonian_ok) for c in checks]
    combined = supertype_scaling("III'")
    assert len(combined) == 3 and all(c.ok for c in combined)


@settings(max_examples=10)
@given(nonzero_rationals, nonzero_rationals)
def test_scaling_laws_at_numbers(eps, omega):
    assert all(c.ok for c in supertype_scaling(eps=eps, omega=omega))


def test_general_forms_consistent():
    for st_name in ("V", "III'", "IV-34", "I-II"):
        assert general_forms_consistent(st_name), st_name


def test_reductions():
    checks = supertype_reductions()
    assert len(checks) == 19
    assert all(c.ok for c in checks), [(c.target, c.level) for c in checks if not c.ok]
    negatives = [c for c in checks if not c.expected]
    assert negatives and not any(c.holds for c in negatives)


PH5 = (((LAM - 1) ** 2 * LAM * MU ** 2
        - (_v("k0") * (LAM - 1) ** 2 + (_v("c1") - 1) * LAM * (LAM - 1)) * MU
        + ((_v("k0") + _v("c1") - 1) ** 2 - _v("ki") ** 2) * (LAM - 1) / 4) / T)


def test_quadrature_reduction():
    q = solve_quadrature(PH5)
    assert q.m == 1 / T
    K = q.conserved(LAM, MU)
    # K Poisson-commutes with H
    assert K.diff("lam") * PH5.diff("mu") - K.diff("mu") * PH5.diff("lam") == 0
    # (dλ/ds)² with ds = m dt is g² - 2f(h - E) on the level set E = K
    dlam_ds = PH5.diff("mu") / q.m
    assert dlam_ds ** 2 == q.lam_s_squared.subs("E", K)


def test_quadrature_rejects_time_dependent_shape():
    with pytest.raises(NotAutonomousShape):
        solve_quadrature(entry("II").H)
    with pytest.raises(NotAutonomousShape):
        solve_quadrature(RatFunc(0))


@settings(max_examples=10)
@given(st.sampled_from(["II", "P34", "IV"]), nonzero_rationals)
def test_numeric_parameters_specialize(tag, value):
    name = {"II": "alpha", "P34": "k0", "IV": "k0"}[tag]
    e = entry(tag, {name: value})
    assert verify_entry(e).ok
    assert catalog_ode(tag, {name: value}) == e.ode_rhs


def test_catalog_dump_fields():
    rows = catalog_dump()
    assert [r["type"] for r in rows] == list(TYPES)
    for r in rows:
        for key in ("symbol", "sigma", "tau", "eta", "subcase", "scale", "H", "ode"):
            assert key in r
