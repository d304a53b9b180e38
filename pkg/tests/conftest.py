import random
from fractions import Fraction

import pytest
from hypothesis import settings, strategies as st

from heunpainleve.heun_class import NORMAL_FORM_TABLE, HeunOperator, Z, instantiate_row
from heunpainleve.painleve_catalog import TYPES, entry
from heunpainleve.polyalg import INF, RatFunc
from heunpainleve.sing_analysis import analyze

settings.register_profile("default", deadline=None)
settings.load_profile("default")

small_ints = st.integers(-6, 6)
nonzero_ints = st.integers(-6, 6).filter(bool)
rationals = st.builds(Fraction, small_ints, st.integers(1, 4))
nonzero_rationals = st.builds(Fraction, nonzero_ints, st.integers(1, 4))


@st.composite
def polynomials(draw, names=("z",), max_degree=3, max_terms=4):
    out = RatFunc(0)
    for _ in range(draw(st.integers(1, max_terms))):
        term = RatFunc(draw(nonzero_rationals))
        for n in names:
            term = term * RatFunc(n) ** draw(st.integers(0, max_degree))
        out = out + term
    return out


@st.composite
def rational_functions(draw, names=("z", "a")):
    num = draw(polynomials(names, max_degree=2, max_terms=3))
    den = draw(polynomials(names, max_degree=2, max_terms=3))
    if den.is_zero:
        den = RatFunc(1)
    return num / den


@st.composite
def grounded_operators(draw, max_sigma_degree=3):
    """Grounded M2/M3 operators: simple rational roots, deg τ ≤ 2, deg η ≤ 1."""
    k = draw(st.integers(0, max_sigma_degree))
    roots = draw(st.lists(rationals, min_size=k, max_size=k, unique=True))
    tau_deg = 1 if k <= 2 and max_sigma_degree == 2 else 2
    tau = sum((draw(rationals) * Z ** j for j in range(tau_deg + 1)), RatFunc(0))
    eta_deg = 0 if max_sigma_degree == 2 else 1
    eta = sum((draw(rationals) * Z ** j for j in range(eta_deg + 1)), RatFunc(0))
    return HeunOperator.build(roots, tau, eta, lead=draw(nonzero_rationals))


def rng_from(seed) -> random.Random:
    return random.Random(seed)


def grounded_rows():
    return [r for r in NORMAL_FORM_TABLE if min(r.eta_powers, default=0) >= 0]


def rational_instance(row, rng):
    """A row instance whose Fuchsian infinity (if any) has rational indices.

    The product of the indices at infinity is affine in the top η coefficient;
    it is solved for so that one index is a chosen rational.
    """
    op = instantiate_row(row, rng)
    rep = analyze(op.principal, INF)
    if rep.rounded_rank != 1 or rep.indices.roots is not None:
        return op
    top = max(row.eta_powers)
    base = HeunOperator(op.roots, op.lead, op.tau, op.eta - op.eta.coeff("z", top) * Z ** top)

    def product(b):
        trial = HeunOperator(base.roots, base.lead, base.tau, base.eta + b * Z ** top)
        return analyze(trial.principal, INF).indices

    p0, p1 = product(0), product(1)
    total = p0.total
    while True:
        rho = Fraction(rng.randint(-5, 5), rng.randint(1, 3))
        b = (rho * (total - rho) - p0.product) / (p1.product - p0.product)
        if b != 0:
            return HeunOperator(base.roots, base.lead, base.tau, base.eta + b * Z ** top)


@pytest.fixture(scope="session")
def catalog_entries():
    return {tag: entry(tag) for tag in TYPES}


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
