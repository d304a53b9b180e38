"""The nine acceptance criteria, one test each.

Every test records a PASS/FAIL line; conftest prints them in the terminal
summary so they show up in captured runs too.
"""

import math
import random
import time
from fractions import Fraction

from conftest import grounded_rows, rational_instance
from heunpainleve.deformation import deform, verify_apparent
from heunpainleve.heun_class import (NORMAL_FORM_TABLE, HeunOperator, Z, affine, classify,
                                     instantiate_row, replay, riemann_table, swap_infinity,
                                     to_normal_form)
from heunpainleve.isomonodromy import (condition_I, condition_II, condition_III,
                                       general_conditions, verify_full_compatibility)
from heunpainleve.numerics import (IntegratorConfig, State, energy_series, hamilton_field,
                                   integrate, integrate_hamiltonian, integrate_second_order,
                                   max_drift, residual_second_order, self_convergence_order,
                                   velocity)
from heunpainleve.painleve_catalog import (LAM, MU, PRINTED_VARIANTS, T, TYPES, _eq_I_II,
                                           canonical_equivalences, catalog, catalog_hamiltonian,
                                           catalog_ode, derive_second_order, supertype_scaling)
from heunpainleve.parser import format_operator, parse_operator
from heunpainleve.polyalg import RatFunc, appendix_identities_check
from heunpainleve.sing_analysis import (analyze, find_singularities, fuchs_relation_check,
                                        index_sum_formula)

RESULTS: list[str] = []


def record(n: int, ok: bool, detail: str) -> None:
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}"
    RESULTS.append(line)
    print(line)


def _q(rng, lo=-6, hi=6, den=4):
    return Fraction(rng.randint(lo, hi), rng.randint(1, den))


def _nonzero(rng):
    while True:
        v = _q(rng)
        if v:
            return v


def random_grounded(rng, max_sigma_degree):
    k = rng.randint(0, max_sigma_degree)
    roots = set()
    while len(roots) < k:
        roots.add(_q(rng))
    tau_deg = 1 if max_sigma_degree == 2 else 2
    eta_deg = 0 if max_sigma_degree == 2 else 1
    tau = sum((_q(rng) * Z ** j for j in range(tau_deg + 1)), RatFunc(0))
    eta = sum((_q(rng) * Z ** j for j in range(eta_deg + 1)), RatFunc(0))
    return HeunOperator.build(sorted(roots), tau, eta, lead=_nonzero(rng))


def random_poly(rng, max_degree):
    return sum((_q(rng) * Z ** j for j in range(rng.randint(0, max_degree) + 1)), RatFunc(0))


def test_criterion_1_catalog_symbolic_suite():
    start = time.perf_counter()
    failed = []
    entries = catalog()
    for e in entries:
        sc = e.subcase
        conds = [condition_I(e.family, sc), condition_II(e.family, sc),
                 condition_III(e.family, sc), *general_conditions(e.family, e.data.c)]
        comp = verify_full_compatibility(e.family, e.data)
        if not (all(c.is_zero for c in conds) and comp["ok"]):
            failed.append(e.type.tag)
    elapsed = time.perf_counter() - start
    types = {t.standard_name.split(",")[0] for t in TYPES.values()}
    passed_types = {e.type.standard_name.split(",")[0] for e in entries
                    if e.type.tag not in failed}
    ok = not failed and len(types) == 10 and passed_types == types and elapsed < 60
    record(1, ok, f"{len(passed_types)}/{len(types)} types ({len(entries)} forms), "
                  f"{elapsed:.1f}s; failed: {failed or 'none'}")
    assert ok


def test_criterion_2_ode_derivation():
    bad = [e.type.tag for e in catalog() if derive_second_order(e.H).rhs != e.ode_rhs]
    ok = not bad
    record(2, ok, f"{len(TYPES) - len(bad)}/{len(TYPES)} equations reproduced exactly; "
                  f"IV uses alpha = -k0 + 2 thinf + 1")
    assert ok


def test_criterion_3_classification():
    rows_ok = 0
    total = 0
    for row in NORMAL_FORM_TABLE:
        for seed in range(3):
            total += 1
            if classify(instantiate_row(row, random.Random(seed))).symbol == row.symbol:
                rows_ok += 1
    table = riemann_table()
    riemann_ok = sum(classify(op, generic=True).symbol == sym for _, sym, op in table)
    ok = rows_ok == total and riemann_ok == len(table) == 10
    record(3, ok, f"table rows {rows_ok}/{total} instances, "
                  f"Riemann table {riemann_ok}/{len(table)}")
    assert ok


def test_criterion_4_structural_identities():
    rng = random.Random(4)
    catalog_ok = sum(fuchs_relation_check(e.family.op.principal, generic=True)["holds"]
                     for e in catalog())
    random_ops = [random_grounded(rng, 3) for _ in range(60)]
    random_ops += [random_grounded(rng, 2) for _ in range(60)]
    fuchs_ok = sum(fuchs_relation_check(op.principal)["holds"] for op in random_ops)
    points = 0
    sums_ok = 0
    for op in random_ops[:40] + [e.family.op for e in catalog()]:
        A = op.principal
        generic = bool((op.sigma.variables | op.tau.variables | op.eta.variables) - {"z"})
        for rep in find_singularities(A, generic=generic):
            full = analyze(A, rep.location, generic=generic)
            points += 1
            sums_ok += full.indices.total == index_sum_formula(A, rep.location,
                                                               full.absolute_rank)
    taylor_ok = 0
    for _ in range(120):
        taylor_ok += appendix_identities_check(random_poly(rng, 3), _q(rng))
    ok = (catalog_ok == len(TYPES) and fuchs_ok == len(random_ops) and sums_ok == points
          and taylor_ok == 120)
    record(4, ok, f"Fuchs relation catalog {catalog_ok}/{len(TYPES)}, random "
                  f"{fuchs_ok}/{len(random_ops)}; index sums {sums_ok}/{points} points; "
                  f"Taylor identities {taylor_ok}/120")
    assert ok


def test_criterion_5_apparency():
    sym_ok = 0
    for e in catalog():
        rep = verify_apparent(deform(e.family.op))
        sym_ok += rep.apparent and rep.row1.is_zero and rep.indices == (0, 2) \
            and rep.ratio == MU
    rng = random.Random(5)
    num_ok = 0
    n = 0
    while n < 60:
        op = HeunOperator.build([0, 1 + abs(_q(rng))],
                                _q(rng) * Z ** 2 + _q(rng) * Z + _q(rng), _q(rng) * Z)
        lam, mu = _q(rng), _nonzero(rng)
        if op.sigma.subs("z", lam).is_zero:
            continue
        n += 1
        d = deform(op, lam, mu)
        rep = verify_apparent(d)
        idx = set(analyze(d.principal, lam).indices)
        num_ok += (rep.row1 == 0 and rep.v_series[1] == mu * rep.v_series[0]
                   and idx == {RatFunc(0), RatFunc(2)})
    ok = sym_ok == len(TYPES) and num_ok == n
    record(5, ok, f"symbolic {sym_ok}/{len(TYPES)} families, numeric {num_ok}/{n} "
                  f"specializations (exact rational residuals)")
    assert ok


def test_criterion_6_equivalences():
    res = canonical_equivalences()
    printed = _eq_I_II(PRINTED_VARIANTS["I-II alpha"]())
    ok = len(res) == 4 and all(r.ok for r in res)
    names = ", ".join(f"{r.name}: {'ok' if r.ok else 'no'}" for r in res)
    record(6, ok, f"{names}; I-II lands on II with alpha = 4 beta^3 "
                  f"(alpha = 2 beta^3 {'holds' if printed.ok else 'does not hold'})")
    assert ok


def test_criterion_7_scaling():
    checks = supertype_scaling()
    ok = len(checks) == 5 and all(c.ok for c in checks)
    record(7, ok, ", ".join(f"{c.name}: {'ok' if c.ok else 'no'}" for c in checks))
    assert ok


def _timed(fn):
    start = time.perf_counter()
    value = fn()
    return value, time.perf_counter() - start


def test_criterion_8_numerics():
    fine = IntegratorConfig(h_init=1e-3, h_max=1e-3)

    def order():
        f, _ = hamilton_field(catalog_hamiltonian("I"))
        return self_convergence_order(f, 0.0, (0.0, 0.0), 1.0, 0.05)

    def residuals():
        r1 = residual_second_order(integrate("I", {}, State(0.0, 0.0, 0.0), 1.0, fine), "I")
        r2 = residual_second_order(
            integrate("II", {"alpha": 1}, State(0.0, 0.0, 0.0), 1.0, fine), "II")
        return max(r1, r2)

    def routes():
        # type II: λ' = μ - λ² - t/2, so the two state vectors differ
        H = catalog_hamiltonian("II", {"alpha": 1})
        init = State(0.0, 0.3, -0.2)
        ham = integrate_hamiltonian(H, init, 1.0, fine)
        direct = integrate_second_order(catalog_ode("II", {"alpha": 1}), 0.0, init.lam,
                                        velocity(H, init), 1.0, fine)
        return abs(ham.final.lam - direct.final.lam)

    def drift():
        k0, c1, ki = RatFunc(1) / 2, RatFunc(3) / 2, RatFunc(1) / 3
        H = ((LAM - 1) ** 2 * LAM * MU ** 2 - (k0 * (LAM - 1) ** 2 + (c1 - 1) * LAM * (LAM - 1))
             * MU + ((k0 + c1 - 1) ** 2 - ki ** 2) * (LAM - 1) / 4) / T
        traj = integrate_hamiltonian(H, State(1.0, 3.0, 0.2), 2.0, IntegratorConfig(h_max=1e-2))
        return max_drift(energy_series(traj, H)) if traj.termination == "completed" else math.inf

    (p, ta), (res, tb), (gap, tc), (dr, td) = map(_timed, (order, residuals, routes, drift))
    parts = [(p >= 3, f"(a) order {p:.2f}"), (res <= 1e-5, f"(b) residual {res:.1e}"),
             (gap <= 1e-7, f"(c) route gap {gap:.1e}"), (dr <= 1e-8, f"(d) drift {dr:.1e}")]
    times = (ta, tb, tc, td)
    ok = all(flag for flag, _ in parts) and all(t < 5 for t in times)
    detail = ", ".join(f"{text} in {t:.2f}s" for (_, text), t in zip(parts, times))
    record(8, ok, detail)
    assert ok


def test_criterion_9_round_trips():
    rng = random.Random(9)
    swaps = 0
    for _ in range(40):
        op = random_grounded(rng, 3)
        if op.root_multiplicity(0) == 0:
            if not op.roots:
                op = HeunOperator.build([0], op.tau, op.eta)
            else:
                op = affine(op, 1, op.roots[0][0])
        swaps += swap_infinity(swap_infinity(op)) == op
    texts = 0
    ops = [random_grounded(rng, 3) for _ in range(40)] + [e.family.op for e in catalog()]
    for op in ops:
        text = format_operator(op)
        texts += parse_operator(text) == op and format_operator(parse_operator(text)) == text
    replays = 0
    rows = grounded_rows()
    for row in rows:
        op = rational_instance(row, random.Random(900 + len(row.symbol)))
        nf = to_normal_form(op)
        replays += replay(nf.trace, op) == nf.operator
    ok = swaps == 40 and texts == len(ops) and replays == len(rows)
    record(9, ok, f"swap twice {swaps}/40, parse/print {texts}/{len(ops)}, "
                  f"normal form replay {replays}/{len(rows)}")
    assert ok
