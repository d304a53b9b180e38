import json
import math

import pytest
from hypothesis import given, settings, strategies as st

from heunpainleve.errors import PoleProximity, StepUnderflow, TooFewSamples
from heunpainleve.numerics import (
    HAMILTON_VARS,
    CompiledRatFunc,
    HornerPoly,
    IntegratorConfig,
    State,
    Trajectory,
    energy_series,
    fd_derivatives,
    hamilton_field,
    integrate,
    integrate_hamiltonian,
    integrate_second_order,
    integrate_system,
    max_drift,
    residual_second_order,
    residual_series,
    self_convergence_order,
    velocity,
)
from heunpainleve.painleve_catalog import LAM, MU, T, catalog_hamiltonian, catalog_ode
from heunpainleve.polyalg import RatFunc

from conftest import polynomials

FINE = IntegratorConfig(h_init=1e-3, h_max=1e-3)

PH5 = (((LAM - 1) ** 2 * LAM * MU ** 2
        - (RatFunc("1/2") * (LAM - 1) ** 2 + RatFunc("1/2") * LAM * (LAM - 1)) * MU
        + ((RatFunc(1) + RatFunc("1/2") - 1) ** 2 - RatFunc("1/9")) * (LAM - 1) / 4) / T)


@settings(max_examples=40)
@given(polynomials(("t", "lam", "mu"), max_degree=3, max_terms=5),
       st.tuples(*[st.fractions(-2, 2, max_denominator=8)] * 3))
def test_horner_matches_exact_evaluation(p, pt):
    expected = float(p.subs_many(dict(zip(HAMILTON_VARS, pt))).to_fraction())
    got = HornerPoly(p, HAMILTON_VARS)(*map(float, pt))
    assert math.isclose(got, expected, rel_tol=1e-9, abs_tol=1e-9)


def test_horner_rejects_unbound_names():
    with pytest.raises(ValueError):
        HornerPoly(RatFunc("a*lam"), HAMILTON_VARS)


def test_config_validation():
    with pytest.raises(ValueError):
        IntegratorConfig(method="euler")
    with pytest.raises(ValueError):
        IntegratorConfig(abs_tol=0)
    with pytest.raises(ValueError):
        IntegratorConfig(h_init=1.0, h_max=0.1)
    with pytest.raises(ValueError):
        State(0.0, math.nan, 0.0)


def test_rk4_order_on_type_one():
    f, _ = hamilton_field(catalog_hamiltonian("I"))
    assert self_convergence_order(f, 0.0, (0.0, 0.0), 1.0, 0.05) >= 3


def test_rk4_exact_on_cubic_flow():
    # y' = 3t², z' = 0 is integrated exactly by a fourth-order method
    traj = integrate_system(lambda t, y, z: (3 * t * t, 0.0), 0.0, (0.0, 1.0), 2.0,
                            IntegratorConfig("rk4", h_init=0.1, h_max=0.1))
    assert abs(traj.final.lam - 8.0) < 1e-12
    assert traj.final.t == 2.0


@pytest.mark.parametrize("tag,params", [("I", {}), ("II", {"alpha": 1})])
def test_second_order_residual(tag, params):
    traj = integrate(tag, params, State(0.0, 0.0, 0.0), 1.0, FINE)
    assert traj.termination == "completed"
    assert residual_second_order(traj, tag) <= 1e-5


def test_residual_scales_quadratically():
    F = catalog_ode("I")
    res = []
    for h in (4e-3, 2e-3):
        cfg = IntegratorConfig(h_init=h, h_max=h)
        res.append(max(residual_series(integrate("I", {}, State(0.0, 0.1, 0.2), 1.0, cfg), F)))
    assert 3.0 < res[0] / res[1] < 5.0


def test_constant_trajectory_residual_is_rhs():
    traj = Trajectory([State(0.1 * k, 1.0, 0.0) for k in range(6)])
    F = catalog_ode("I")
    Fc = CompiledRatFunc(F, ("t", "lam", "lamp"))
    res = residual_series(traj, F)
    assert all(math.isclose(r, abs(Fc(0.1 * k, 1.0, 0.0)), rel_tol=1e-12)
               for k, r in zip(range(1, 5), res))


def test_fd_weights_exact_on_quadratics():
    ts = [0.0, 0.3, 0.7]
    ys = [2 * t * t - t + 1 for t in ts]
    d1, d2 = fd_derivatives(ts, ys, 1)
    assert math.isclose(d1, 4 * 0.3 - 1) and math.isclose(d2, 4.0)


def test_too_few_samples():
    with pytest.raises(TooFewSamples):
        residual_series(Trajectory([State(0.0, 0.0, 0.0)] * 4), catalog_ode("I"))


def test_hamilton_and_direct_routes_agree():
    H = catalog_hamiltonian("II", {"alpha": 1})
    init = State(0.0, 0.3, -0.2)
    ham = integrate_hamiltonian(H, init, 1.0, FINE)
    direct = integrate_second_order(catalog_ode("II", {"alpha": 1}), 0.0, init.lam,
                                    velocity(H, init), 1.0, FINE)
    assert abs(ham.final.lam - direct.final.lam) <= 1e-7


def test_zero_solution_of_homogeneous_two():
    traj = integrate_second_order(catalog_ode("II", {"alpha": 0}), 0.0, 0.0, 0.0, 1.0, FINE)
    assert all(s.lam == 0.0 for s in traj.samples)


def test_energy_conserved_on_quadrature_case():
    traj = integrate_hamiltonian(PH5, State(1.0, 3.0, 0.2), 2.0,
                                 IntegratorConfig(h_max=1e-2))
    assert traj.termination == "completed"
    assert max_drift(energy_series(traj, PH5)) <= 1e-8


def test_pole_guards():
    H = PH5
    with pytest.raises(PoleProximity):
        integrate_hamiltonian(H, State(0.0, 3.0, 0.2), 1.0)
    # integrating toward t = 0 trips the guard on 1/t
    traj = integrate_hamiltonian(H, State(1.0, 3.0, 0.2), -1.0)
    assert traj.termination == "pole_proximity"
    assert traj.final.t > 0
    with pytest.raises(PoleProximity):
        integrate_hamiltonian(H, State(1.0, 3.0, 0.2), -1.0, strict=True)


def test_step_underflow():
    cfg = IntegratorConfig(abs_tol=1e-16, rel_tol=1e-16, h_min=1e-3, h_init=1e-2)
    traj = integrate("I", {}, State(0.0, 1.0, 1.0), 1.0, cfg)
    assert traj.termination == "step_underflow"
    with pytest.raises(StepUnderflow):
        integrate("I", {}, State(0.0, 1.0, 1.0), 1.0, cfg, strict=True)


def test_step_budget():
    cfg = IntegratorConfig(h_init=1e-3, h_max=1e-3, max_steps=100)
    traj = integrate("I", {}, State(0.0, 0.0, 0.0), 1.0, cfg)
    assert traj.termination == "max_steps" and traj.accepted == 100
    with pytest.raises(ValueError):
        IntegratorConfig(max_steps=0)


def test_exports():
    traj = integrate("II", {"alpha": 1}, State(0.0, 0.0, 0.0), 0.1)
    rows = traj.to_csv().strip().splitlines()
    assert rows[0] == "t,lambda,mu" and len(rows) == len(traj.samples) + 1
    data = json.loads(traj.dumps())
    assert data["termination"] == "completed"
    assert data["meta"]["type"] == "II" and data["meta"]["params"] == {"alpha": "1"}
    assert data["step_stats"]["accepted"] == len(traj.samples) - 1
    assert data["config"]["method"] == "rkf45"
