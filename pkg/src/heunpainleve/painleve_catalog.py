"""The Heun to Painlevé catalog, second-order extraction, equivalences and scalings.

Each catalog entry starts from a printed Heun class family (σ, τ, η with the
free constant ``c``), runs it through :mod:`isomonodromy` and records the
resulting Hamiltonian next to the tabulated Hamiltonian and second-order
equation. Hamiltonians are compared modulo terms free of λ and μ.

Kernel variable names: ``lam``, ``mu``, ``t`` and ``lamp`` for dλ/dt. ODE
constants are ``alpha``, ``beta``, ``gamma``, ``delta`` (and ``rho`` for IV-34).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

from .errors import NotAutonomousShape, NotQuadraticInMu, UnknownType
from .heun_class import HeunOperator, Z
from .isomonodromy import (
    IsomonodromyData,
    Subcase,
    TimeFamily,
    general_conditions,
    hamiltonian,
    select_subcase,
    verify_full_compatibility,
)
from .polyalg import RatFunc, as_ratfunc

T = RatFunc("t")
LAM = RatFunc("lam")
MU = RatFunc("mu")
LAMP = RatFunc("lamp")
C = RatFunc("c")
_P = RatFunc  # parameter shorthand


def free_term_equal(h1: RatFunc, h2: RatFunc) -> bool:
    """True when h1 - h2 does not depend on λ or μ."""
    return (h1 - h2).free_of("lam", "mu")


# ---------------------------------------------------------------------------
# second-order equations


@dataclass(frozen=True)
class SecondOrderODE:
    """λ'' = A λ'² + B λ' + C with A, B, C rational in t and λ."""

    A: RatFunc
    B: RatFunc
    C: RatFunc

    @property
    def rhs(self) -> RatFunc:
        return self.A * LAMP * LAMP + self.B * LAMP + self.C


def split_quadratic(H: RatFunc) -> tuple[RatFunc, RatFunc, RatFunc]:
    """(f, g, h) with H = fμ²/2 + gμ + h."""
    H = as_ratfunc(H)
    if not H.denom.free_of("mu") or H.degree("mu") > 2 or H.degree("mu") < 2:
        raise NotQuadraticInMu(f"H is not quadratic in mu: {H}")
    return 2 * H.coeff("mu", 2), H.coeff("mu", 1), H.coeff("mu", 0)


def derive_second_order(H: RatFunc) -> SecondOrderODE:
    """Eliminate μ from the Hamilton equations of H."""
    f, g, h = split_quadratic(H)
    f_l, f_t = f.diff("lam"), f.diff("t")
    A = f_l / (2 * f)
    B = f_t / f
    Cc = (-(g * g) / (2 * f) * f_l - g / f * f_t + g * g.diff("lam") + g.diff("t")
          - f * h.diff("lam"))
    return SecondOrderODE(A, B, Cc)


# ---------------------------------------------------------------------------
# types and printed data


@dataclass(frozen=True)
class PainleveType:
    tag: str
    symbol: str
    supertype: str
    standard_name: str


TYPES: dict[str, PainleveType] = {
    t.tag: t
    for t in (
        PainleveType("VI", "(1̲1̲1̲1̲)", "VI", "Painlevé VI"),
        PainleveType("ndegV", "(1̲1̲2)", "V", "non-degenerate Painlevé V"),
        PainleveType("degV", "(1̲1̲3/2)", "V", "degenerate Painlevé V"),
        PainleveType("ndegIII'", "(22)", "III'", "non-degenerate Painlevé III'"),
        PainleveType("degIII'1", "(2;3/2)", "III'", "degenerate Painlevé III', first form"),
        PainleveType("degIII'2", "(3/2;2)", "III'", "degenerate Painlevé III', second form"),
        PainleveType("ddegIII'", "(3/2 3/2)", "III'", "doubly degenerate Painlevé III'"),
        PainleveType("IV", "(1̲3)", "IV-34", "Painlevé IV"),
        PainleveType("P34", "(1̲5/2)", "IV-34", "Painlevé 34"),
        PainleveType("II", "(4)", "I-II", "Painlevé II"),
        PainleveType("I", "(7/2)", "I-II", "Painlevé I"),
    )
}

SUPERTYPE_MEMBERS = {
    "VI": ("VI",),
    "V": ("ndegV", "degV"),
    "III'": ("ndegIII'", "degIII'1", "degIII'2", "ddegIII'"),
    "IV-34": ("IV", "P34"),
    "I-II": ("II", "I"),
}

ALIASES = {"V": "ndegV", "III'": "ndegIII'", "34": "P34", "(22)": "ndegIII'"}


def _v(name: str) -> RatFunc:
    return RatFunc(name)


@dataclass(frozen=True)
class _Printed:
    params: tuple[str, ...]
    family: Callable[[dict], HeunOperator]
    subcase: str
    printed_scale: object
    H: Callable[[dict], RatFunc]
    ode: Callable[[dict], RatFunc]
    param_dict: Callable[[dict], dict]


def _p6_rhs(o):
    a, b, g, d = o["alpha"], o["beta"], o["gamma"], o["delta"]
    lam, t, lp = LAM, T, LAMP
    return ((1 / lam + 1 / (lam - 1) + 1 / (lam - t)) * lp * lp / 2
            - (1 / t + 1 / (t - 1) + 1 / (lam - t)) * lp
            + lam * (lam - 1) * (lam - t) / (t ** 2 * (t - 1) ** 2)
            * (a + b * t / lam ** 2 + g * (t - 1) / (lam - 1) ** 2
               + d * t * (t - 1) / (lam - t) ** 2))


def _v_common(o):
    return ((1 / (2 * LAM) + 1 / (LAM - 1)) * LAMP * LAMP - LAMP / T
            + (LAM - 1) ** 2 / T ** 2 * (o["alpha"] * LAM + o["beta"] / LAM))


def _iii_common():
    return LAMP * LAMP / LAM - LAMP / T


PRINTED: dict[str, _Printed] = {
    "VI": _Printed(
        ("k0", "k1", "kt", "kinf"),
        lambda p: HeunOperator.build(
            [(0, 1), (1, 1), (T, 1)],
            (1 - p["k0"]) * (Z - 1) * (Z - T) + (1 - p["k1"]) * Z * (Z - T)
            + (1 - p["kt"]) * Z * (Z - 1),
            ((p["k0"] + p["k1"] + p["kt"] - 1) ** 2 - p["kinf"] ** 2) * Z / 4 - C),
        "A1", None,
        lambda p: (LAM * (LAM - 1) * (LAM - T) * MU ** 2
                   - (p["k0"] * (LAM - 1) * (LAM - T) + p["k1"] * LAM * (LAM - T)
                      + (p["kt"] - 1) * LAM * (LAM - 1)) * MU
                   + ((p["k0"] + p["k1"] + p["kt"] - 1) ** 2 - p["kinf"] ** 2)
                   * (LAM - T) / 4) / (T * (T - 1)),
        _p6_rhs,
        lambda p: {"alpha": p["kinf"] ** 2 / 2, "beta": -p["k0"] ** 2 / 2,
                   "gamma": p["k1"] ** 2 / 2, "delta": (1 - p["kt"] ** 2) / 2},
    ),
    "ndegV": _Printed(
        ("k0", "kinf", "chi1"),
        lambda p: HeunOperator.build(
            [(0, 1), (1, 2)],
            (2 - p["chi1"]) * Z * (Z - 1) + (1 - p["k0"]) * (Z - 1) ** 2 + T * Z,
            ((p["k0"] + p["chi1"] - 1) ** 2 - p["kinf"] ** 2) * (Z - 1) / 4 - C),
        "Ap", None,
        lambda p: ((LAM - 1) ** 2 * LAM * MU ** 2
                   - (p["k0"] * (LAM - 1) ** 2 + (p["chi1"] - 1) * LAM * (LAM - 1)
                      - T * LAM) * MU
                   + ((p["k0"] + p["chi1"] - 1) ** 2 - p["kinf"] ** 2) * (LAM - 1) / 4) / T,
        lambda o: _v_common(o) + o["gamma"] * LAM / T - LAM * (LAM + 1) / (2 * (LAM - 1)),
        lambda p: {"alpha": p["kinf"] ** 2 / 2, "beta": -p["k0"] ** 2 / 2,
                   "gamma": p["chi1"]},
    ),
    "degV": _Printed(
        ("k0", "kinf"),
        lambda p: HeunOperator.build(
            [(0, 1), (1, 2)],
            (Z - 1) * Z + (1 - p["k0"]) * (Z - 1) ** 2,
            -T / (Z - 1) + (p["k0"] ** 2 - p["kinf"] ** 2) * Z / 4 - C),
        "Aq", None,
        lambda p: (LAM * (LAM - 1) ** 2 * MU ** 2 - p["k0"] * (LAM - 1) ** 2 * MU
                   + (p["k0"] ** 2 - p["kinf"] ** 2) * (LAM - 1) / 4
                   - T * LAM / (LAM - 1)) / T,
        lambda o: _v_common(o) - 2 * LAM / T,
        lambda p: {"alpha": p["kinf"] ** 2 / 2, "beta": -p["k0"] ** 2 / 2},
    ),
    "ndegIII'": _Printed(
        ("chi0", "chiinf"),
        lambda p: HeunOperator.build(
            [(0, 2)], T + (2 - p["chi0"]) * Z - Z ** 2,
            (p["chi0"] + p["chiinf"] - 1) * Z / 2 - C),
        "Ap", None,
        lambda p: (LAM ** 2 * MU ** 2 - (LAM ** 2 + (p["chi0"] - 1) * LAM - T) * MU
                   + (p["chi0"] + p["chiinf"] - 1) * LAM / 2) / T,
        lambda o: (_iii_common() + o["alpha"] * LAM ** 2 / (4 * T ** 2) + LAM ** 3 / T ** 2
                   + o["beta"] / (4 * T) - 1 / LAM),
        lambda p: {"alpha": -4 * p["chiinf"], "beta": 4 * p["chi0"]},
    ),
    "degIII'1": _Printed(
        ("chi0",),
        lambda p: HeunOperator.build([(0, 2)], T + (2 - p["chi0"]) * Z, Z / 2 - C),
        "Ap", None,
        lambda p: (LAM ** 2 * MU ** 2 + ((1 - p["chi0"]) * LAM + T) * MU + LAM / 2) / T,
        lambda o: _iii_common() - LAM ** 2 / T ** 2 + o["beta"] / (4 * T) - 1 / LAM,
        lambda p: {"beta": 4 * p["chi0"]},
    ),
    "degIII'2": _Printed(
        ("chiinf",),
        lambda p: HeunOperator.build(
            [(0, 2)], -Z ** 2 + Z, T / (2 * Z) - C + p["chiinf"] * Z / 2),
        "Aq", None,
        lambda p: (LAM ** 2 * MU ** 2 - LAM ** 2 * MU + p["chiinf"] * LAM / 2
                   + T / (2 * LAM)) / T,
        lambda o: (_iii_common() + o["alpha"] * LAM ** 2 / (4 * T ** 2) + LAM ** 3 / T ** 2
                   + 1 / T),
        lambda p: {"alpha": -4 * p["chiinf"]},
    ),
    "ddegIII'": _Printed(
        (),
        lambda p: HeunOperator.build([(0, 2)], 2 * Z, Z / 2 - C + T / (2 * Z)),
        "Aq", None,
        lambda p: (LAM ** 2 * MU ** 2 + LAM * MU + LAM / 2 + T / (2 * LAM)) / T,
        lambda o: _iii_common() - LAM ** 2 / T ** 2 + 1 / T,
        lambda p: {},
    ),
    "IV": _Printed(
        ("k0", "thinf"),
        lambda p: HeunOperator.build(
            [(0, 1)], 1 - p["k0"] - T * Z - Z ** 2 / 2, p["thinf"] * Z / 2 - C),
        "Bp", None,
        lambda p: (2 * LAM * MU ** 2 - (LAM ** 2 + 2 * T * LAM + 2 * p["k0"]) * MU
                   + p["thinf"] * LAM),
        lambda o: (LAMP * LAMP / (2 * LAM) + 3 * LAM ** 3 / 2 + 4 * T * LAM ** 2
                   + 2 * (T ** 2 - o["alpha"]) * LAM + o["beta"] / LAM),
        lambda p: {"alpha": -p["k0"] + 2 * p["thinf"] + 1, "beta": -2 * p["k0"] ** 2},
    ),
    "P34": _Printed(
        ("k0",),
        lambda p: HeunOperator.build([(0, 1)], 1 - p["k0"], -Z ** 2 / 2 - T * Z / 2 - C),
        "Bq", None,
        lambda p: LAM * MU ** 2 - p["k0"] * MU - LAM ** 2 / 2 - T * LAM / 2,
        lambda o: (LAMP * LAMP / (2 * LAM) + 2 * LAM ** 2 + T * LAM
                   - o["alpha"] / (2 * LAM)),
        lambda p: {"alpha": p["k0"] ** 2},
    ),
    "II": _Printed(
        ("alpha",),
        lambda p: HeunOperator.build([], -2 * Z ** 2 - T, -(2 * p["alpha"] + 1) * Z - C),
        "Bp", -1,
        lambda p: MU ** 2 / 2 - (LAM ** 2 + T / 2) * MU - (p["alpha"] + RatFunc(1) / 2) * LAM,
        lambda o: 2 * LAM ** 3 + T * LAM + o["alpha"],
        lambda p: {"alpha": p["alpha"]},
    ),
    "I": _Printed(
        (),
        lambda p: HeunOperator.build([], RatFunc(0), -4 * Z ** 3 - 2 * T * Z - C),
        "Bq", -6,
        lambda p: MU ** 2 / 2 - 2 * LAM ** 3 - T * LAM,
        lambda o: 6 * LAM ** 2 + T,
        lambda p: {},
    ),
}


# Printed values that the derivations contradict, kept for regression tests.
PRINTED_VARIANTS = {
    "IV alpha": lambda: -_v("k0") + 2 * _v("thinf") - 1,
    "I-II alpha": lambda: 2 * _v("beta") ** 3,
    "degV kinf^2": lambda: _v("k0") ** 2 + 2 * _v("chiinf") * (_v("chi0") - 1),
    "I scale": lambda: RatFunc(-6),
}


def resolve_type(tag: str) -> str:
    tag = ALIASES.get(tag, tag)
    if tag not in PRINTED:
        raise UnknownType(f"unknown Painlevé type {tag!r}; known: {', '.join(PRINTED)}")
    return tag


# ---------------------------------------------------------------------------
# entries


@dataclass
class CatalogEntry:
    type: PainleveType
    params: dict
    family: TimeFamily
    subcase: Subcase
    printed_scale: RatFunc | None
    data: IsomonodromyData
    H: RatFunc
    ode_generic: RatFunc
    ode_rhs: RatFunc
    param_dict: dict

    @property
    def scale(self) -> RatFunc:
        return self.subcase.scale

    @property
    def a(self) -> RatFunc:
        return self.data.a

    @property
    def b(self) -> RatFunc:
        return self.data.b

    @property
    def derived_H(self) -> RatFunc:
        return self.data.H

    def second_order(self) -> SecondOrderODE:
        return derive_second_order(self.H)

    def to_json(self) -> dict:
        op = self.family.op
        return {
            "type": self.type.tag,
            "symbol": self.type.symbol,
            "supertype": self.type.supertype,
            "sigma": str(op.sigma),
            "tau": str(op.tau),
            "eta": str(op.eta),
            "subcase": self.subcase.tag,
            "scale": str(self.scale),
            "m": str(self.subcase.m_effective),
            "a": str(self.a),
            "b": str(self.b),
            "H": str(self.H),
            "ode": str(self.ode_rhs),
            "param_dict": {k: str(v) for k, v in self.param_dict.items()},
        }


def _param_values(spec: _Printed, params: dict | None) -> dict:
    p = {name: _v(name) for name in spec.params}
    for k, v in (params or {}).items():
        if k not in p and k != "c":
            raise UnknownType(f"parameter {k!r} is not used by this type")
        p[k] = as_ratfunc(v)
    return p


def entry(tag: str, params: dict | None = None) -> CatalogEntry:
    """Assemble the catalog record for a type, with optional parameter values."""
    tag = resolve_type(tag)
    spec = PRINTED[tag]
    p = _param_values(spec, params)
    op = spec.family(p)
    if "c" in p:
        op = op.subs({"c": p["c"]})
    fam = TimeFamily(op)
    sc = next((s for s in select_subcase(fam) if s.tag == spec.subcase), None)
    if sc is None:
        raise UnknownType(f"subcase {spec.subcase} does not certify on {tag}")
    data = hamiltonian(fam, sc)
    ode_params = {k: _v(k) for k in ("alpha", "beta", "gamma", "delta")}
    generic = spec.ode(ode_params)
    pd = spec.param_dict(p)
    rhs = generic.subs_many(pd) if pd else generic
    printed = None if spec.printed_scale is None else as_ratfunc(spec.printed_scale)
    return CatalogEntry(TYPES[tag], p, fam, sc, printed, data,
                        spec.H(p), generic, rhs, pd)


def catalog_hamiltonian(tag: str, params: dict | None = None) -> RatFunc:
    """The printed Hamiltonian with parameter values, without rerunning the derivation."""
    spec = PRINTED[resolve_type(tag)]
    return spec.H(_param_values(spec, params))


def catalog_ode(tag: str, params: dict | None = None) -> RatFunc:
    """The printed right-hand side F(t, λ, λ') after the parameter dictionary."""
    spec = PRINTED[resolve_type(tag)]
    p = _param_values(spec, params)
    pd = spec.param_dict(p)
    generic = spec.ode({k: _v(k) for k in ("alpha", "beta", "gamma", "delta")})
    return generic.subs_many(pd) if pd else generic


def type_parameters(tag: str) -> tuple[str, ...]:
    return PRINTED[resolve_type(tag)].params


def catalog(tag: str | None = None) -> list[CatalogEntry]:
    tags = [resolve_type(tag)] if tag else list(PRINTED)
    return [entry(t) for t in tags]


def catalog_dump(tag: str | None = None) -> list[dict]:
    return [e.to_json() for e in catalog(tag)]


@dataclass
class EntryReport:
    tag: str
    conditions_zero: bool
    compatibility_zero: bool
    unified_agrees: bool
    hamiltonian_matches: bool
    ode_matches: bool
    scale_matches_printed: bool | None
    details: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all((self.conditions_zero, self.compatibility_zero, self.unified_agrees,
                    self.hamiltonian_matches, self.ode_matches))


def verify_entry(e: CatalogEntry) -> EntryReport:
    conds = general_conditions(e.family, e.data.c)
    comp = verify_full_compatibility(e.family, e.data)
    ode = derive_second_order(e.H)
    return EntryReport(
        e.type.tag,
        all(x.is_zero for x in conds),
        comp["ok"],
        e.data.unified_agrees,
        free_term_equal(e.derived_H, e.H),
        ode.rhs == e.ode_rhs,
        None if e.printed_scale is None else e.scale == e.printed_scale,
        {"derived_minus_printed_H": str(e.derived_H - e.H), "inferred_scale": str(e.scale)},
    )


def verify_catalog() -> list[EntryReport]:
    return [verify_entry(e) for e in catalog()]


# ---------------------------------------------------------------------------
# canonical transformations


@dataclass(frozen=True)
class CanonicalMap:
    """(λ, μ) ↦ (λ̃, μ̃), possibly t-dependent, with H̃ = H + correction.

    ``new_of_old`` gives λ̃, μ̃ in ``lam``, ``mu``, ``t``; ``old_of_new`` gives
    λ, μ in ``lamt``, ``mut``, ``t``; ``correction`` is written in the new
    variables.
    """

    name: str
    new_of_old: tuple[RatFunc, RatFunc]
    old_of_new: tuple[RatFunc, RatFunc]
    correction: RatFunc = RatFunc(0)

    def apply(self, H: RatFunc) -> RatFunc:
        lam, mu = self.old_of_new
        out = H.subs_many({"lam": lam, "mu": mu}) + self.correction
        return out.subs_many({"lamt": LAM, "mut": MU})

    def jacobian(self) -> RatFunc:
        lt, mt = self.new_of_old
        return lt.diff("lam") * mt.diff("mu") - lt.diff("mu") * mt.diff("lam")

    def inverse_consistent(self) -> bool:
        lt, mt = self.new_of_old
        back = tuple(f.subs_many({"lam": self.old_of_new[0], "mu": self.old_of_new[1]})
                     for f in (lt, mt))
        return back == (RatFunc("lamt"), RatFunc("mut"))

    def flow_equivalent(self, H: RatFunc) -> bool:
        """The old Hamilton flow pushed forward equals the flow of the new H."""
        lam_dot, mu_dot = H.diff("mu"), -H.diff("lam")
        new_H = self.apply(H)
        want = (new_H.diff("mu"), -new_H.diff("lam"))
        lt, mt = self.new_of_old
        back = {"lam": lt, "mu": mt}
        for g, w in zip((lt, mt), want):
            pushed = g.diff("t") + g.diff("lam") * lam_dot + g.diff("mu") * mu_dot
            if pushed != w.subs_many(back):
                return False
        return True


def time_map(eps=1, shift=0):
    """H̃(t) = εH(εt + shift); trajectories correspond through t ↦ εt + shift."""
    eps, shift = as_ratfunc(eps), as_ratfunc(shift)

    def run(H: RatFunc) -> RatFunc:
        return eps * H.subs("t", eps * T + shift)

    return run


LT, MT = RatFunc("lamt"), RatFunc("mut")

TIME_TRANSFORM = CanonicalMap(
    "time", (LAM / T, T * MU), (T * LT, MT / T), -LT * MT / T)


@dataclass
class EquivalenceResult:
    name: str
    transformed: RatFunc
    target: RatFunc
    free_ok: bool
    jacobians_ok: bool
    flow_ok: bool
    notes: str = ""

    @property
    def ok(self) -> bool:
        return self.free_ok and self.jacobians_ok and self.flow_ok


def _check_maps(maps, H):
    jac = all(m.jacobian() == 1 and m.inverse_consistent() for m in maps)
    flow = True
    cur = H
    for m in maps:
        flow = flow and m.flow_equivalent(cur)
        cur = m.apply(cur)
    return jac, flow, cur


def _eq_degIII() -> EquivalenceResult:
    chi0 = _v("chi0")
    src = entry("degIII'1").H
    inv = CanonicalMap(
        "inversion",
        (1 / LAM, -MU * LAM ** 2 + chi0 * LAM / 2),
        (1 / LT, -MT * LT ** 2 + chi0 * LT / 2),
    )
    jac, flow, out = _check_maps([TIME_TRANSFORM, inv], src)
    target = entry("degIII'2", {"chiinf": chi0}).H
    diff = out - target
    return EquivalenceResult("(2;3/2) -> (3/2;2)", out, target, free_term_equal(out, target),
                             jac, flow, f"chiinf = chi0, difference {diff}")


def _eq_degV(kinf_sq=None) -> EquivalenceResult:
    chi0, chiinf = _v("chi0"), _v("chiinf")
    src = entry("ndegIII'").H
    # the μ̃ sign is flipped relative to the printed map so the Jacobian is 1
    mp = CanonicalMap(
        "ndegIII'->degV",
        (1 - 1 / MU, -(MU ** 2 * LAM - (chi0 - 1) * MU / 2)),
        (-(1 - LT) ** 2 * MT + (chi0 - 1) * (1 - LT) / 2, 1 / (1 - LT)),
    )
    jac, flow, out = _check_maps([mp], src)
    k0 = (chiinf - chi0 + 1) / 2
    if kinf_sq is None:
        kinf_sq = k0 ** 2 + chiinf * (chi0 - 1)
    target = (LAM * (LAM - 1) ** 2 * MU ** 2 - k0 * (LAM - 1) ** 2 * MU
              + (k0 ** 2 - kinf_sq) * (LAM - 1) / 4 - T * LAM / (LAM - 1)) / T
    return EquivalenceResult("ndegIII' -> degV", out, target, free_term_equal(out, target),
                             jac, flow, "kappa0 = (chiinf - chi0 + 1)/2, "
                             "kappainf^2 = kappa0^2 + chiinf (chi0 - 1)")


def _eq_34_II() -> EquivalenceResult:
    k0 = _v("k0")
    src = entry("P34").H
    swap = CanonicalMap("swap", (-MU, LAM), (MT, -LT))
    jac, flow, out = _check_maps([swap], src)
    out = time_map(-1)(out)
    target = entry("II", {"alpha": k0 - RatFunc(1) / 2}).H
    return EquivalenceResult("P34 -> II", out, target, free_term_equal(out, target),
                             jac, flow, "kappa0 = alpha + 1/2")


def _eq_I_II(alpha=None) -> EquivalenceResult:
    beta = _v("beta")
    src = supertype("I-II").general_hamiltonian.subs("eta", 1)
    mp = CanonicalMap("I-II shift",
                      (LAM + beta, MU + 2 * beta * LAM - 2 * beta ** 2),
                      (LT - beta, MT - 2 * beta * LT + 4 * beta ** 2))
    jac, flow, out = _check_maps([mp], src)
    out = time_map(1, 6 * beta ** 2)(out)
    if alpha is None:
        alpha = 4 * beta ** 3
    target = entry("II", {"alpha": alpha}).H
    return EquivalenceResult("I-II (eta=1) -> II", out, target, free_term_equal(out, target),
                             jac, flow, f"alpha = {alpha}")


def canonical_equivalences() -> list[EquivalenceResult]:
    return [_eq_degIII(), _eq_degV(), _eq_34_II(), _eq_I_II()]


# ---------------------------------------------------------------------------
# supertypes


@dataclass(frozen=True)
class ScalingLaw:
    """T·H(Tt, Ωλ, μ/Ω) = H' and (T²/Ω)F(Tt, Ωλ, (Ω/T)λ') = F'."""

    name: str
    time_factor: RatFunc
    lam_factor: RatFunc
    ode_params: dict
    ham_params: dict


@dataclass(frozen=True)
class SupertypeForm:
    supertype: str
    general_equation: RatFunc
    general_hamiltonian: RatFunc
    param_dict: dict
    members: tuple[str, ...]

    def equation(self, **values) -> RatFunc:
        vals = {k: as_ratfunc(v) for k, v in values.items()}
        return self.general_equation.subs_many(vals) if vals else self.general_equation

    def hamiltonian(self, **values) -> RatFunc:
        vals = {k: as_ratfunc(v) for k, v in values.items()}
        return self.general_hamiltonian.subs_many(vals) if vals else self.general_hamiltonian


@lru_cache(maxsize=None)
def supertypes() -> dict[str, SupertypeForm]:
    a, b, g, d, rho = (_v(n) for n in ("alpha", "beta", "gamma", "delta", "rho"))
    k0, kinf, chi1, eta = _v("k0"), _v("kinf"), _v("chi1"), _v("eta")
    chi0, chiinf, eta0, etainf = _v("chi0"), _v("chiinf"), _v("eta0"), _v("etainf")
    theta = _v("theta")
    vi = entry("VI")
    v_eq = (_v_common({"alpha": a, "beta": b}) + g * LAM / T
            + d * LAM * (LAM + 1) / (LAM - 1))
    v_H = ((LAM - 1) ** 2 * LAM * MU ** 2
           - (k0 * (LAM - 1) ** 2 + (chi1 - 1) * LAM * (LAM - 1) - eta * T * LAM) * MU
           + ((k0 + chi1 - 1) ** 2 - kinf ** 2) * (LAM - 1) / 4) / T
    iii_eq = (_iii_common() + (a * LAM ** 2 + g * LAM ** 3) / (4 * T ** 2) + b / (4 * T)
              + d / (4 * LAM))
    iii_H = (LAM ** 2 * MU ** 2 - (etainf * LAM ** 2 + (chi0 - 1) * LAM - eta0 * T) * MU
             + etainf * (chi0 + chiinf - 1) * LAM / 2) / T
    iv_eq = (LAMP * LAMP / (2 * LAM) + rho * LAM * (2 * LAM + T)
             + g * LAM * (LAM + T) * (3 * LAM + T) + b / (4 * LAM))
    iv_H = (LAM * MU ** 2 - (eta * LAM ** 2 + eta * T * LAM - theta * LAM + k0) * MU
            + (theta ** 2 / 4 + (k0 - 1) * eta / 2) * LAM)
    i_eq = g * (2 * LAM ** 3 + T * LAM) + b * (6 * LAM ** 2 + T)
    i_H = (MU ** 2 / 2 - (eta * LAM ** 2 + eta * T / 2) * MU - 2 * b * LAM ** 3
           - T * b * LAM - eta * LAM / 2)
    return {
        "VI": SupertypeForm("VI", vi.ode_generic, vi.H, vi.param_dict, ("VI",)),
        "V": SupertypeForm("V", v_eq, v_H,
                           {"alpha": kinf ** 2 / 2, "beta": -k0 ** 2 / 2, "gamma": chi1 * eta,
                            "delta": -eta ** 2 / 2}, SUPERTYPE_MEMBERS["V"]),
        "III'": SupertypeForm("III'", iii_eq, iii_H,
                              {"alpha": -4 * etainf * chiinf, "beta": 4 * eta0 * chi0,
                               "gamma": 4 * etainf ** 2, "delta": -4 * eta0 ** 2},
                              SUPERTYPE_MEMBERS["III'"]),
        "IV-34": SupertypeForm("IV-34", iv_eq, iv_H,
                               {"beta": -2 * k0 ** 2, "rho": -eta * theta, "gamma": eta ** 2 / 2},
                               SUPERTYPE_MEMBERS["IV-34"]),
        "I-II": SupertypeForm("I-II", i_eq, i_H, {"gamma": eta ** 2, "beta": b},
                              SUPERTYPE_MEMBERS["I-II"]),
    }


def supertype(name: str) -> SupertypeForm:
    forms = supertypes()
    if name not in forms:
        raise UnknownType(f"unknown supertype {name!r}")
    return forms[name]

EPS = RatFunc("eps")
OMEGA = RatFunc("omega")


def scaling_laws(eps=EPS, omega=OMEGA) -> list[ScalingLaw]:
    """The five independent scalings: V, III' in t, III' in λ, IV-34 and I-II."""
    e, w = as_ratfunc(eps), as_ratfunc(omega)
    v = _v
    return [
        ScalingLaw("V", e, RatFunc(1), {"gamma": e * v("gamma"), "delta": e ** 2 * v("delta")},
                   {"eta": e * v("eta")}),
        ScalingLaw("III' (time)", e, RatFunc(1),
                   {"beta": e * v("beta"), "delta": e ** 2 * v("delta")},
                   {"eta0": e * v("eta0")}),
        ScalingLaw("III' (lambda)", RatFunc(1), w,
                   {"alpha": w * v("alpha"), "beta": v("beta") / w, "gamma": w ** 2 * v("gamma"),
                    "delta": v("delta") / w ** 2},
                   {"eta0": v("eta0") / w, "etainf": w * v("etainf")}),
        ScalingLaw("IV-34", e, e, {"rho": e ** 3 * v("rho"), "gamma": e ** 4 * v("gamma")},
                   {"eta": e ** 2 * v("eta"), "theta": e * v("theta")}),
        ScalingLaw("I-II", e ** 2, e, {"gamma": e ** 6 * v("gamma"), "beta": e ** 5 * v("beta")},
                   {"eta": e ** 3 * v("eta"), "beta": e ** 5 * v("beta")}),
    ]


def printed_scaling_law(st: str, eps=EPS, omega=OMEGA) -> ScalingLaw | None:
    """The law as displayed for a supertype; III' combines both scalings."""
    e, w = as_ratfunc(eps), as_ratfunc(omega)
    if st == "III'":
        v = _v
        return ScalingLaw("III'", e, w,
                          {"alpha": w * v("alpha"), "beta": e / w * v("beta"),
                           "gamma": w ** 2 * v("gamma"), "delta": e ** 2 / w ** 2 * v("delta")},
                          {"eta0": e / w * v("eta0"), "etainf": w * v("etainf")})
    key = {"V": "V", "IV-34": "IV-34", "I-II": "I-II"}.get(st)
    if key is None:
        return None
    return next(law for law in scaling_laws(eps, omega) if law.name == key)


@dataclass
class ScalingCheck:
    name: str
    equation_ok: bool
    hamiltonian_ok: bool

    @property
    def ok(self) -> bool:
        return self.equation_ok and self.hamiltonian_ok


def check_scaling(form: SupertypeForm, law: ScalingLaw) -> ScalingCheck:
    Tf, Om = law.time_factor, law.lam_factor
    F = form.general_equation
    lhs = (Tf ** 2 / Om) * F.subs_many({"t": Tf * T, "lam": Om * LAM, "lamp": Om / Tf * LAMP})
    rhs = F.subs_many(law.ode_params)
    H = form.general_hamiltonian
    hl = Tf * H.subs_many({"t": Tf * T, "lam": Om * LAM, "mu": MU / Om})
    hr = H.subs_many(law.ham_params)
    return ScalingCheck(law.name, lhs == rhs, hl == hr)


_LAW_SUPERTYPE = {"V": "V", "III' (time)": "III'", "III' (lambda)": "III'",
                  "IV-34": "IV-34", "I-II": "I-II"}


def supertype_scaling(st: str | None = None, eps=EPS, omega=OMEGA) -> list[ScalingCheck]:
    """Check the scaling laws, all five or those of one supertype."""
    out = []
    for law in scaling_laws(eps, omega):
        sup = _LAW_SUPERTYPE[law.name]
        if st is None or st == sup:
            out.append(check_scaling(supertype(sup), law))
    if st == "III'":
        out.append(check_scaling(supertype("III'"), printed_scaling_law("III'", eps, omega)))
    return out


def general_forms_consistent(st: str) -> bool:
    """The general Hamiltonian yields the general equation under its parameter map."""
    form = supertype(st)
    return derive_second_order(form.general_hamiltonian).rhs == form.general_equation.subs_many(
        form.param_dict)


@dataclass
class ReductionCheck:
    supertype: str
    target: str
    level: str
    expected: bool
    holds: bool

    @property
    def ok(self) -> bool:
        return self.expected == self.holds


def _member_ode(tag: str) -> RatFunc:
    return entry(tag).ode_generic


def supertype_reductions() -> list[ReductionCheck]:
    """Parameter settings that land a supertype on its member types.

    Settings that only work on the equation level are checked on both levels;
    the Hamiltonian-level check is expected to fail there.
    """
    out: list[ReductionCheck] = []
    V, III, IV, I2 = (supertype(k) for k in ("V", "III'", "IV-34", "I-II"))

    out.append(ReductionCheck("V", "ndegV", "hamiltonian", True,
                              V.hamiltonian(eta=1) == entry("ndegV").H))
    out.append(ReductionCheck("V", "ndegV", "equation", True,
                              V.equation(delta=RatFunc(-1) / 2) == _member_ode("ndegV")))
    out.append(ReductionCheck("V", "degV", "equation", True,
                              V.equation(delta=0, gamma=-2) == _member_ode("degV")))
    out.append(ReductionCheck("V", "degV", "hamiltonian", False,
                              free_term_equal(V.hamiltonian(eta=0), entry("degV").H)))

    out.append(ReductionCheck("III'", "ndegIII'", "hamiltonian", True,
                              III.hamiltonian(eta0=1, etainf=1) == entry("ndegIII'").H))
    out.append(ReductionCheck("III'", "ndegIII'", "equation", True,
                              III.equation(gamma=4, delta=-4) == _member_ode("ndegIII'")))
    out.append(ReductionCheck("III'", "degIII'1", "equation", True,
                              III.equation(gamma=0, delta=-4, alpha=-4)
                              == _member_ode("degIII'1")))
    out.append(ReductionCheck("III'", "degIII'1", "hamiltonian", False,
                              free_term_equal(III.hamiltonian(etainf=0, eta0=1),
                                              entry("degIII'1").H)))
    out.append(ReductionCheck("III'", "degIII'2", "equation", True,
                              III.equation(delta=0, gamma=4, beta=4) == _member_ode("degIII'2")))
    out.append(ReductionCheck("III'", "degIII'2", "hamiltonian", False,
                              free_term_equal(III.hamiltonian(eta0=0, etainf=1),
                                              entry("degIII'2").H)))
    out.append(ReductionCheck("III'", "ddegIII'", "equation", True,
                              III.equation(delta=0, gamma=0, alpha=-4, beta=4)
                              == _member_ode("ddegIII'")))
    out.append(ReductionCheck("III'", "ddegIII'", "hamiltonian", False,
                              free_term_equal(III.hamiltonian(eta0=0, etainf=0),
                                              entry("ddegIII'").H)))

    theta, k0 = _v("theta"), _v("k0")
    h = time_map(1, theta)(time_map(2)(IV.hamiltonian(eta=RatFunc(1) / 2)))
    target = entry("IV", {"thinf": (theta ** 2 + k0 - 1) / 2}).H
    out.append(ReductionCheck("IV-34", "IV", "hamiltonian", True, free_term_equal(h, target)))
    rho = _v("rho")
    eq = IV.equation(gamma=RatFunc(1) / 8)
    # t = 2(t̃ - 2ρ), λ unchanged: λ_t̃t̃ = 4 λ_tt
    eq = 4 * eq.subs_many({"t": 2 * T - 4 * rho, "lamp": LAMP / 2})
    ode = entry("IV").ode_generic.subs("alpha", 4 * rho ** 2)
    out.append(ReductionCheck("IV-34", "IV", "equation", True, eq == ode))
    out.append(ReductionCheck("IV-34", "P34", "equation", True,
                              IV.equation(gamma=0, rho=1)
                              == _member_ode("P34").subs("alpha", -_v("beta") / 2)))
    out.append(ReductionCheck("IV-34", "P34", "hamiltonian", False,
                              free_term_equal(IV.hamiltonian(eta=0), entry("P34").H)))

    out.append(ReductionCheck("I-II", "I", "hamiltonian", True,
                              I2.hamiltonian(eta=0, beta=1) == entry("I").H))
    out.append(ReductionCheck("I-II", "I", "equation", True,
                              I2.equation(gamma=0, beta=1) == _member_ode("I")))
    eqv = _eq_I_II()
    out.append(ReductionCheck("I-II", "II", "hamiltonian", True, eqv.ok))
    return out


# ---------------------------------------------------------------------------
# quadratures


@dataclass
class QuadratureReduction:
    m: RatFunc
    f: RatFunc
    g: RatFunc
    h: RatFunc
    energy: RatFunc
    radicand: RatFunc

    def conserved(self, lam, mu) -> RatFunc:
        return (self.f * MU ** 2 / 2 + self.g * MU + self.h).subs_many(
            {"lam": as_ratfunc(lam), "mu": as_ratfunc(mu)})

    @property
    def lam_s_squared(self) -> RatFunc:
        """(dλ/ds)² = g² - 2f(h - E)."""
        return self.radicand


ENERGY = RatFunc("E")


def solve_quadrature(H: RatFunc) -> QuadratureReduction:
    """Split H = m(t)(fμ²/2 + gμ + h) with f, g, h functions of λ only."""
    H = as_ratfunc(H)
    if H.is_zero:
        raise NotAutonomousShape("H is zero")
    ratio = H.diff("t") / H
    if not ratio.free_of("lam", "mu"):
        raise NotAutonomousShape("the t-dependence of H does not factor out")
    K = None
    for t0 in range(1, 12):
        try:
            cand = H.subs("t", t0)
        except ZeroDivisionError:
            continue
        if not cand.is_zero:
            K = cand
            break
    if K is None:
        raise NotAutonomousShape("no regular time to normalize at")
    m = H / K
    f, g, h = split_quadratic(K)
    if not all(x.free_of("t") for x in (f, g, h)):
        raise NotAutonomousShape("f, g, h must be free of t")
    return QuadratureReduction(m, f, g, h, ENERGY, g * g - 2 * f * (h - ENERGY))
