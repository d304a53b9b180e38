"""Isomonodromic deformations of deformed Heun class operators.

A time family is a Heun class operator whose coefficients depend on ``t``.
Each subcase fixes a function m(t) and a polynomial c(z) of degree ≤ 2; the
compatibility functions are a = c/(z-λ), b = -c(λ)μ/(z-λ) and λ, μ then follow
Hamilton's equations for a Hamiltonian quadratic in μ.

Two independent routes are provided: the general conditions and
compatibility residuals computed from c alone, and the closed subcase
formulas for m, the simplified conditions and H.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import DivisionByZero, NoSubcaseApplies
from .heun_class import HeunOperator, Z
from .polyalg import RatFunc, as_ratfunc

T = RatFunc("t")
LAM = RatFunc("lam")
MU = RatFunc("mu")
TAGS = ("A1", "Ap", "Aq", "Bp", "Bq")


def at(f: RatFunc, point) -> RatFunc:
    return as_ratfunc(f).subs("z", point)


def dz(f: RatFunc, n: int = 1) -> RatFunc:
    for _ in range(n):
        f = f.diff("z")
    return f


def dt(f: RatFunc) -> RatFunc:
    return f.diff("t")


@dataclass(frozen=True)
class TimeFamily:
    """A Heun class operator whose coefficients depend on t.

    ``op`` is the family as written. A subcase may need the time rescaled by a
    constant ε; the base family is then ``op`` with t replaced by t/ε and the
    subcase formulas apply to it. ``scale`` pins ε when given.
    """

    op: HeunOperator
    scale: RatFunc | None = None

    def __post_init__(self):
        if self.scale is not None:
            object.__setattr__(self, "scale", as_ratfunc(self.scale))

    @property
    def time_slot(self) -> str:
        if any(not r.free_of("t") for r, _ in self.op.roots):
            return "sigma-root"
        if not self.op.tau.free_of("t"):
            return "tau"
        return "eta"

    @property
    def sigma(self) -> RatFunc:
        return self.op.sigma

    @property
    def tau(self) -> RatFunc:
        return self.op.tau

    @property
    def eta(self) -> RatFunc:
        return self.op.eta

    def base(self, eps) -> HeunOperator:
        eps = as_ratfunc(eps)
        return self.op if eps == 1 else self.op.subs({"t": T / eps})


@dataclass
class Subcase:
    """A subcase tag with its m(t) on the base family and the time scale ε."""

    tag: str
    m: RatFunc
    s: RatFunc | None = None
    scale: RatFunc = RatFunc(1)

    @property
    def case(self) -> str:
        return self.tag[0]

    @property
    def m_effective(self) -> RatFunc:
        """ε m(εt), the factor in front of c on the family as written."""
        if self.scale == 1:
            return self.m
        return self.scale * self.m.subs("t", self.scale * T)

    @property
    def excluded_times(self) -> list:
        """Factors of m's numerator and denominator that involve t."""
        out = []
        for part in (self.m_effective.numer, self.m_effective.denom):
            for fac, _ in part.factor_list():
                if not fac.free_of("t"):
                    out.append(fac)
        return out


# ---------------------------------------------------------------------------
# subcase detection


def _rho(op: HeunOperator, s: RatFunc) -> RatFunc:
    return op.sigma / (Z - s)


def _candidate_m(op: HeunOperator, tag: str, s):
    sigma, tau, eta = op.sigma, op.tau, op.eta
    if tag == "A1":
        return 1 / at(_rho(op, s), s)
    if tag == "Ap":
        return 1 / at(tau, s)
    if tag == "Aq":
        rho1 = sigma / (Z - s) ** 2
        eta0 = eta - T / (Z - s)
        return 1 / (dz(sigma * eta0).subs("z", s) + at(rho1, s) * T)
    if tag == "Bp":
        return 1 / (dz(tau, 2) / 2)
    eta0 = eta - T * Z
    return 1 / (T * dz(sigma, 2) / 2 + dz(sigma * eta0, 3) / 6)


def _time_coefficient(op: HeunOperator, tag: str, s) -> RatFunc:
    """∂_t of the time slot divided by its normalized shape."""
    if tag == "A1":
        return RatFunc(1)
    if tag == "Ap":
        return dt(op.tau) * (Z - s) ** 2 / op.sigma
    if tag == "Aq":
        return dt(op.eta) * (Z - s)
    if tag == "Bp":
        return dt(op.tau) / op.sigma
    return dt(op.eta) / Z


def infer_scale(op: HeunOperator, tag: str, s=None) -> RatFunc | None:
    """The constant ε with the family equal to its base form at εt, if any."""
    eps = _time_coefficient(op, tag, s)
    if eps.is_zero or not eps.free_of("z") or not eps.free_of("t"):
        return None
    if not eps.free_of("lam") or not eps.free_of("mu"):
        return None
    return eps


def _candidates(op: HeunOperator) -> list[tuple[str, RatFunc | None]]:
    out = []
    for r, mult in op.roots:
        if r == T and mult == 1:
            out.append(("A1", r))
        if mult >= 2 and r.free_of("t"):
            out += [("Ap", r), ("Aq", r)]
    if op.sigma_degree <= 2 and op.sigma.free_of("t"):
        out += [("Bp", None), ("Bq", None)]
    return out


def build_c(f: TimeFamily, sc: Subcase) -> RatFunc:
    """c = m(λ-s)ρ in Case A, c = mσ in Case B, with m replaced by ε m(εt)."""
    if sc.case == "A":
        return sc.m_effective * (LAM - sc.s) * _rho(f.op, sc.s)
    return sc.m_effective * f.op.sigma


def select_subcase(f: TimeFamily) -> list[Subcase]:
    """Every subcase whose three conditions vanish identically on the family."""
    found = []
    for tag, s in _candidates(f.op):
        eps = infer_scale(f.op, tag, s)
        if eps is None or (f.scale is not None and eps != f.scale):
            continue
        try:
            m = _candidate_m(f.base(eps), tag, s)
        except DivisionByZero:
            continue
        sc = Subcase(tag, m, s, eps)
        try:
            ok = all(x.is_zero for x in general_conditions(f, build_c(f, sc)))
        except DivisionByZero:
            ok = False
        if ok:
            found.append(sc)
    if not found:
        raise NoSubcaseApplies("no subcase certifies on this family")
    return found


# ---------------------------------------------------------------------------
# conditions


def _ev(g: RatFunc) -> RatFunc:
    return at(g, LAM)


def general_conditions(f: TimeFamily, c: RatFunc) -> tuple[RatFunc, RatFunc, RatFunc]:
    """The three conditions on (σ, τ, η, c) written for an arbitrary c."""
    s, t, e = f.sigma, f.tau, f.eta
    zl = Z - LAM
    sd = dt(s)
    ct = c * t / s
    I = dt(t) / s - t * sd / (s * s) + (ct - _ev(ct) - zl * dz(ct)) / zl ** 2
    csp = c * dz(s) / s
    ce = c * e
    II = (-(sd / s) * (e - _ev(e)) + dt(e) - _ev(dt(e))
          + (e - _ev(e)) / zl * (csp - dz(c))
          - _ev(dz(e)) * (_ev(csp) - _ev(dz(c)))
          + (2 * ce - 2 * _ev(ce) - (dz(ce) + _ev(dz(ce))) * zl) / zl ** 2)
    sds = sd / s
    III = sds - _ev(sds) - (csp - _ev(csp) - _ev(dz(csp)) * zl) / zl
    return I, II, III


def condition_I(f: TimeFamily, sc: Subcase) -> RatFunc:
    op = f.base(sc.scale)
    if sc.case == "A":
        return dt(op.tau / op.sigma) - sc.m * at(op.tau, sc.s) / (Z - sc.s) ** 2
    return dt(op.tau) / op.sigma - sc.m * dz(op.tau, 2) / 2


def condition_II(f: TimeFamily, sc: Subcase) -> RatFunc:
    op = f.base(sc.scale)
    s, e = op.sigma, op.eta
    zl = Z - LAM
    if sc.case == "A":
        rho = _rho(op, sc.s)
        re = rho * e
        return (-(dt(s) / s) * (e - _ev(e)) + dt(e) - _ev(dt(e))
                + sc.m * (e - _ev(e)) * (LAM - sc.s) * rho / (zl * (Z - sc.s))
                - sc.m * _ev(dz(e)) * _ev(rho)
                + sc.m * (LAM - sc.s) / zl ** 2
                * (2 * re - 2 * _ev(re) - (dz(re) + _ev(dz(re))) * zl))
    return dt(e) - _ev(dt(e)) - sc.m * dz(s * e, 3) / 6 * zl


def condition_III(f: TimeFamily, sc: Subcase) -> RatFunc:
    if sc.case == "B":
        return RatFunc(0)
    op = f.base(sc.scale)
    s = op.sigma
    sds = dt(s) / s
    rho_s = at(_rho(op, sc.s), sc.s)
    return sds - _ev(sds) - sc.m * rho_s * (Z - LAM) / ((Z - sc.s) * (LAM - sc.s))


# ---------------------------------------------------------------------------
# Hamiltonians


@dataclass
class IsomonodromyData:
    subcase: Subcase
    c: RatFunc
    a: RatFunc
    b: RatFunc
    H: RatFunc
    hamilton_rhs: tuple
    unified_H: RatFunc
    notes: list = field(default_factory=list)

    @property
    def unified_agrees(self) -> bool:
        return self.H == self.unified_H


def subcase_hamiltonian(f: TimeFamily, sc: Subcase) -> RatFunc:
    """H = m(η(λ) + (τ(λ) - (λ-s)ρ'(λ))μ + σ(λ)μ²).

    Case B uses σ' in place of (λ-s)ρ'.
    """
    op = f.base(sc.scale)
    s, t, e = op.sigma, op.tau, op.eta
    if sc.case == "A":
        drift = (LAM - sc.s) * _ev(dz(_rho(op, sc.s)))
    else:
        drift = _ev(dz(s))
    H = sc.m * (_ev(e) + (_ev(t) - drift) * MU + _ev(s) * MU * MU)
    if sc.scale != 1:
        H = sc.scale * H.subs("t", sc.scale * T)
    return H


def unified_hamiltonian(f: TimeFamily, c: RatFunc) -> RatFunc:
    s, t, e = f.sigma, f.tau, f.eta
    return _ev(e * c / s) + MU * (_ev(t * c / s) - _ev(dz(c))) + MU * MU * _ev(c)


def hamilton_rhs(H: RatFunc) -> tuple[RatFunc, RatFunc]:
    return H.diff("mu"), -H.diff("lam")


def motion_from_c(f: TimeFamily, c: RatFunc) -> tuple[RatFunc, RatFunc]:
    """λ̇ and μ̇ written directly in terms of c, σ, τ, η."""
    s, t, e = f.sigma, f.tau, f.eta
    lam_dot = 2 * _ev(c) * MU - _ev(dz(c)) + _ev(c * t / s)
    mu_dot = (-_ev(c * dz(e) / s)
              - MU * (_ev(c * dz(t) / s) - _ev(c * dz(s, 2) / (2 * s)) - dz(c, 2) / 2)
              - MU * MU * _ev(dz(s) * c / s))
    return lam_dot, mu_dot


def hamiltonian(f: TimeFamily, sc: Subcase | None = None) -> IsomonodromyData:
    if sc is None:
        sc = select_subcase(f)[0]
    c = build_c(f, sc)
    H = subcase_hamiltonian(f, sc)
    a = c / (Z - LAM)
    b = -_ev(c) * MU / (Z - LAM)
    return IsomonodromyData(sc, c, a, b, H, hamilton_rhs(H), unified_hamiltonian(f, c))


# ---------------------------------------------------------------------------
# full compatibility


def deformed_pq(f: TimeFamily) -> tuple[RatFunc, RatFunc]:
    s, t, e = f.sigma, f.tau, f.eta
    p = t / s - 1 / (Z - LAM)
    q = (e - _ev(e) - MU * (_ev(t) - _ev(dz(s))) - MU * MU * _ev(s)
         + MU * _ev(s) / (Z - LAM)) / s
    return p, q


def total_dt(g: RatFunc, lam_dot: RatFunc, mu_dot: RatFunc) -> RatFunc:
    return dt(g) + g.diff("lam") * lam_dot + g.diff("mu") * mu_dot


def compatibility_residuals(f: TimeFamily, a: RatFunc, b: RatFunc,
                            lam_dot: RatFunc, mu_dot: RatFunc) -> dict:
    p, q = deformed_pq(f)
    r2 = total_dt(p, lam_dot, mu_dot) - a * dz(p) + 2 * dz(b) - p * dz(a) + dz(a, 2)
    r1 = (total_dt(q, lam_dot, mu_dot) + p * dz(b) - 2 * q * dz(a) - a * dz(q)
          + dz(b, 2))
    return {"compa2_residual": r2, "compa1_residual": r1}


def verify_full_compatibility(f: TimeFamily, data: IsomonodromyData) -> dict:
    lam_dot, mu_dot = data.hamilton_rhs
    out = compatibility_residuals(f, data.a, data.b, lam_dot, mu_dot)
    out["ok"] = out["compa2_residual"].is_zero and out["compa1_residual"].is_zero
    return out
