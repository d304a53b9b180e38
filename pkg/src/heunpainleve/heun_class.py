"""Heun class operators σ∂² + τ∂ + η: classification, normal forms and swaps.

σ is kept in factored form, a constant times Π (z - r)^m with roots free of
z, so ranks can be read at exact points.  η = ξ/σ is stored as a rational
function; the class condition asks ξ to be a polynomial of degree ≤ 4.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import (
    IrrationalBranch,
    NotHeunClass,
    RootNotAtOrigin,
    SigmaNotFactored,
)
from .polyalg import INF, NEG_INF, RatFunc, as_ratfunc
from .sing_analysis import (
    PrincipalOperator,
    Step,
    TransformRecord,
    _Ctx,
    absolute_rank,
    indices,
    rank,
)

Z = RatFunc("z")
FUCHSIAN = "1̲"


# ---------------------------------------------------------------------------
# the operator


def _zdeg(f: RatFunc):
    return f.degree("z")


@dataclass(frozen=True)
class HeunOperator:
    roots: tuple
    lead: RatFunc
    tau: RatFunc
    eta: RatFunc

    def __post_init__(self):
        roots = tuple((as_ratfunc(r), int(m)) for r, m in self.roots if int(m) > 0)
        object.__setattr__(self, "roots", roots)
        object.__setattr__(self, "lead", as_ratfunc(self.lead))
        object.__setattr__(self, "tau", as_ratfunc(self.tau))
        object.__setattr__(self, "eta", as_ratfunc(self.eta))
        if self.lead.is_zero:
            raise NotHeunClass("sigma must be nonzero")
        if not self.lead.free_of("z") or any(not r.free_of("z") for r, _ in roots):
            raise SigmaNotFactored("roots and leading coefficient must be free of z")
        if self.sigma_degree > 3:
            raise NotHeunClass(f"deg sigma = {self.sigma_degree} > 3")
        if not self.tau.is_polynomial_in("z") or _zdeg(self.tau) > 2:
            raise NotHeunClass(f"tau = {self.tau} is not a polynomial of degree <= 2")
        xi = self.xi
        if not xi.is_polynomial_in("z") or _zdeg(xi) > 4:
            raise NotHeunClass(f"xi = {xi} is not a polynomial of degree <= 4")

    def _key(self):
        roots = tuple(sorted((r.canonical_text(), m) for r, m in self.roots))
        return roots, self.lead, self.tau, self.eta

    def __eq__(self, other):
        if not isinstance(other, HeunOperator):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    @classmethod
    def build(cls, roots, tau, eta, lead=1) -> "HeunOperator":
        """``roots`` is a list of roots or (root, multiplicity) pairs."""
        pairs: list = []
        for r in roots:
            r, m = (r if isinstance(r, tuple) else (r, 1))
            r = as_ratfunc(r)
            for j, (s, k) in enumerate(pairs):
                if s == r:
                    pairs[j] = (s, k + m)
                    break
            else:
                pairs.append((r, m))
        return cls(tuple(pairs), lead, tau, eta)

    @property
    def sigma_degree(self) -> int:
        return sum(m for _, m in self.roots)

    @property
    def sigma(self) -> RatFunc:
        out = self.lead
        for r, m in self.roots:
            out = out * (Z - r) ** m
        return out

    @property
    def xi(self) -> RatFunc:
        return self.eta * self.sigma

    @property
    def principal(self) -> PrincipalOperator:
        s = self.sigma
        return PrincipalOperator(self.tau / s, self.eta / s)

    @property
    def grounded(self) -> bool:
        return self.eta.is_polynomial_in("z") and _zdeg(self.eta) <= 1

    def root_multiplicity(self, point) -> int:
        point = as_ratfunc(point)
        return next((m for r, m in self.roots if r == point), 0)

    def subs(self, mapping) -> "HeunOperator":
        roots = tuple((r.subs_many(mapping), m) for r, m in self.roots)
        return HeunOperator(roots, self.lead.subs_many(mapping),
                            self.tau.subs_many(mapping), self.eta.subs_many(mapping))

    def same_operator(self, other: "HeunOperator") -> bool:
        return (self.sigma == other.sigma and self.tau == other.tau
                and self.eta == other.eta)


# ---------------------------------------------------------------------------
# transformations on (σ, τ, η)


def heun_sandwich(op: HeunOperator, rprime) -> HeunOperator:
    rp = as_ratfunc(rprime)
    s = op.sigma
    tau = op.tau + 2 * s * rp
    eta = op.eta + op.tau * rp + s * (rp * rp + rp.diff("z"))
    return HeunOperator(op.roots, op.lead, tau, eta)


def _rprime(kind, site, data) -> RatFunc:
    if kind == "power":
        (kappa,) = data
        base = Z if site is INF else Z - as_ratfunc(site)
        return as_ratfunc(kappa) / base
    k, kappa = data
    if site is INF:
        return as_ratfunc(kappa) * Z ** k
    return as_ratfunc(kappa) / (Z - as_ratfunc(site)) ** k


def affine(op: HeunOperator, alpha, beta) -> HeunOperator:
    """Substitute z = αw + β (written in z again)."""
    alpha, beta = as_ratfunc(alpha), as_ratfunc(beta)
    image = alpha * Z + beta
    roots = tuple(((r - beta) / alpha, m) for r, m in op.roots)
    lead = op.lead * alpha ** op.sigma_degree / alpha ** 2
    return HeunOperator(roots, lead, op.tau.subs("z", image) / alpha, op.eta.subs("z", image))


def swap_infinity(op: HeunOperator) -> HeunOperator:
    """w = 1/z for σ = zρ: σ̃ = w³ρ(1/w), τ̃ = w²(2ρ(1/w) - τ(1/w)), η̃ = η(1/w)."""
    if op.root_multiplicity(0) == 0:
        raise RootNotAtOrigin("sigma(0) != 0; translate a root to the origin first")
    inv = 1 / Z
    rho = op.sigma / Z
    lead = op.lead
    roots = []
    for r, m in op.roots:
        if not r.is_zero:
            lead = lead * (-r) ** m
            roots.append((1 / r, m))
    zero_mult = 4 - op.sigma_degree
    if zero_mult:
        roots.insert(0, (RatFunc(0), zero_mult))
    tau = Z ** 2 * (2 * rho.subs("z", inv) - op.tau.subs("z", inv))
    eta = op.eta.subs("z", inv)
    out = HeunOperator(tuple(roots), lead, tau, eta)
    if out.sigma != Z ** 3 * rho.subs("z", inv):
        raise AssertionError("root bookkeeping under the swap is inconsistent")
    return out


def scale(op: HeunOperator, c) -> HeunOperator:
    c = as_ratfunc(c)
    return HeunOperator(op.roots, op.lead / c, op.tau / c, op.eta / c)


def apply_heun_step(op: HeunOperator, st: Step) -> HeunOperator:
    if st.kind in ("power", "exp"):
        return heun_sandwich(op, _rprime(st.kind, st.site, st.data))
    if st.kind == "scale":
        return scale(op, st.data[0])
    if st.kind == "moebius":
        a, b, c, d = (as_ratfunc(x) for x in st.data)
        if c.is_zero:
            return affine(op, d / a, -b / a)
        if a.is_zero and d.is_zero and b == c:
            return swap_infinity(op)
        raise NotHeunClass("only affine maps and z -> 1/z keep the Heun class form")
    raise NotHeunClass(f"step {st.kind} has no Heun class counterpart")


def replay(record: TransformRecord, op: HeunOperator) -> HeunOperator:
    for st in record.steps:
        op = apply_heun_step(op, st)
    return op


def affine_step(alpha, beta) -> Step:
    """The step for z = αw + β, i.e. w = (z - β)/α."""
    return Step("moebius", None, (RatFunc(1), -as_ratfunc(beta), RatFunc(0), as_ratfunc(alpha)))


SWAP_STEP = Step("moebius", None, (RatFunc(0), RatFunc(1), RatFunc(1), RatFunc(0)))


def grounded_swap(op: HeunOperator) -> tuple[HeunOperator, RatFunc]:
    """Swap 0 with infinity in a grounded operator and re-ground with w^α."""
    if not op.grounded:
        raise NotHeunClass("grounded_swap needs a grounded operator")
    rho = op.sigma / Z
    r2 = rho.diff("z").diff("z")
    t2 = op.tau.diff("z").diff("z")
    e1 = op.eta.diff("z")
    roots = _quadratic_roots(r2 / 2, r2 / 2 - t2 / 2, e1)
    alpha = roots[0]
    out = heun_sandwich(swap_infinity(op), alpha / Z)
    return out, alpha


def swap_mapping_properties(op: HeunOperator) -> dict:
    """Both sides of the four equivalences for the swap at the origin."""
    sw = swap_infinity(op)
    s, t, xi = op.sigma, op.tau, op.xi
    at0 = lambda f: f.subs("z", 0)
    s1 = s.diff("z")
    st, se = sw.sigma, sw.xi
    deg = lambda f: _zdeg(f)
    out = {
        "xi0_vs_deg_xi_le_3": (at0(xi).is_zero, deg(se) <= 3),
        "dsigma0_vs_deg_sigma_le_2": (at0(s1).is_zero, deg(st) <= 2),
        "dsigma0_tau0_vs_degs": (at0(s1).is_zero and at0(t).is_zero,
                                 deg(st) <= 2 and deg(sw.tau) <= 1),
        "dsigma0_xi01_vs_degs": (at0(s1).is_zero and at0(xi).is_zero
                                 and at0(xi.diff("z")).is_zero,
                                 deg(st) <= 2 and deg(se) <= 2),
    }
    return {k: {"left": a, "right": b, "agree": a == b} for k, (a, b) in out.items()}


# ---------------------------------------------------------------------------
# class membership


def _lcm(a: RatFunc, b: RatFunc) -> RatFunc:
    return a * (b / a).numer if not a.is_zero else b


def mn_class_membership(op: PrincipalOperator, n: int) -> dict:
    """Whether ∂² + p∂ + q lies in the M_n class and in the grounded M_n class."""
    p, q = op.p, op.q
    need = RatFunc(1)
    if not q.is_zero:
        for fac, e in q.denom.factor_list():
            if e > 0 and not fac.free_of("z"):
                need = need * fac ** math.ceil(e / 2)
    sigma = _lcm(p.denom, need)
    def deg(f):
        if f.is_zero:
            return NEG_INF
        return _zdeg(f) if f.is_polynomial_in("z") else math.inf

    in_class = (deg(sigma) <= n and deg(p * sigma) <= n - 1
                and deg(q * sigma * sigma) <= 2 * n - 2)
    sg = _lcm(p.denom, q.denom)
    grounded = deg(sg) <= n and deg(p * sg) <= n - 1 and deg(q * sg) <= n - 2
    return {"in_class": bool(in_class), "grounded": bool(grounded),
            "sigma": sigma, "grounded_sigma": sg}


# ---------------------------------------------------------------------------
# classification

NAMED_TYPES = {
    (1, 1, 1, 1): "standard Heun",
    (2, 1, 1): "non-degenerate confluent Heun",
    (Fraction(3, 2), 1, 1): "degenerate confluent Heun",
    (2, 2): "non-degenerate doubly confluent Heun",
    (2, Fraction(3, 2)): "degenerate doubly confluent Heun",
    (Fraction(3, 2), Fraction(3, 2)): "doubly degenerate doubly confluent Heun",
    (3, 1): "non-degenerate biconfluent Heun",
    (Fraction(5, 2), 1): "degenerate biconfluent Heun",
    (4,): "non-degenerate triconfluent Heun",
    (Fraction(7, 2),): "degenerate triconfluent Heun",
}

SUPERTYPES = {
    "standard Heun": "(1111)",
    "non-degenerate confluent Heun": "(112)",
    "degenerate confluent Heun": "(112)",
    "non-degenerate doubly confluent Heun": "(22)",
    "degenerate doubly confluent Heun": "(22)",
    "doubly degenerate doubly confluent Heun": "(22)",
    "non-degenerate biconfluent Heun": "(13)",
    "degenerate biconfluent Heun": "(13)",
    "non-degenerate triconfluent Heun": "(4)",
    "degenerate triconfluent Heun": "(4)",
}


def _token(r: Fraction) -> str:
    if r <= 1:
        return FUCHSIAN
    return str(r.numerator) if r.denominator == 1 else f"{r.numerator}/{r.denominator}"


def render_symbol(finite, infinity) -> str:
    toks = [_token(r) for r in finite]
    sep = " " if any("/" in t for t in toks) else ""
    inf = _token(infinity) if infinity > 0 else ""
    return "(" + sep.join(toks) + ";" + inf + ")"


def _class_rank(r: Fraction) -> Fraction:
    return Fraction(1) if 0 < r <= 1 else r


def _riemann_row(finite, infinity) -> str:
    ms = tuple(sorted((_class_rank(r) for r in list(finite) + [infinity] if r > 0), reverse=True))
    if ms == (1, 1, 1):
        return "2F1"
    if ms == (2, 1):
        return "1F1" if infinity == 2 else "2F0"
    if ms == (Fraction(3, 2), 1):
        return "0F1"
    if ms == (3,):
        return "Hermite"
    if ms == (Fraction(5, 2),):
        return "Airy"
    if ms == (1, 1):
        return "Euler"
    if ms == (2,):
        return "1d Helmholtz"
    if ms == (1,):
        return "1d Laplace"
    return "trivial" if not ms else "riemann"


@dataclass
class HeunTypeSymbol:
    finite_ranks: tuple
    infinity_rank: Fraction
    symbol: str
    name: str
    riemann_reducible: bool
    riemann_row: str | None = None
    supertype: str | None = None
    assumptions: list = field(default_factory=list)
    points: tuple = ()

    @property
    def multiset(self) -> tuple:
        allr = [_class_rank(r) for r in self.finite_ranks] + [_class_rank(self.infinity_rank)]
        return tuple(sorted((r for r in allr if r > 0), reverse=True))

    @property
    def ascii(self) -> str:
        return self.symbol.replace(FUCHSIAN, "1_")


def _point_class(A, point, kw) -> Fraction:
    """0 at regular points, 1 at Fuchsian ones, the absolute rank otherwise."""
    r = rank(A, point, **kw)
    if r == 0:
        return Fraction(0)
    if r <= 1:
        return Fraction(1)
    return absolute_rank(A, point, **kw)


def classify(op: HeunOperator, *, generic: bool = False,
             assumptions: list | None = None) -> HeunTypeSymbol:
    """Type symbol of the singular points among the roots of σ and infinity.

    Fuchsian points render as 1̲; irregular points carry their absolute rank,
    which is unchanged by the sandwiches used in normal-form reduction.
    """
    if assumptions is None:
        assumptions = []
    A = op.principal
    kw = dict(generic=generic, assumptions=assumptions)
    finite = []
    points = []
    for r, _ in op.roots:
        rk = _point_class(A, r, kw)
        points.append((r, rk))
        if rk > 0:
            finite.append(rk)
    rinf = _point_class(A, INF, kw)
    points.append((INF, rinf))
    finite.sort(key=lambda x: (_class_rank(x), x), reverse=True)
    sym = render_symbol(finite, rinf)
    ceil_sum = sum(math.ceil(r) for r in finite) + math.ceil(rinf)
    ms = tuple(sorted((_class_rank(r) for r in finite + [rinf] if r > 0), reverse=True))
    if ceil_sum <= 3:
        return HeunTypeSymbol(tuple(finite), rinf, sym, "riemann_reducible", True,
                              _riemann_row(finite, rinf), None, assumptions, tuple(points))
    name = NAMED_TYPES.get(ms)
    if name is None:
        raise NotHeunClass(f"rank multiset {ms} is not a Heun class type")
    return HeunTypeSymbol(tuple(finite), rinf, sym, name, False, None, SUPERTYPES[name],
                          assumptions, tuple(points))


# ---------------------------------------------------------------------------
# normal forms


@dataclass
class NormalForm:
    type: str
    row: str
    operator: HeunOperator
    constraint_report: dict
    trace: TransformRecord
    riemann_row: str | None = None
    assumptions: list = field(default_factory=list)

    @property
    def sigma(self):
        return self.operator.sigma

    @property
    def tau(self):
        return self.operator.tau

    @property
    def eta(self):
        return self.operator.eta


def _quadratic_roots(a, b, c) -> list:
    """Roots of aκ² + bκ + c = 0 (a ≠ 0), a vanishing root first."""
    a, b, c = as_ratfunc(a), as_ratfunc(b), as_ratfunc(c)
    if a.is_zero:
        if b.is_zero:
            raise IrrationalBranch("degenerate quadratic")
        return [-c / b]
    if c.is_zero:
        return [RatFunc(0), -b / a]
    disc = b * b - 4 * a * c
    s = disc.sqrt()
    if s is None:
        raise IrrationalBranch(f"branch equation needs sqrt({disc})")
    return [(-b + s) / (2 * a), (-b - s) / (2 * a)]


def _coeffs(f: RatFunc, shift: int = 0) -> dict:
    g = f * Z ** shift
    if not g.is_polynomial_in("z"):
        raise NotHeunClass(f"{f} has poles away from the origin")
    return {k - shift: v for k, v in g.coeffs("z").items()}


class _Pipeline:
    def __init__(self, op: HeunOperator, generic: bool, assumptions: list):
        self.op = op
        self.steps: list = []
        self.ctx = _Ctx(generic=generic, assumptions=assumptions)

    def apply(self, st: Step):
        self.op = apply_heun_step(self.op, st)
        self.steps.append(st)

    def power(self, site, kappa):
        kappa = as_ratfunc(kappa)
        if not kappa.is_zero:
            self.apply(Step("power", site, (kappa,)))

    def exp(self, site, k, kappa):
        kappa = as_ratfunc(kappa)
        if not kappa.is_zero:
            self.apply(Step("exp", site, (k, kappa)))

    def affine(self, alpha, beta):
        alpha, beta = as_ratfunc(alpha), as_ratfunc(beta)
        if alpha == 1 and beta.is_zero:
            return
        self.apply(affine_step(alpha, beta))

    def monic(self):
        if self.op.lead != 1:
            self.apply(Step("scale", None, (self.op.lead,)))

    def nonzero(self, f, what="") -> bool:
        return not self.ctx.is_zero(as_ratfunc(f), what)

    def ground(self, point):
        pair = indices(self.op.principal, point, generic=self.ctx.generic,
                       assumptions=self.ctx.assumptions)
        if pair.roots is None:
            raise IrrationalBranch(f"indices at {point} are not in the coefficient field")
        rho = list(pair.roots)
        if any(r.is_zero for r in rho):
            return
        self.power(point, rho[0])

    def tau_c(self):
        return _coeffs(self.op.tau)

    def eta_c(self, shift=0):
        return _coeffs(self.op.eta, shift)


def _get(d: dict, k: int) -> RatFunc:
    return d.get(k, RatFunc(0))


def _distinct_degree_three(pl: _Pipeline) -> str:
    (r0, _), (r1, _), _ = pl.op.roots
    pl.affine(r1 - r0, r0)
    pl.monic()
    for r, _ in pl.op.roots:
        pl.ground(r)
    return "(1̲1̲1̲;1̲) a"


def _degree_two_distinct(pl: _Pipeline) -> str:
    (r0, _), (r1, _) = pl.op.roots
    pl.affine(r1 - r0, r0)
    pl.monic()
    for r, _ in pl.op.roots:
        pl.ground(r)
    t, e = pl.tau_c(), pl.eta_c()
    a2, b2 = _get(t, 2), _get(e, 2)
    kappa = _pick(_quadratic_roots(1, a2, b2), lambda k: a2 + 2 * k, pl)
    pl.exp(INF, 0, kappa)
    t, e = pl.tau_c(), pl.eta_c()
    if pl.nonzero(_get(t, 2), "(a2)"):
        return "(1̲1̲;2) a"
    if pl.nonzero(_get(e, 1), "(b1)"):
        return "(1̲1̲;3/2)"
    return "riemann"


def _pick(roots: list, surviving, pl: _Pipeline) -> RatFunc:
    """First root keeping the surviving constraint nonzero, else the first root."""
    for k in roots:
        v = as_ratfunc(surviving(k))
        if not v.is_zero and (v.is_constant or pl.ctx.generic):
            return k
    return roots[0]


def _degree_two_double(pl: _Pipeline) -> str:
    (r0, _), = pl.op.roots
    pl.affine(1, r0)
    pl.monic()
    t, e = pl.tau_c(), pl.eta_c(2)
    a2, a0 = _get(t, 2), _get(t, 0)
    pl.exp(INF, 0, _pick(_quadratic_roots(1, a2, _get(e, 2)), lambda k: a2 + 2 * k, pl))
    pl.exp(0, 2, _pick(_quadratic_roots(1, a0, _get(e, -2)), lambda k: a0 + 2 * k, pl))
    t, e = pl.tau_c(), pl.eta_c(2)
    a2, a1, a0 = _get(t, 2), _get(t, 1), _get(t, 0)
    if pl.nonzero(a0, "(a0)"):
        pl.power(0, -_get(e, -1) / a0)
        t, e = pl.tau_c(), pl.eta_c(2)
        if pl.nonzero(_get(t, 2), "(a2)"):
            return "(2;2) a"
        if pl.nonzero(_get(e, 1), "(b1)"):
            return "(2;3/2)"
        return "riemann"
    if pl.nonzero(a2, "(a2)"):
        pl.power(0, -_get(e, 1) / a2)
        e = pl.eta_c(2)
        if pl.nonzero(_get(e, -1), "(b-1)"):
            return "(3/2;2)"
        return "riemann"
    b1, bm1, b0 = _get(e, 1), _get(e, -1), _get(e, 0)
    has1, hasm1 = pl.nonzero(b1, "(b1)"), pl.nonzero(bm1, "(b-1)")
    if has1 and hasm1:
        pl.power(0, -a1 / 2)
        return "(3/2;3/2)"
    if has1 or hasm1:
        try:
            kappa = _quadratic_roots(1, a1 - 1, b0)[0]
        except IrrationalBranch:
            return "(1;3/2)" if has1 else "(3/2;1)"
        pl.power(0, kappa)
        return "(1;3/2)" if has1 else "(3/2;1)"
    return "riemann"


def _degree_one(pl: _Pipeline) -> str:
    (r0, _), = pl.op.roots
    pl.affine(1, r0)
    pl.monic()
    pl.ground(0)
    t, e = pl.tau_c(), pl.eta_c()
    a2 = _get(t, 2)
    pl.exp(INF, 1, _pick(_quadratic_roots(1, a2, _get(e, 3)), lambda k: a2 + 2 * k, pl))
    t, e = pl.tau_c(), pl.eta_c()
    a2 = _get(t, 2)
    if pl.nonzero(a2, "(a2)"):
        pl.exp(INF, 0, -_get(e, 2) / a2)
        return "(1̲;3) a"
    pl.exp(INF, 0, -_get(t, 1) / 2)
    e = pl.eta_c()
    if pl.nonzero(_get(e, 2), "(b2)"):
        return "(1̲;5/2)"
    return "riemann"


def _degree_zero(pl: _Pipeline) -> str:
    pl.monic()
    t, e = pl.tau_c(), pl.eta_c()
    a2 = _get(t, 2)
    pl.exp(INF, 2, _pick(_quadratic_roots(1, a2, _get(e, 4)), lambda k: a2 + 2 * k, pl))
    t, e = pl.tau_c(), pl.eta_c()
    a2 = _get(t, 2)
    if pl.nonzero(a2, "(a2)"):
        pl.exp(INF, 1, -_get(e, 3) / a2)
        e = pl.eta_c()
        pl.exp(INF, 0, -_get(e, 2) / a2)
        t = pl.tau_c()
        pl.affine(1, -_get(t, 1) / (2 * a2))
        return "(;4)"
    pl.exp(INF, 1, -_get(t, 1) / 2)
    t = pl.tau_c()
    pl.exp(INF, 0, -_get(t, 0) / 2)
    e = pl.eta_c()
    b3 = _get(e, 3)
    if pl.nonzero(b3, "(b3)"):
        pl.affine(1, -_get(e, 2) / (3 * b3))
        return "(;7/2)"
    return "riemann"


CONSTRAINTS = {
    "(1̲1̲1̲;1̲) a": lambda t, e, op: {"t != 0,1": True},
    "(1̲1̲;2) a": lambda t, e, op: {"a2 != 0": not _get(t, 2).is_zero},
    "(1̲1̲;3/2)": lambda t, e, op: {"b1 != 0": not _get(e, 1).is_zero},
    "(2;2) a": lambda t, e, op: {"a2 != 0": not _get(t, 2).is_zero,
                                 "a0 = c != 0": not _get(t, 0).is_zero},
    "(2;3/2)": lambda t, e, op: {"b1 != 0": not _get(e, 1).is_zero,
                                 "a0 = c != 0": not _get(t, 0).is_zero},
    "(3/2;2)": lambda t, e, op: {"b-1 != 0": not _get(e, -1).is_zero,
                                 "a2 = c != 0": not _get(t, 2).is_zero},
    "(3/2;3/2)": lambda t, e, op: {"b-1 != 0": not _get(e, -1).is_zero,
                                   "b1 = c != 0": not _get(e, 1).is_zero},
    "(1;3/2)": lambda t, e, op: {"b1 = c != 0": not _get(e, 1).is_zero},
    "(3/2;1)": lambda t, e, op: {"b-1 = c != 0": not _get(e, -1).is_zero},
    "(1̲;3) a": lambda t, e, op: {"a2 = c != 0": not _get(t, 2).is_zero},
    "(1̲;5/2)": lambda t, e, op: {"b2 = c != 0": not _get(e, 2).is_zero},
    "(;4)": lambda t, e, op: {"a2 = c != 0": not _get(t, 2).is_zero},
    "(;7/2)": lambda t, e, op: {"b3 = c != 0": not _get(e, 3).is_zero},
}


def to_normal_form(op: HeunOperator, *, generic: bool = False,
                   assumptions: list | None = None) -> NormalForm:
    """Reduce to a row of the normal-form table (or flag Riemann class reduction)."""
    if assumptions is None:
        assumptions = []
    pl = _Pipeline(op, generic, assumptions)
    mults = sorted((m for _, m in op.roots), reverse=True)
    if mults == [1, 1, 1]:
        row = _distinct_degree_three(pl)
    elif mults == [2, 1]:
        (rd, _), = [(r, m) for r, m in op.roots if m == 2]
        (rs, _), = [(r, m) for r, m in op.roots if m == 1]
        pl.affine(rs - rd, rd)
        pl.apply(SWAP_STEP)
        row = _degree_two_distinct(pl)
    elif mults == [3]:
        (r0, _), = op.roots
        pl.affine(1, r0)
        pl.apply(SWAP_STEP)
        row = _degree_one(pl)
    elif mults == [1, 1]:
        row = _degree_two_distinct(pl)
    elif mults == [2]:
        row = _degree_two_double(pl)
    elif mults == [1]:
        row = _degree_one(pl)
    else:
        row = _degree_zero(pl)
    final = pl.op
    trace = TransformRecord(tuple(pl.steps))
    cls = classify(final, generic=generic, assumptions=assumptions)
    if cls.riemann_reducible:
        return NormalForm("riemann_reducible", row, final, {}, trace, cls.riemann_row,
                          assumptions)
    shift = 2 if final.sigma_degree >= 2 else 0
    report = CONSTRAINTS.get(row, lambda *a: {})(_coeffs(final.tau), _coeffs(final.eta, shift),
                                                 final)
    return NormalForm(cls.symbol, row, final, report, trace, None, assumptions)


def to_form_b(nf_op: HeunOperator) -> tuple[HeunOperator, Step]:
    """Trade b₁z for b₋₁/z with the power κ = -b₁/a₂ at the origin."""
    t = _coeffs(nf_op.tau)
    e = _coeffs(nf_op.eta, 2)
    kappa = -_get(e, 1) / _get(t, 2)
    st = Step("power", RatFunc(0), (kappa,))
    return apply_heun_step(nf_op, st), st


# ---------------------------------------------------------------------------
# reference tables


@dataclass(frozen=True)
class TableRow:
    symbol: str
    roots: tuple
    tau_powers: tuple
    eta_powers: tuple
    nonzero: tuple
    variety: str = ""


def _r(*pairs):
    return tuple(pairs)


NORMAL_FORM_TABLE = (
    TableRow("(1̲1̲1̲;1̲)", _r((0, 1), (1, 1), ("t", 1)), (2, 1, 0), (1, 0), (), "a"),
    TableRow("(1̲1̲1̲;1̲)", _r((0, 1), (1, 1), ("t", 1)), (2, 1, 0), (0, -1), (), "b"),
    TableRow("(1̲1̲;2)", _r((0, 1), (1, 1)), (2, 1, 0), (1, 0), ("a2",), "a"),
    TableRow("(1̲1̲;2)", _r((0, 1), (1, 1)), (2, 1, 0), (0, -1), ("a2",), "b"),
    TableRow("(21̲;1̲)", _r((0, 2), (1, 1)), (2, 1, 0), (1, 0), ("a0",), "a"),
    TableRow("(21̲;1̲)", _r((0, 2), (1, 1)), (2, 1, 0), (0, -1), ("a0",), "b"),
    TableRow("(1̲1̲;3/2)", _r((0, 1), (1, 1)), (1, 0), (1, 0), ("b1",)),
    TableRow("(3/2 1̲;1̲)", _r((0, 2), (1, 1)), (2, 1), (0, -1), ("b-1",)),
    TableRow("(2;2)", _r((0, 2)), (2, 1, 0), (1, 0), ("a2", "a0"), "a"),
    TableRow("(2;2)", _r((0, 2)), (2, 1, 0), (0, -1), ("a2", "a0"), "b"),
    TableRow("(3/2;2)", _r((0, 2)), (2, 1), (0, -1), ("b-1", "a2")),
    TableRow("(2;3/2)", _r((0, 2)), (1, 0), (1, 0), ("b1", "a0")),
    TableRow("(3/2;3/2)", _r((0, 2)), (), (1, 0, -1), ("b-1", "b1")),
    TableRow("(1̲;3/2)", _r((0, 2)), (1,), (1,), ("b1",)),
    TableRow("(3/2;1̲)", _r((0, 2)), (1,), (-1,), ("b-1",)),
    TableRow("(1̲;3)", _r((0, 1)), (2, 1, 0), (1, 0), ("a2",), "a"),
    TableRow("(1̲;3)", _r((0, 1)), (2, 1, 0), (0, -1), ("a2",), "b"),
    TableRow("(3;1̲)", _r((0, 3)), (2, 1, 0), (1, 0), ("a0",), "a"),
    TableRow("(3;1̲)", _r((0, 3)), (2, 1, 0), (0, -1), ("a0",), "b"),
    TableRow("(1̲;5/2)", _r((0, 1)), (0,), (2, 1, 0), ("b2",)),
    TableRow("(5/2;1̲)", _r((0, 3)), (2,), (0, -1, -2), ("b-2",)),
    TableRow("(;4)", _r(), (2, 0), (1, 0), ("a2",)),
    TableRow("(;7/2)", _r(), (), (3, 1, 0), ("b3",)),
)

# Rows whose operators are z times a Riemann class operator.
TRIVIAL_ROWS = {"(1̲;3/2)", "(3/2;1̲)"}


def _nonzero_rational(rng: random.Random, lo=-9, hi=9) -> Fraction:
    while True:
        v = Fraction(rng.randint(lo, hi), rng.randint(1, 5))
        if v:
            return v


def instantiate_row(row: TableRow, rng: random.Random) -> HeunOperator:
    """The row's shape with random nonzero rational coefficients."""
    t = None
    while t is None or t in (0, 1):
        t = _nonzero_rational(rng)
    roots = [(RatFunc(t) if r == "t" else RatFunc(r), m) for r, m in row.roots]
    tau = sum((_nonzero_rational(rng) * Z ** k for k in row.tau_powers), RatFunc(0))
    eta = sum((_nonzero_rational(rng) * Z ** k for k in row.eta_powers), RatFunc(0))
    return HeunOperator.build(roots, tau, eta)


def _sym(*names):
    return tuple(RatFunc(n) for n in names)


def riemann_table() -> list[tuple[str, str, HeunOperator]]:
    a, b, c = _sym("a", "b", "c")
    return [
        ("2F1", "(1̲1̲;1̲)", HeunOperator.build([0, 1], c - (a + b + 1) * Z, -a * b, lead=-1)),
        ("2F0", "(2;1̲)", HeunOperator.build([(0, 2)], -1 + (a + b + 1) * Z, a * b)),
        ("1F1", "(1̲;2)", HeunOperator.build([0], c - Z, -a)),
        ("0F1", "(1̲;3/2)", HeunOperator.build([0], c, -1)),
        ("Hermite", "(;3)", HeunOperator.build([], -2 * Z, -2 * a)),
        ("Airy", "(;5/2)", HeunOperator.build([], 0, Z)),
        ("Euler II", "(1̲;1̲)", HeunOperator.build([(0, 2)], c * Z, 0)),
        ("Euler I", "(1̲;1̲)", HeunOperator.build([0], c, 0)),
        ("1d Helmholtz", "(;2)", HeunOperator.build([], 0, 1)),
        ("1d Laplace", "(;1̲)", HeunOperator.build([], 0, 0)),
    ]
