"""Local analysis of ∂² + p∂ + q at rational points and at infinity.

Everything is computed at the origin of a local coordinate x: x = z - z0 at a
finite point, x = 1/z at infinity.  In x the operator at infinity becomes
∂² + (2/x - p(1/x)/x²)∂ + q(1/x)/x⁴, whose local exponents are the indices at
infinity.

Sandwiching ``e^{-r} A e^{r}`` replaces (p, q) by
(p + 2r', q + p r' + r'² + r'') and multiplies solutions by e^{-r}, so a
power sandwich with r' = κ/(z - z0) lowers both indices at z0 by κ (at
infinity, with r' = κ/z, it raises them by κ).

Square roots that do not exist in the coefficient field are carried by the
formal symbol ``RADICAL`` and reduced modulo RADICAL² = radicand.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator

from .errors import (
    AlgebraicPoint,
    IrrationalBranch,
    IrrationalIndicialRoots,
    NonIntegerIndexDifference,
    NotFuchsian,
    RankBelowTwo,
    UndecidableLeadingCoefficient,
)
from .polyalg import (
    INF,
    NEG_INF,
    RatFunc,
    as_ratfunc,
    degree_or_neg_inf,
    laurent,
    local_coefficients,
    localize,
)

Z = RatFunc("z")
RADICAL = "rad_"
DEFAULT_ORDER = 20


# ---------------------------------------------------------------------------
# operators and records


@dataclass(frozen=True)
class PrincipalOperator:
    """The operator ∂² + p∂ + q in the variable z."""

    p: RatFunc
    q: RatFunc

    def __post_init__(self):
        object.__setattr__(self, "p", as_ratfunc(self.p))
        object.__setattr__(self, "q", as_ratfunc(self.q))

    def apply(self, u: RatFunc) -> RatFunc:
        u = as_ratfunc(u)
        du = u.diff("z")
        return du.diff("z") + self.p * du + self.q * u

    def subs(self, mapping) -> "PrincipalOperator":
        return PrincipalOperator(self.p.subs_many(mapping), self.q.subs_many(mapping))


@dataclass(frozen=True)
class Step:
    """One transformation: power | exp | moebius | quadratic | scale."""

    kind: str
    site: object = None
    data: tuple = ()


@dataclass(frozen=True)
class TransformRecord:
    steps: tuple = ()

    def then(self, *steps: Step) -> "TransformRecord":
        return TransformRecord(self.steps + tuple(steps))

    def __len__(self):
        return len(self.steps)

    def replay(self, op: PrincipalOperator) -> PrincipalOperator:
        for st in self.steps:
            op = apply_step(op, st)
        return op


def apply_step(op: PrincipalOperator, st: Step) -> PrincipalOperator:
    if st.kind == "power":
        return sandwich_power(op, st.site, st.data[0])
    if st.kind == "exp":
        k, kappa = st.data
        return sandwich_exp(op, st.site, kappa, k)
    if st.kind == "moebius":
        return moebius_transform(op, *st.data)
    if st.kind == "quadratic":
        return quadratic_substitution(op)
    if st.kind == "scale":
        return op
    raise ValueError(f"unknown step kind {st.kind!r}")


@dataclass(frozen=True)
class IndexPair:
    """Indices at a point.

    ``roots`` holds the two indices when they lie in the coefficient field;
    otherwise it is None and ``symbolic`` holds them in terms of RADICAL with
    RADICAL² = ``radicand``.
    """

    total: RatFunc
    product: RatFunc
    roots: tuple | None
    symbolic: tuple
    radicand: RatFunc | None = None

    def __iter__(self) -> Iterator[RatFunc]:
        if self.roots is None:
            raise IrrationalIndicialRoots(
                f"indices involve sqrt({self.radicand}); sum {self.total}, product {self.product}")
        return iter(self.roots)

    def as_set(self) -> set:
        return set(self)


@dataclass
class SingularityReport:
    location: object
    rank: Fraction
    rounded_rank: int
    absolute_rank: Fraction | None = None
    indices: IndexPair | None = None
    fuchsian: bool = False
    grounded: bool | None = None
    assumptions: list = field(default_factory=list)

    @property
    def twice_rank(self) -> int:
        return int(2 * self.rank)


@dataclass(frozen=True)
class FormalSolution:
    """exp(Σ w_k x^k / k) x^index Σ v_j x^(j/ramification) in the local coordinate x."""

    kind: str
    exponential_part: dict
    index: RatFunc
    series: tuple
    ramification: int = 1
    log_partner: bool = False
    radicand: RatFunc | None = None
    local_operator: PrincipalOperator | None = None


@dataclass(frozen=True)
class ReducedBranch:
    record: TransformRecord
    operator: PrincipalOperator
    index: RatFunc


@dataclass(frozen=True)
class Reduction:
    absolute_rank: Fraction
    branches: tuple

    @property
    def record(self) -> TransformRecord:
        return self.branches[0].record

    @property
    def operator(self) -> PrincipalOperator:
        return self.branches[0].operator


@dataclass
class FrobeniusOutcome:
    case: int
    m: float
    l: float
    exists: bool
    solutions: list
    start: int | None = None
    condition: RatFunc | None = None
    obstruction: RatFunc | None = None


# ---------------------------------------------------------------------------
# genericity bookkeeping


@dataclass
class _Ctx:
    generic: bool = False
    assumptions: list | None = None
    radicand: RatFunc | None = None

    def note(self, text: str):
        if self.assumptions is not None and text not in self.assumptions:
            self.assumptions.append(text)

    def reduce(self, f: RatFunc) -> RatFunc:
        if self.radicand is None:
            return f
        return reduce_radical(f, self.radicand)

    def is_zero(self, f: RatFunc, what: str = "") -> bool:
        f = self.reduce(as_ratfunc(f))
        if f.is_zero:
            return True
        parts = _radical_parts(f) if RADICAL in f.variables else (f,)
        parts = [c for c in parts if not c.is_zero]
        if any(c.is_constant for c in parts):
            return False
        if self.generic:
            self.note(f"{f} != 0")
            return False
        raise UndecidableLeadingCoefficient(f"cannot decide whether {f} vanishes {what}".strip())


def _ctx(generic, assumptions) -> _Ctx:
    return _Ctx(generic=generic, assumptions=assumptions)


def _split_radical(poly: RatFunc, radicand: RatFunc):
    a0, a1 = RatFunc(0), RatFunc(0)
    for k, c in poly.coeffs(RADICAL).items():
        term = c * radicand ** (k // 2)
        if k % 2:
            a1 = a1 + term
        else:
            a0 = a0 + term
    return a0, a1


def reduce_radical(f: RatFunc, radicand: RatFunc) -> RatFunc:
    """Rewrite f as (c0 + c1·RADICAL)/d using RADICAL² = radicand."""
    f = as_ratfunc(f)
    if RADICAL not in f.variables:
        return f
    a0, a1 = _split_radical(f.numer, radicand)
    b0, b1 = _split_radical(f.denom, radicand)
    s = RatFunc(RADICAL)
    den = b0 * b0 - b1 * b1 * radicand
    return (a0 * b0 - a1 * b1 * radicand + (a1 * b0 - a0 * b1) * s) / den


def _radical_parts(f: RatFunc):
    num = f.numer.coeffs(RADICAL)
    d = f.denom
    return num.get(0, RatFunc(0)) / d, num.get(1, RatFunc(0)) / d


def conjugate(f: RatFunc) -> RatFunc:
    return as_ratfunc(f).subs(RADICAL, -RatFunc(RADICAL))


# ---------------------------------------------------------------------------
# sandwiches and changes of variable


def sandwich(op: PrincipalOperator, rprime: RatFunc) -> PrincipalOperator:
    """e^{-r} A e^{r} for a given r'."""
    rp = as_ratfunc(rprime)
    return PrincipalOperator(op.p + 2 * rp, op.q + op.p * rp + rp * rp + rp.diff("z"))


def _site_coordinate(site):
    return Z if site is INF else Z - as_ratfunc(site)


def sandwich_power(op: PrincipalOperator, z0, kappa) -> PrincipalOperator:
    """Sandwich with (z - z0)^κ, or with z^κ when ``z0`` is infinity."""
    kappa = as_ratfunc(kappa)
    if kappa.is_zero:
        return op
    return sandwich(op, kappa / _site_coordinate(z0))


def sandwich_exp(op: PrincipalOperator, z0, kappa, k: int) -> PrincipalOperator:
    """Sandwich with r' = κ(z - z0)^(-k) (k ≥ 2), or r' = κ z^k at infinity (k ≥ 0)."""
    kappa = as_ratfunc(kappa)
    if z0 is INF:
        if k < 0:
            raise ValueError("exponential sandwich at infinity needs k >= 0")
        rp = kappa * Z ** k
    else:
        if k < 2:
            raise ValueError("exponential sandwich at a finite point needs k >= 2")
        rp = kappa / _site_coordinate(z0) ** k
    return sandwich(op, rp)


def moebius_transform(op: PrincipalOperator, a, b, c, d) -> PrincipalOperator:
    """Change of variable w = (az + b)/(cz + d); the result is written in z again."""
    a, b, c, d = (as_ratfunc(x) for x in (a, b, c, d))
    det = a * d - b * c
    if det.is_zero:
        from .errors import SingularHomography
        raise SingularHomography("ad - bc = 0")
    phi = (d * Z - b) / (-c * Z + a)
    d1 = phi.diff("z")
    d2 = d1.diff("z")
    p = op.p.subs("z", phi)
    q = op.q.subs("z", phi)
    return PrincipalOperator(d1 * p - d2 / d1, d1 * d1 * q)


def at_infinity(op: PrincipalOperator) -> PrincipalOperator:
    """The operator in the coordinate 1/z, so infinity sits at the origin."""
    return moebius_transform(op, 0, 1, 1, 0)


def local_operator(op: PrincipalOperator, point) -> PrincipalOperator:
    if point is INF:
        return PrincipalOperator(2 / Z - localize(op.p, INF) / Z ** 2,
                                 localize(op.q, INF) / Z ** 4)
    return PrincipalOperator(localize(op.p, point), localize(op.q, point))


def quadratic_substitution(op: PrincipalOperator) -> PrincipalOperator:
    """z = y²: ∂_y² + 2y(p(y²) - 1/(2y²))∂_y + 4y²q(y²), written in z."""
    y2 = Z * Z
    return PrincipalOperator(2 * Z * op.p.subs("z", y2) - 1 / Z, 4 * y2 * op.q.subs("z", y2))


# ---------------------------------------------------------------------------
# ranks


def _coef(f: RatFunc, k: int) -> RatFunc:
    return local_coefficients(f, k, k).get(k, RatFunc(0))


def _local_rank(op: PrincipalOperator, ctx: _Ctx) -> Fraction:
    kw = dict(generic=ctx.generic, assumptions=ctx.assumptions)
    dp = degree_or_neg_inf(ctx.reduce(op.p), 0, **kw)
    dq = degree_or_neg_inf(ctx.reduce(op.q), 0, **kw)
    if dp <= 0 and dq <= 0:
        return Fraction(0)
    if dp <= 1 and dq <= 1:
        half = degree_or_neg_inf(ctx.reduce(op.p - Fraction(1, 2) / Z), 0, **kw)
        if half <= 0:
            return Fraction(1, 2)
    r = max(Fraction(1), Fraction(int(dp)) if dp != NEG_INF else Fraction(0),
            Fraction(int(dq), 2) if dq != NEG_INF else Fraction(0))
    return r


def rank(op: PrincipalOperator, point, *, generic: bool = False,
         assumptions: list | None = None) -> Fraction:
    return _local_rank(local_operator(op, point), _ctx(generic, assumptions))


def rounded_rank(op: PrincipalOperator, point, **kw) -> int:
    return math.ceil(rank(op, point, **kw))


# ---------------------------------------------------------------------------
# the local engine


@dataclass
class _Heads:
    rank: Fraction
    absolute_rank: Fraction
    ramification: int
    radicand: RatFunc | None
    rprimes: list          # per branch, in the local coordinate (y when ramified)
    operators: list        # per branch, transformed local operator
    fuchsian_difference: list = field(default_factory=list)


def _fuchsian_data(op: PrincipalOperator, ctx: _Ctx):
    p1, p0 = _coef(op.p, -1), _coef(op.p, 0)
    q2, q1 = _coef(op.q, -2), _coef(op.q, -1)
    disc = (p1 - 1) ** 2 - 4 * q2
    return p1, p0, q2, q1, disc


def _fuchsian_absolute_rank(op, ctx) -> Fraction:
    p1, p0, q2, q1, disc = _fuchsian_data(op, ctx)
    if ctx.is_zero(disc - 1, "(index difference = 1)"):
        if ctx.is_zero(q1 - p1 * p0 / 2, "(removability)"):
            return Fraction(0)
    if ctx.is_zero(disc - Fraction(1, 4), "(index difference = 1/2)"):
        return Fraction(1, 2)
    return Fraction(1)


def _square_root(d: RatFunc, ctx: _Ctx) -> RatFunc:
    root = d.sqrt()
    if root is not None:
        return root
    ctx.radicand = d
    return RatFunc(RADICAL)


def _transformation_two(op, m: int, ctx: _Ctx):
    pm, q2m = _coef(op.p, -m), _coef(op.q, -2 * m)
    disc = pm * pm - 4 * q2m
    s = _square_root(disc, ctx)
    out = []
    for sign in (1, -1):
        root = sign * s
        rp = (-pm + root) / 2 / Z ** m
        for k in range(-m + 2, 1):
            qt = ctx.reduce(op.q + op.p * rp + rp * rp + rp.diff("z"))
            b = _coef(qt, k - 1 - m)
            wk = ctx.reduce(-b / root)
            if not wk.is_zero:
                rp = rp + wk * Z ** (k - 1)
        out.append(ctx.reduce(rp))
    # branch with a vanishing head first, so grounded input gives an empty record
    if not out[1].is_zero and _coef(out[0], -m).is_zero is False and _coef(out[1], -m).is_zero:
        out.reverse()
    return out


def _reduce_op(op: PrincipalOperator, ctx: _Ctx) -> PrincipalOperator:
    return PrincipalOperator(ctx.reduce(op.p), ctx.reduce(op.q))


def _local_heads(op: PrincipalOperator, ctx: _Ctx, *, half_via_quadratic: bool = True) -> _Heads:
    r0 = _local_rank(op, ctx)
    acc = RatFunc(0)
    cur = op
    for _ in range(2 * int(math.ceil(r0)) + 4):
        r = _local_rank(cur, ctx)
        if r <= 1:
            rk = _fuchsian_absolute_rank(cur, ctx)
            p1, _, _, _, disc = _fuchsian_data(cur, ctx)
            s = _square_root(disc, ctx)
            rps, ops, diffs = [], [], []
            for sign in (1, -1):
                rho = (1 - p1 + sign * s) / 2
                rp = acc + rho / Z
                rps.append(rp)
                ops.append(_reduce_op(sandwich(op, rp), ctx))
                diffs.append(-sign * s)
            return _Heads(r0, rk, 1, ctx.radicand, rps, ops, diffs)
        if r.denominator == 2:
            if not half_via_quadratic:
                m = int(r + Fraction(1, 2))
                rp1 = RatFunc(0)
                for j in range(-m + 1, 0):
                    c = _coef(cur.p, j)
                    if not c.is_zero:
                        rp1 = rp1 - c / 2 * Z ** j
                rp = acc + rp1
                return _Heads(r0, r, 1, None, [rp], [sandwich(op, rp)])
            # ramify: work in y with x = y², r'_y = 2y r'_x(y²)
            quad = quadratic_substitution(cur)
            inner = _local_heads(quad, ctx)
            lift = 2 * Z * acc.subs("z", Z * Z)
            rps = [ctx.reduce(lift + rp) for rp in inner.rprimes]
            qop = quadratic_substitution(op)
            ops = [_reduce_op(sandwich(qop, rp), ctx) for rp in rps]
            return _Heads(r0, r, 2, ctx.radicand, rps, ops)
        m = int(r)
        pm, q2m = _coef(cur.p, -m), _coef(cur.q, -2 * m)
        if ctx.is_zero(pm * pm - 4 * q2m, "(quadratic branch discriminant)"):
            step = -pm / 2 / Z ** m
            acc = acc + step
            cur = sandwich(cur, step)
            continue
        rps = [ctx.reduce(acc + rp) for rp in _transformation_two(cur, m, ctx)]
        ops = [_reduce_op(sandwich(op, rp), ctx) for rp in rps]
        return _Heads(r0, Fraction(m), 1, ctx.radicand, rps, ops)
    raise RuntimeError("absolute rank search did not terminate")


def _branch_index(rp: RatFunc, ramification: int, ctx: _Ctx) -> RatFunc:
    return ctx.reduce(_coef(rp, -1) / ramification)


# ---------------------------------------------------------------------------
# singularities


def _finite_candidates(op: PrincipalOperator) -> list:
    pts: list = []
    for f in (op.p, op.q):
        if f.is_zero:
            continue
        for fac, e in f.denom.factor_list():
            if e <= 0 or fac.free_of("z"):
                continue
            cs = fac.coeffs("z")
            if max(cs) != 1:
                raise AlgebraicPoint(f"factor {fac} has no rational root in z")
            root = -cs.get(0, RatFunc(0)) / cs[1]
            if not any(root == x for x in pts):
                pts.append(root)
    return pts


def find_singularities(op: PrincipalOperator, *, generic: bool = False,
                       assumptions: list | None = None) -> list[SingularityReport]:
    """Singular points with their ranks; infinity is always examined."""
    out = []
    for pt in _finite_candidates(op) + [INF]:
        r = rank(op, pt, generic=generic, assumptions=assumptions)
        if r > 0:
            out.append(SingularityReport(pt, r, math.ceil(r), fuchsian=math.ceil(r) == 1))
    return out


def absolute_rank(op: PrincipalOperator, point, *, generic: bool = False,
                  assumptions: list | None = None) -> Fraction:
    ctx = _ctx(generic, assumptions)
    cur = local_operator(op, point)
    for _ in range(2 * int(math.ceil(_local_rank(cur, ctx))) + 4):
        r = _local_rank(cur, ctx)
        if r == 0:
            return r
        if r <= 1:
            return _fuchsian_absolute_rank(cur, ctx)
        if r.denominator == 2:
            return r
        m = int(r)
        pm, q2m = _coef(cur.p, -m), _coef(cur.q, -2 * m)
        if not ctx.is_zero(pm * pm - 4 * q2m):
            return r
        cur = sandwich(cur, -pm / 2 / Z ** m)
    raise RuntimeError("absolute rank search did not terminate")


def effective_rank(rk: Fraction) -> Fraction:
    """Rank entering the index-sum identities: Fuchsian and removable points count as 1."""
    return max(Fraction(1), rk)


def _grounded_local(op: PrincipalOperator, r: Fraction, ctx: _Ctx) -> bool:
    if r == 0:
        return True
    if r <= 1:
        return _coef(op.q, -2).is_zero
    dp = degree_or_neg_inf(op.p, 0, generic=True)
    dq = degree_or_neg_inf(op.q, 0, generic=True)
    if r.denominator == 2:
        return dp <= 0 and Fraction(int(dq), 2) == r
    return dp >= dq


def indices(op: PrincipalOperator, point, *, generic: bool = False,
            assumptions: list | None = None) -> IndexPair:
    """The two indices at ``point`` (Fuchsian roots or Thomé exponents)."""
    ctx = _ctx(generic, assumptions)
    heads = _local_heads(local_operator(op, point), ctx)
    return _index_pair(heads, ctx)


def _index_pair(heads: _Heads, ctx: _Ctx) -> IndexPair:
    rho = [_branch_index(rp, heads.ramification, ctx) for rp in heads.rprimes]
    if len(rho) == 1:
        rho = rho * 2
    total = ctx.reduce(rho[0] + rho[1])
    product = ctx.reduce(rho[0] * rho[1])
    split = all(RADICAL not in x.variables for x in rho)
    return IndexPair(total, product, tuple(rho) if split else None, tuple(rho),
                     ctx.radicand)


def analyze(op: PrincipalOperator, point, *, generic: bool = False,
            assumptions: list | None = None) -> SingularityReport:
    """Full report at one point: ranks, indices and grounding."""
    if assumptions is None:
        assumptions = []
    ctx = _ctx(generic, assumptions)
    loc = local_operator(op, point)
    heads = _local_heads(loc, ctx)
    r = heads.rank
    return SingularityReport(
        location=point,
        rank=r,
        rounded_rank=math.ceil(r),
        absolute_rank=heads.absolute_rank,
        indices=_index_pair(heads, ctx),
        fuchsian=math.ceil(r) == 1,
        grounded=_grounded_local(loc, r, ctx),
        assumptions=assumptions,
    )


def index_sum_formula(op: PrincipalOperator, point, rk: Fraction) -> RatFunc:
    """-p_{z0,-1} + Rk at a finite point, p_{∞,-1} - 2 + Rk at infinity."""
    rk = effective_rank(rk)
    if point is INF:
        return laurent(op.p, INF, -1, -1)[-1] - 2 + rk
    return -laurent(op.p, point, -1, -1)[-1] + rk


def fuchs_relation_check(op: PrincipalOperator, *, generic: bool = False,
                         assumptions: list | None = None) -> dict:
    """Sum of all indices against Σ Rk - 2 over the singular points."""
    lhs, rhs = RatFunc(0), RatFunc(-2)
    for rep in find_singularities(op, generic=generic, assumptions=assumptions):
        full = analyze(op, rep.location, generic=generic, assumptions=assumptions)
        lhs = lhs + full.indices.total
        rhs = rhs + effective_rank(full.absolute_rank)
    return {"lhs": lhs, "rhs": rhs, "holds": (lhs - rhs).is_zero}


# ---------------------------------------------------------------------------
# reduction to grounded form


def _record_from_local(rp: RatFunc, point) -> TransformRecord:
    if rp.is_zero:
        return TransformRecord()
    lo = -(degree_or_neg_inf(rp, 0, generic=True))
    cs = local_coefficients(rp, int(lo), -1)
    steps = []
    for k in sorted(cs):
        c = cs[k]
        if point is INF:
            e = -k - 2
            if e == -1:
                steps.append(Step("power", INF, (-c,)))
            else:
                steps.append(Step("exp", INF, (e, -c)))
        else:
            if k == -1:
                steps.append(Step("power", point, (c,)))
            else:
                steps.append(Step("exp", point, (-k, c)))
    return TransformRecord(tuple(steps))


def reduce_at(op: PrincipalOperator, point, *, generic: bool = False,
              assumptions: list | None = None) -> Reduction:
    """Bring a singularity of rank ≥ 3/2 to grounded form; both branches are returned."""
    ctx = _ctx(generic, assumptions)
    loc = local_operator(op, point)
    r = _local_rank(loc, ctx)
    if r <= 1:
        raise RankBelowTwo(f"rank {r} at {point}; ground with a power sandwich instead")
    heads = _local_heads(loc, ctx, half_via_quadratic=False)
    if heads.radicand is not None:
        raise IrrationalBranch(f"branch equation needs sqrt({heads.radicand})")
    branches = []
    for rp in heads.rprimes:
        rec = _record_from_local(rp, point)
        branches.append(ReducedBranch(rec, rec.replay(op), _coef(rp, -1)))
    return Reduction(heads.absolute_rank, tuple(branches))


# ---------------------------------------------------------------------------
# series


def _series(op: PrincipalOperator, N: int, ctx: _Ctx, *, rho=0, start: int = 0,
            free: dict | None = None, stop_at_obstruction: bool = False):
    """Coefficients v_0..v_N of x^rho Σ v_j x^j for the local operator at 0.

    Returns (v, obstructions) where obstructions maps j to the nonzero
    right-hand side met where the recurrence coefficient of v_j vanishes.
    """
    rho = as_ratfunc(rho)
    free = free or {}
    P, Q = ctx.reduce(op.p), ctx.reduce(op.q)
    dp = degree_or_neg_inf(P, 0, generic=True)
    dq = degree_or_neg_inf(Q, 0, generic=True)
    s = int(max(2, dp + 1, dq))
    pc = local_coefficients(P, -s, N + 2) if not P.is_zero else {}
    qc = local_coefficients(Q, -s, N + 2) if not Q.is_zero else {}
    pc = {k: ctx.reduce(v) for k, v in pc.items()}
    qc = {k: ctx.reduce(v) for k, v in qc.items()}
    zero = RatFunc(0)

    def coef(i, n):
        e = rho + i
        c = pc.get(n - i + 1, zero) * e + qc.get(n - i, zero)
        if i - 2 == n:
            c = c + e * (e - 1)
        return c

    v: list = []
    obstructions = {}
    for j in range(N + 1):
        n = j - s
        if j < start:
            v.append(zero)
            continue
        if j == start:
            v.append(RatFunc(1))
            continue
        rest = zero
        for i in range(start, j):
            if not v[i].is_zero:
                rest = rest + v[i] * coef(i, n)
        rest = ctx.reduce(rest)
        L = ctx.reduce(coef(j, n))
        if ctx.is_zero(L, f"(recurrence coefficient at order {j})"):
            if not rest.is_zero:
                obstructions[j] = rest
                if stop_at_obstruction:
                    break
            v.append(as_ratfunc(free.get(j, 0)))
        else:
            v.append(ctx.reduce(-rest / L))
    return v, obstructions


def series_residual(op: PrincipalOperator, v, rho=0, radicand: RatFunc | None = None) -> RatFunc:
    """x^(-rho) A(x^rho Σ v_j x^j) as a rational function of the local coordinate."""
    rho = as_ratfunc(rho)
    acc = RatFunc(0)
    for j, c in enumerate(v):
        if c.is_zero:
            continue
        e = rho + j
        acc = acc + c * (e * (e - 1) * Z ** (j - 2) + e * op.p * Z ** (j - 1) + op.q * Z ** j)
    return reduce_radical(acc, radicand) if radicand is not None else acc


def residual_order(sol: FormalSolution):
    """Local order of the substitution residual of a truncated formal solution."""
    res = series_residual(sol.local_operator, sol.series, 0, sol.radicand)
    if res.is_zero:
        return math.inf
    return -degree_or_neg_inf(res, 0, generic=True)


def frobenius_attempt(op: PrincipalOperator, N: int = DEFAULT_ORDER, point=0) -> FrobeniusOutcome:
    """Power-series solutions at a point, sorted by the degrees m = deg p, l = deg q."""
    ctx = _Ctx(generic=True)
    loc = local_operator(op, point) if not (point == 0) else op
    P, Q = loc.p, loc.q
    m = degree_or_neg_inf(P, 0, generic=True)
    l = degree_or_neg_inf(Q, 0, generic=True)
    if m <= 0 and l <= 0:
        sols = [_series(loc, N, ctx, start=0)[0], _series(loc, N, ctx, start=1)[0]]
        return FrobeniusOutcome(1, m, l, True, sols, 0)
    if m <= 1 and l <= 2:
        p1, q2 = _coef(P, -1), _coef(Q, -2)
        disc = (p1 - 1) ** 2 - 4 * q2
        s = disc.sqrt()
        cands = []
        if s is not None:
            for r in ((1 - p1 + s) / 2, (1 - p1 - s) / 2):
                if r.is_constant:
                    f = r.to_fraction()
                    if f.denominator == 1 and f >= 0:
                        cands.append(int(f))
        if not cands:
            return FrobeniusOutcome(2, m, l, False, [], None, disc)
        n = max(cands)
        v, obs = _series(loc, N, ctx, start=n)
        return FrobeniusOutcome(2, m, l, not obs, [v] if not obs else [], n, disc,
                                next(iter(obs.values()), None))
    if m >= 2 and l <= m:
        v, _ = _series(loc, N, ctx, start=0)
        return FrobeniusOutcome(3, m, l, True, [v], 0)
    if m >= 2 and l == m + 1:
        cond = -_coef(Q, -m - 1) / _coef(P, -m)
        if cond.is_constant:
            f = cond.to_fraction()
            if f.denominator == 1 and f >= 0:
                v, _ = _series(loc, N, ctx, start=int(f))
                return FrobeniusOutcome(4, m, l, True, [v], int(f), cond)
        return FrobeniusOutcome(4, m, l, False, [], None, cond)
    return FrobeniusOutcome(5, m, l, False, [])


def thome(op: PrincipalOperator, point, N: int = DEFAULT_ORDER, *, generic: bool = False,
          assumptions: list | None = None) -> tuple[FormalSolution, FormalSolution]:
    """Two formal solutions at ``point``: Thomé type when irregular, Frobenius when Fuchsian."""
    ctx = _ctx(generic, assumptions)
    loc = local_operator(op, point)
    heads = _local_heads(loc, ctx)
    kind = "frobenius" if heads.rank <= 1 else "thome"
    sols = []
    rps = heads.rprimes if len(heads.rprimes) == 2 else heads.rprimes * 2
    ops = heads.operators if len(heads.operators) == 2 else heads.operators * 2
    for b, (rp, bop) in enumerate(zip(rps, ops)):
        R = heads.ramification
        v, obs = _series(bop, N, ctx, stop_at_obstruction=True)
        log = bool(obs)
        if log:
            v = v[:min(obs)]
        expo = {}
        if not rp.is_zero:
            lo = -int(degree_or_neg_inf(rp, 0, generic=True))
            for k, c in local_coefficients(rp, lo, -2).items():
                expo[Fraction(k + 1, R)] = ctx.reduce(c / R)
        sols.append(FormalSolution(kind, expo, _branch_index(rp, R, ctx), tuple(v), R, log,
                                   ctx.radicand, bop))
    return sols[0], sols[1]


def is_nonlogarithmic(op: PrincipalOperator, point, N: int = DEFAULT_ORDER) -> bool:
    """True when a Fuchsian point with integer index difference has no logarithmic solution."""
    ctx = _Ctx(generic=True)
    loc = local_operator(op, point)
    r = _local_rank(loc, ctx)
    if r > 1:
        raise NotFuchsian(f"rank {r} at {point}")
    if r == 0:
        return True
    p1, _, _, _, disc = _fuchsian_data(loc, ctx)
    s = disc.sqrt()
    if s is None or not s.is_constant or s.to_fraction().denominator != 1:
        raise NonIntegerIndexDifference(f"index difference sqrt({disc}) is not an integer")
    n = abs(int(s.to_fraction()))
    if n == 0:
        return False
    lower = (1 - p1 - n) / 2
    v, obs = _series(loc, max(N, n), ctx, rho=lower, stop_at_obstruction=True)
    return n not in obs
