"""Exact multivariate rational functions over Q with named variables.

Values are immutable wrappers around sympy's sparse fraction-field elements.
Each value lives in a field over the sorted set of variable names it was
built from; binary operations move both operands into the field over the
union of their names.  Canonical form: numerator and denominator coprime,
denominator monic under graded-lex order with the variable order
``z, lam, mu, t`` followed by every other name alphabetically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Union

from sympy import Symbol
from sympy.polys.domains import QQ
from sympy.polys.fields import FracField
from sympy.polys.orderings import grlex

from .errors import (
    DegreeBoundViolated,
    DivisionByZero,
    SingularHomography,
    UndecidableLeadingCoefficient,
    ZeroDenominatorAtLocalization,
    ZeroFunction,
)

Rat = Fraction
Scalar = Union[int, Fraction]

VARIABLE_PRIORITY = ("z", "lam", "mu", "t")
NEG_INF = -math.inf


def variable_key(name: str):
    if name in VARIABLE_PRIORITY:
        return (0, VARIABLE_PRIORITY.index(name), "")
    return (1, 0, name)


def ordered(names: Iterable[str]) -> tuple[str, ...]:
    return tuple(sorted(set(names), key=variable_key))


@lru_cache(maxsize=None)
def _field(names: tuple[str, ...]) -> FracField:
    return FracField(tuple(Symbol(n) for n in names), QQ, grlex)


def _to_qq(x: Scalar):
    x = Fraction(x)
    return QQ(x.numerator, x.denominator)


def _to_fraction(c) -> Fraction:
    return Fraction(int(c.numerator), int(c.denominator))


class _Infinity:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "oo"

    def __str__(self):
        return "oo"

    def __reduce__(self):
        return (_Infinity, ())


INF = _Infinity()


class RatFunc:
    """An exact rational function in named variables over Q."""

    __slots__ = ("_f", "_names")

    def __init__(self, value: "RatFunc | Scalar | str" = 0):
        if isinstance(value, RatFunc):
            self._f, self._names = value._f, value._names
        elif isinstance(value, str) and not value.isidentifier():
            try:
                num = Fraction(value)
            except ValueError:
                raise ValueError(f"not a variable name or rational literal: {value!r}") from None
            self._f, self._names = RatFunc(num)._f, ()
        elif isinstance(value, str):
            K = _field((value,))
            self._f, self._names = K.gens[0], (value,)
        else:
            K = _field(())
            # monic denominator, the same normalization as _wrap
            self._f, self._names = RatFunc._wrap(K.ground_new(_to_qq(value)), ())._f, ()

    # construction -------------------------------------------------------
    @classmethod
    def _wrap(cls, f, names: tuple[str, ...]) -> "RatFunc":
        K = f.field
        num, den = f.numer, f.denom
        lc = den.LC
        if lc != 1:
            num, den = num.quo_ground(lc), den.quo_ground(lc)
        obj = object.__new__(cls)
        obj._f = K.raw_new(num, den)
        obj._names = names
        return obj

    @classmethod
    def var(cls, name: str) -> "RatFunc":
        return cls(name)

    @classmethod
    def const(cls, value: Scalar) -> "RatFunc":
        return cls(value)

    def _lift(self, names: tuple[str, ...]):
        if names == self._names:
            return self._f
        return self._f.set_field(_field(names))

    @staticmethod
    def _coerce(x) -> "RatFunc":
        if isinstance(x, RatFunc):
            return x
        if isinstance(x, (int, Fraction)):
            return RatFunc(x)
        if isinstance(x, str):
            return RatFunc(x)
        return NotImplemented

    def _binary(self, other, op):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if self._names == other._names:
            names = self._names
            a, b = self._f, other._f
        else:
            names = ordered(self._names + other._names)
            a, b = self._lift(names), other._lift(names)
        return RatFunc._wrap(op(a, b), names)

    # arithmetic ---------------------------------------------------------
    def __add__(self, other):
        return self._binary(other, lambda a, b: a + b)

    __radd__ = __add__

    def __sub__(self, other):
        return self._binary(other, lambda a, b: a - b)

    def __rsub__(self, other):
        return self._binary(other, lambda a, b: b - a)

    def __mul__(self, other):
        return self._binary(other, lambda a, b: a * b)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if other.is_zero:
            raise DivisionByZero("division by the zero rational function")
        return self._binary(other, lambda a, b: a / b)

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other / self

    def __neg__(self):
        return RatFunc._wrap(-self._f, self._names)

    def __pos__(self):
        return self

    def __pow__(self, n: int):
        if not isinstance(n, int):
            raise TypeError("only integer powers are supported")
        if n < 0:
            if self.is_zero:
                raise DivisionByZero("negative power of zero")
            return RatFunc._wrap(self._f ** n, self._names)
        return RatFunc._wrap(self._f ** n, self._names)

    # comparison ---------------------------------------------------------
    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if self._names == other._names:
            return self._f.numer == other._f.numer and self._f.denom == other._f.denom
        return (self - other).is_zero

    def __hash__(self):
        return hash(self.canonical_text())

    def __bool__(self):
        return not self.is_zero

    # inspection ---------------------------------------------------------
    @property
    def is_zero(self) -> bool:
        return not self._f.numer

    @property
    def variables(self) -> frozenset[str]:
        out = set()
        for poly in (self._f.numer, self._f.denom):
            for i, d in enumerate(poly.degrees()):
                if d > 0:
                    out.add(self._names[i])
        return frozenset(out)

    def free_of(self, *names: str) -> bool:
        return not (self.variables & set(names))

    @property
    def is_constant(self) -> bool:
        return not self.variables

    @property
    def is_polynomial(self) -> bool:
        return self._f.denom.is_ground

    def is_polynomial_in(self, name: str) -> bool:
        return name not in RatFunc._poly_vars(self._f.denom, self._names)

    @staticmethod
    def _poly_vars(poly, names):
        return {names[i] for i, d in enumerate(poly.degrees()) if d > 0}

    @property
    def numer(self) -> "RatFunc":
        return RatFunc._wrap(self._f.field.new(self._f.numer), self._names)

    @property
    def denom(self) -> "RatFunc":
        return RatFunc._wrap(self._f.field.new(self._f.denom), self._names)

    def to_fraction(self) -> Fraction:
        if not self.is_constant:
            raise ValueError(f"{self} is not a constant")
        n = self._f.numer.LC if self._f.numer else 0
        d = self._f.denom.LC
        if n == 0:
            return Fraction(0)
        return _to_fraction(n) / _to_fraction(d)

    # calculus and substitution -------------------------------------------
    def diff(self, name: str) -> "RatFunc":
        if name not in self._names:
            return RatFunc(0)
        K = self._f.field
        return RatFunc._wrap(self._f.diff(K.gens[self._names.index(name)]), self._names)

    def subs(self, name: str, value) -> "RatFunc":
        """Substitute ``value`` for the variable ``name``."""
        if name not in self._names:
            return self
        value = self._coerce(value)
        if value.is_constant:
            i = self._names.index(name)
            K = self._f.field
            c = _to_qq(value.to_fraction())
            x = K.ring.gens[i]
            num = self._f.numer.subs(x, c)
            den = self._f.denom.subs(x, c)
            if not den:
                raise DivisionByZero(f"denominator vanishes at {name} = {value}")
            return RatFunc._wrap(K.new(num, den), self._names)
        names = ordered(self._names + value._names)
        f = self._lift(names)
        v = value._lift(names)
        K = f.field
        i = names.index(name)
        a, b = v.numer, v.denom
        num_c = _coeffs_in(f.numer, i)
        den_c = _coeffs_in(f.denom, i)
        dn, dd = max(num_c), max(den_c)
        num = _homogenize(num_c, dn, a, b)
        den = _homogenize(den_c, dd, a, b)
        if dd > dn:
            num = num * b ** (dd - dn)
        elif dn > dd:
            den = den * b ** (dn - dd)
        if not den:
            raise DivisionByZero(f"denominator vanishes under {name} -> {value}")
        return RatFunc._wrap(K.new(num, den), names)

    def subs_many(self, mapping: Mapping[str, object]) -> "RatFunc":
        """Simultaneous substitution."""
        items = [(k, self._coerce(v)) for k, v in mapping.items() if k in self.variables]
        if not items:
            return self
        if len(items) == 1:
            return self.subs(*items[0])
        out = self
        temps = []
        for j, (k, v) in enumerate(items):
            tmp = f"_sub{j}"
            out = out.subs(k, RatFunc(tmp))
            temps.append((tmp, v))
        for tmp, v in temps:
            out = out.subs(tmp, v)
        return out

    # polynomial views -----------------------------------------------------
    def coeffs(self, name: str) -> dict[int, "RatFunc"]:
        """Coefficients as a polynomial in ``name``; the denominator must be free of it."""
        if self.is_zero:
            return {}
        if name not in self._names:
            return {0: self}
        i = self._names.index(name)
        if self._f.denom.degrees()[i] > 0:
            raise ValueError(f"{self} is not polynomial in {name}")
        K = self._f.field
        den = self._f.denom
        out = {}
        for k, c in _coeffs_in(self._f.numer, i).items():
            if c:
                out[k] = RatFunc._wrap(K.new(c, den), self._names)
        return out

    def degree(self, name: str):
        """Degree in ``name`` of a function polynomial in ``name``; -inf for zero."""
        if self.is_zero:
            return NEG_INF
        return max(self.coeffs(name))

    def coeff(self, name: str, k: int) -> "RatFunc":
        return self.coeffs(name).get(k, RatFunc(0))

    def terms(self) -> list[tuple[dict[str, int], Fraction]]:
        """Monomials of a polynomial as (exponent map, coefficient)."""
        if not self.is_polynomial:
            raise ValueError("terms() needs a polynomial")
        d = _to_fraction(self._f.denom.LC)
        out = []
        for monom, c in sorted(self._f.numer.items(), key=lambda mc: grlex(mc[0]), reverse=True):
            exps = {self._names[i]: e for i, e in enumerate(monom) if e}
            out.append((exps, _to_fraction(c) / d))
        return out

    def sqrt(self) -> "RatFunc | None":
        """Exact square root in the field, or None when there is none."""
        if self.is_zero:
            return self
        r_num = _poly_sqrt(self._f.numer)
        r_den = _poly_sqrt(self._f.denom)
        if r_num is None or r_den is None:
            return None
        K = self._f.field
        return RatFunc._wrap(K.new(r_num, r_den), self._names)

    def factor_list(self):
        """Irreducible factors of numerator and denominator over Q."""
        out = []
        K = self._f.field
        for poly, sign in ((self._f.numer, 1), (self._f.denom, -1)):
            _, facs = poly.factor_list()
            for fac, e in facs:
                out.append((RatFunc._wrap(K.new(fac), self._names), sign * e))
        return out

    # text -----------------------------------------------------------------
    def canonical_text(self) -> str:
        if self.is_polynomial:
            return _poly_text(self.terms())
        num, den = self.numer, self.denom
        return f"({_poly_text(num.terms())})/({_poly_text(den.terms())})"

    __str__ = canonical_text

    def __repr__(self):
        return f"RatFunc({self.canonical_text()!r})"

    def as_sympy(self):
        return self._f.as_expr()


def _coeffs_in(poly, i: int) -> dict[int, object]:
    ring = poly.ring
    groups: dict[int, dict] = {}
    for monom, c in poly.items():
        k = monom[i]
        m = monom[:i] + (0,) + monom[i + 1:]
        groups.setdefault(k, {})[m] = c
    if not groups:
        return {0: ring.zero}
    return {k: ring.from_dict(terms) for k, terms in groups.items()}


def _homogenize(coeffs: dict[int, object], d: int, a, b):
    ring = a.ring
    b_pow = [ring.one]
    for _ in range(d):
        b_pow.append(b_pow[-1] * b)
    acc = coeffs.get(d, ring.zero)
    for k in range(d - 1, -1, -1):
        acc = acc * a
        c = coeffs.get(k)
        if c:
            acc = acc + c * b_pow[d - k]
    return acc


def _poly_sqrt(poly):
    if poly.is_ground:
        c = _to_fraction(poly.LC)
        if c < 0:
            return None
        n, d = math.isqrt(c.numerator), math.isqrt(c.denominator)
        if n * n != c.numerator or d * d != c.denominator:
            return None
        return poly.ring.ground_new(QQ(n, d))
    coeff, facs = poly.sqf_list()
    coeff = _to_fraction(coeff)
    if coeff < 0:
        return None
    n, d = math.isqrt(coeff.numerator), math.isqrt(coeff.denominator)
    if n * n != coeff.numerator or d * d != coeff.denominator:
        return None
    root = poly.ring.ground_new(QQ(n, d))
    for fac, e in facs:
        if e % 2:
            return None
        root = root * fac ** (e // 2)
    if root * root != poly:
        return None
    return root


def _fraction_text(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _poly_text(terms) -> str:
    if not terms:
        return "0"
    pieces = []
    for j, (exps, c) in enumerate(terms):
        mon = "*".join(
            name if e == 1 else f"{name}^{e}"
            for name, e in sorted(exps.items(), key=lambda kv: variable_key(kv[0]))
        )
        neg = c < 0
        a = -c if neg else c
        if not mon:
            body = _fraction_text(a)
        elif a == 1:
            body = mon
        else:
            body = f"{_fraction_text(a)}*{mon}"
        if j == 0:
            pieces.append(f"-{body}" if neg else body)
        else:
            pieces.append(f" - {body}" if neg else f" + {body}")
    return "".join(pieces)


def as_ratfunc(x) -> RatFunc:
    if isinstance(x, RatFunc):
        return x
    return RatFunc(x)


def symbols(*names: str) -> tuple[RatFunc, ...]:
    return tuple(RatFunc(n) for n in names)


Z = RatFunc("z")


def arith(f: RatFunc, g: RatFunc, op: str) -> RatFunc:
    f, g = as_ratfunc(f), as_ratfunc(g)
    if op == "add":
        return f + g
    if op == "sub":
        return f - g
    if op == "mul":
        return f * g
    if op == "div":
        return f / g
    raise ValueError(f"unknown op {op!r}")


# ---------------------------------------------------------------------------
# Local expansions


@dataclass(frozen=True)
class LaurentExpansion:
    """Coefficients of z^k (finite point: of (z-z0)^k) for k in [k_min, k_max].

    ``exact_below`` is true when the computed window reaches the singular
    end of the expansion: below k_min nothing survives at a finite point,
    above k_max nothing survives at infinity.
    """

    center: object
    coeffs: dict
    k_min: int
    k_max: int
    exact_below: bool

    def __getitem__(self, k: int) -> RatFunc:
        if not self.k_min <= k <= self.k_max:
            raise KeyError(k)
        return self.coeffs.get(k, RatFunc(0))


def localize(f: RatFunc, point, var: str = "z") -> RatFunc:
    """Move ``point`` to the origin: z -> z + z0, or z -> 1/z for infinity."""
    f = as_ratfunc(f)
    x = RatFunc(var)
    if point is INF:
        return f.subs(var, 1 / x)
    point = as_ratfunc(point)
    if point.is_zero:
        return f
    return f.subs(var, x + point)


def _series_at_zero(g: RatFunc, var: str, count: int):
    """Return (valuation, [c_0..c_{count-1}]) with g = x^val * sum c_j x^j."""
    num, den = g.numer, g.denom
    if den.is_zero:
        raise ZeroDenominatorAtLocalization("denominator vanishes identically")
    nc = num.coeffs(var) if not num.is_zero else {}
    dc = den.coeffs(var)
    if not nc:
        return None, []
    vn, vd = min(nc), min(dc)
    if count <= 0:
        return vn - vd, []
    n = [nc.get(vn + j, RatFunc(0)) for j in range(count)]
    d = [dc.get(vd + j, RatFunc(0)) for j in range(count)]
    inv_d0 = 1 / d[0]
    out = []
    for j in range(count):
        acc = n[j]
        for i in range(1, j + 1):
            if not d[i].is_zero and not out[j - i].is_zero:
                acc = acc - d[i] * out[j - i]
        out.append(acc * inv_d0)
    return vn - vd, out


def valuation(f: RatFunc, point, var: str = "z") -> tuple[int, RatFunc]:
    """Lowest local exponent and its coefficient (local coordinate at ``point``)."""
    g = localize(f, point, var)
    if g.is_zero:
        raise ZeroFunction("the zero function has no valuation")
    num, den = g.numer, g.denom
    nc, dc = num.coeffs(var), den.coeffs(var)
    vn, vd = min(nc), min(dc)
    return vn - vd, nc[vn] / dc[vd]


def degree_at(f: RatFunc, point, var: str = "z", *, generic: bool = False,
              assumptions: list | None = None) -> int:
    """Degree of singularity of ``f`` at ``point``.

    At a finite point this is minus the lowest exponent of the expansion in
    powers of (z - z0); at infinity it is the highest power of z.  When the
    deciding coefficient depends on parameters it is only generically
    nonzero: that raises unless ``generic`` is set, in which case the
    assumption is appended to ``assumptions``.
    """
    f = as_ratfunc(f)
    if f.is_zero:
        raise ZeroFunction("degree of the zero function")
    v, lead = valuation(f, point, var)
    if not lead.is_constant:
        if not generic:
            raise UndecidableLeadingCoefficient(
                f"coefficient {lead} of {f} at {point} depends on parameters")
        if assumptions is not None:
            assumptions.append(f"{lead} != 0")
    return -v


def degree_or_neg_inf(f: RatFunc, point, var: str = "z", **kw):
    f = as_ratfunc(f)
    if f.is_zero:
        return NEG_INF
    return degree_at(f, point, var, **kw)


def laurent(f: RatFunc, point, k_min: int, k_max: int, var: str = "z") -> LaurentExpansion:
    """Exact Laurent coefficients in the z^k convention (also at infinity)."""
    f = as_ratfunc(f)
    if k_max < k_min:
        raise ValueError("empty window")
    g = localize(f, point, var)
    if point is INF:
        lo, hi = -k_max, -k_min
    else:
        lo, hi = k_min, k_max
    coeffs: dict[int, RatFunc] = {}
    if g.is_zero:
        return LaurentExpansion(point, coeffs, k_min, k_max, True)
    v, _ = valuation(f, point, var)
    count = hi - v + 1
    if count > 0:
        _, series = _series_at_zero(g, var, count)
        for j, c in enumerate(series):
            e = v + j
            if e >= lo and not c.is_zero:
                coeffs[-e if point is INF else e] = c
    return LaurentExpansion(point, coeffs, k_min, k_max, lo <= v)


def local_coefficients(f: RatFunc, lo: int, hi: int, var: str = "z") -> dict[int, RatFunc]:
    """Coefficients of x^lo..x^hi of an already-localized function at 0."""
    f = as_ratfunc(f)
    if f.is_zero or hi < lo:
        return {}
    v, _ = _series_at_zero(f, var, 0)
    v, series = _series_at_zero(f, var, hi - v + 1)
    out = {}
    for j, c in enumerate(series):
        e = v + j
        if lo <= e <= hi and not c.is_zero:
            out[e] = c
    return out


def substitute_moebius(f: RatFunc, a: Scalar, b: Scalar, c: Scalar, d: Scalar,
                       var: str = "z", new_var: str = "w") -> RatFunc:
    """Evaluate ``f`` at z = (d w - b)/(-c w + a), the inverse of w = (a z + b)/(c z + d)."""
    a, b, c, d = (as_ratfunc(x) for x in (a, b, c, d))
    if (a * d - b * c).is_zero:
        raise SingularHomography("ad - bc = 0")
    w = RatFunc(new_var)
    image = (d * w - b) / (-c * w + a)
    f = as_ratfunc(f)
    if new_var != var and new_var in f.variables:
        raise ValueError(f"{new_var} already occurs in the function")
    return f.subs(var, image)


# ---------------------------------------------------------------------------
# Self-test identities used by the compatibility proofs


def identity_residuals(xi: RatFunc, s: Scalar | RatFunc) -> dict[str, RatFunc]:
    """Residuals (left minus right) of the divided-difference identities."""
    xi = as_ratfunc(xi)
    if not xi.is_polynomial_in("z") or xi.variables - {"z"}:
        raise ValueError("xi must be a polynomial in z with constant coefficients")
    s = as_ratfunc(s)
    z, lam = RatFunc("z"), RatFunc("lam")
    deg = xi.degree("z")
    if deg > 3:
        raise DegreeBoundViolated(f"deg xi = {deg} > 3")
    out = {}
    out["pole_difference"] = (
        (lam - s) / (z - lam) * (1 / (z - s) - 1 / (lam - s) + (z - lam) / (lam - s) ** 2)
        - (1 / (lam - s) - 1 / (z - s)))
    out["pole_symmetric"] = (
        2 / (z - s) - 2 / (lam - s) + (z - lam) * (1 / (z - s) ** 2 + 1 / (lam - s) ** 2)
        - (z - lam) ** 3 / ((z - s) ** 2 * (lam - s) ** 2))

    def at(f, v):
        return f.subs("z", v)

    psi = xi / (z - s)
    dxi, dpsi = xi.diff("z"), psi.diff("z")
    xi_s = at(xi, s)
    if deg <= 2:
        out["taylor2"] = (xi - at(xi, lam) - (z - lam) * dxi
                          + xi.diff("z").diff("z") / 2 * (z - lam) ** 2)
        out["taylor2_pole"] = (psi - at(psi, lam) - (z - lam) * dpsi
                               + xi_s * (z - lam) ** 2 / ((z - s) ** 2 * (lam - s)))
    d3 = xi.diff("z").diff("z").diff("z")
    out["trapezoid3"] = (2 * xi - 2 * at(xi, lam) - (z - lam) * (dxi + at(dxi, lam))
                         + d3 / 6 * (z - lam) ** 3)
    out["trapezoid3_pole"] = (2 * psi - 2 * at(psi, lam) - (z - lam) * (dpsi + at(dpsi, lam))
                              - xi_s * (z - lam) ** 3 / ((z - s) ** 2 * (lam - s) ** 2))
    return out


def appendix_identities_check(xi: RatFunc, s: Scalar | RatFunc) -> bool:
    return all(r.is_zero for r in identity_residuals(xi, s).values())
