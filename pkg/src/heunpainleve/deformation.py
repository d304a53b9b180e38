"""Deformed Heun class operators: an extra apparent singularity at z = λ.

For a Heun class operator σ∂² + τ∂ + η and parameters λ, μ the deformed
operator is

    σ∂² + (τ - σ/(z-λ))∂ + η(z) - η(λ)
        - σ(λ)μ² - (τ(λ) - σ'(λ))μ + σ(λ)μ/(z-λ).

Its solutions are analytic at λ (indices 0 and 2) and satisfy v'(λ) = μ v(λ).
λ and μ are ordinary kernel variables ``lam`` and ``mu`` unless specialized.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import LambdaAtSigmaRoot, ObstructionFound
from .heun_class import HeunOperator, Z, swap_infinity
from .polyalg import RatFunc, as_ratfunc, local_coefficients, localize
from .sing_analysis import PrincipalOperator, indices

LAM = RatFunc("lam")
MU = RatFunc("mu")


def _at(f: RatFunc, value: RatFunc) -> RatFunc:
    return f.subs("z", value)


@dataclass(frozen=True)
class DeformedHeunOperator:
    base: HeunOperator
    lam: RatFunc
    mu: RatFunc

    @property
    def lambda_mode(self) -> str:
        return "rational" if self.lam.is_constant else "symbolic"

    @property
    def mu_mode(self) -> str:
        return "rational" if self.mu.is_constant else "symbolic"

    @property
    def sigma(self) -> RatFunc:
        return self.base.sigma

    @property
    def first_order(self) -> RatFunc:
        return self.base.tau - self.sigma / (Z - self.lam)

    @property
    def zeroth_order(self) -> RatFunc:
        s, t, e = self.sigma, self.base.tau, self.base.eta
        lam, mu = self.lam, self.mu
        sl = _at(s, lam)
        return (e - _at(e, lam) - sl * mu * mu - (_at(t, lam) - _at(s.diff("z"), lam)) * mu
                + sl * mu / (Z - lam))

    @property
    def principal(self) -> PrincipalOperator:
        return PrincipalOperator(self.first_order / self.sigma, self.zeroth_order / self.sigma)

    @property
    def p(self) -> RatFunc:
        return self.principal.p

    @property
    def q(self) -> RatFunc:
        return self.principal.q

    def subs(self, mapping) -> "DeformedHeunOperator":
        return DeformedHeunOperator(self.base.subs(mapping), self.lam.subs_many(mapping),
                                    self.mu.subs_many(mapping))


def deform(op: HeunOperator, lam=LAM, mu=MU) -> DeformedHeunOperator:
    lam, mu = as_ratfunc(lam), as_ratfunc(mu)
    if _at(op.sigma, lam).is_zero:
        raise LambdaAtSigmaRoot(f"sigma({lam}) = 0")
    return DeformedHeunOperator(op, lam, mu)


@dataclass
class ApparencyReport:
    indices: tuple
    v_series: list
    row1: RatFunc
    apparent: bool

    @property
    def ratio(self) -> RatFunc:
        return self.v_series[1] / self.v_series[0]


def verify_apparent(d: DeformedHeunOperator, N: int = 4, v2=0) -> ApparencyReport:
    """Solve for the analytic solution at λ with v₀ = 1 and a chosen v₂.

    The equation is multiplied by (z - λ) so all three coefficients are
    analytic; row s then fixes v_{s+1} with coefficient σ(λ)(s+1)(s-1).
    """
    lam = d.lam
    x = RatFunc("z")
    a = localize(d.sigma * (x - lam), lam)
    b = localize(d.first_order * (x - lam), lam)
    c = localize(d.zeroth_order * (x - lam), lam)
    ac, bc, cc = (local_coefficients(f, 0, N + 2) for f in (a, b, c))
    get = lambda tab, k: tab.get(k, RatFunc(0)) if k >= 0 else RatFunc(0)

    def row(s, v):
        out = RatFunc(0)
        for j in range(0, len(v)):
            out = out + v[j] * (get(ac, s - j + 2) * j * (j - 1) + get(bc, s - j + 1) * j
                                + get(cc, s - j))
        return out

    v = [RatFunc(1)]
    v.append(-row(0, v + [RatFunc(0)]) / get(bc, 0))
    row1 = row(1, v + [RatFunc(0)])
    if not row1.is_zero:
        raise ObstructionFound(f"row one does not vanish: {row1}")
    v.append(as_ratfunc(v2))
    for s in range(2, N):
        lead = get(ac, 1) * (s + 1) * s + get(bc, 0) * (s + 1)
        v.append(-row(s, v + [RatFunc(0)]) / lead)
    idx = (0, 2)
    if d.lambda_mode == "rational":
        pair = indices(d.principal, lam, generic=True)
        if pair.roots is not None and set(pair.roots) != {RatFunc(0), RatFunc(2)}:
            raise ObstructionFound(f"indices at lambda are {pair.roots}")
    return ApparencyReport(idx, v, row1, True)


def deformed_swap(d: DeformedHeunOperator) -> DeformedHeunOperator:
    """w = 1/z on a deformed operator: τ̃ uses 3ρ, λ̃ = 1/λ, μ̃ = -λ²μ."""
    sw = swap_infinity(d.base)
    rho = d.base.sigma / Z
    tau3 = sw.tau + Z ** 2 * rho.subs("z", 1 / Z)
    base = HeunOperator(sw.roots, sw.lead, tau3, sw.eta)
    return DeformedHeunOperator(base, 1 / d.lam, -d.lam * d.lam * d.mu)
