"""Floating-point integration of Painlevé Hamiltonian flows.

Symbolic right-hand sides are compiled to nested Horner evaluators after
parameter substitution. Integrators are a fixed-step classical RK4 and an
adaptive Runge-Kutta-Fehlberg 4(5). Integration stops cleanly when a guarded
denominator factor gets small, when the state blows up, or when the step
controller underflows.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field
from typing import Callable, Sequence

from .errors import PoleProximity, StepUnderflow, TooFewSamples
from .painleve_catalog import catalog_hamiltonian, catalog_ode
from .polyalg import RatFunc, as_ratfunc

HAMILTON_VARS = ("t", "lam", "mu")
ODE_VARS = ("t", "lam", "lamp")


# ---------------------------------------------------------------------------
# compilation


class HornerPoly:
    """A multivariate polynomial evaluated by nested Horner schemes."""

    def __init__(self, poly: RatFunc, names: Sequence[str]):
        self.names = tuple(names)
        extra = poly.variables - set(self.names)
        if extra:
            raise ValueError(f"unbound variables {sorted(extra)}; substitute parameters first")
        self._tree = self._build([(e, float(c)) for e, c in poly.terms()], 0)

    def _build(self, terms, k):
        if k == len(self.names):
            return sum(c for _, c in terms)
        name = self.names[k]
        groups: dict[int, list] = {}
        for exps, c in terms:
            groups.setdefault(exps.get(name, 0), []).append((exps, c))
        return [(d, self._build(groups[d], k + 1)) for d in sorted(groups, reverse=True)]

    def _eval(self, node, vals, k):
        if k == len(self.names):
            return node
        x = vals[k]
        acc = 0.0
        prev = None
        for d, sub in node:
            if prev is not None:
                acc *= x ** (prev - d)
            acc += self._eval(sub, vals, k + 1)
            prev = d
        return acc * x ** prev if prev else acc

    def __call__(self, *vals: float) -> float:
        return self._eval(self._tree, vals, 0)


class CompiledRatFunc:
    def __init__(self, f: RatFunc, names: Sequence[str]):
        f = as_ratfunc(f)
        self.source = f
        self.num = HornerPoly(f.numer, names)
        self.den = HornerPoly(f.denom, names)

    def __call__(self, *vals: float) -> float:
        return self.num(*vals) / self.den(*vals)


def denominator_guards(exprs: Sequence[RatFunc], names: Sequence[str]) -> list[HornerPoly]:
    """Evaluators for the non-constant factors of the denominators."""
    out, seen = [], set()
    for f in exprs:
        for fac, _ in as_ratfunc(f).denom.factor_list():
            if fac.is_constant or fac in seen:
                continue
            seen.add(fac)
            out.append(HornerPoly(fac, names))
    return out


# ---------------------------------------------------------------------------
# data types


@dataclass(frozen=True)
class State:
    t: float
    lam: float
    mu: float

    def __post_init__(self):
        if not all(math.isfinite(x) for x in (self.t, self.lam, self.mu)):
            raise ValueError(f"non-finite state {self}")


@dataclass
class IntegratorConfig:
    method: str = "rkf45"
    abs_tol: float = 1e-10
    rel_tol: float = 1e-10
    h_init: float = 1e-3
    h_min: float = 1e-12
    h_max: float = 0.1
    pole_guard: float = 1e-6
    blowup: float = 1e8
    max_steps: int = 50_000

    def __post_init__(self):
        if self.method not in ("rk4", "rkf45"):
            raise ValueError(f"unknown method {self.method!r}")
        if self.max_steps < 1:
            raise ValueError("max_steps must be positive")
        if self.abs_tol <= 0 or self.rel_tol <= 0:
            raise ValueError("tolerances must be positive")
        if not self.h_min <= self.h_init <= self.h_max:
            raise ValueError("need h_min <= h_init <= h_max")


@dataclass
class Trajectory:
    samples: list[State]
    accepted: int = 0
    rejected: int = 0
    termination: str = "completed"
    config: IntegratorConfig | None = None
    meta: dict = field(default_factory=dict)

    @property
    def step_stats(self) -> dict:
        return {"accepted": self.accepted, "rejected": self.rejected}

    @property
    def times(self) -> list[float]:
        return [s.t for s in self.samples]

    @property
    def lams(self) -> list[float]:
        return [s.lam for s in self.samples]

    @property
    def final(self) -> State:
        return self.samples[-1]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf)
        w.writerow(["t", "lambda", "mu"])
        for s in self.samples:
            w.writerow([repr(s.t), repr(s.lam), repr(s.mu)])
        return buf.getvalue()

    def to_json(self) -> dict:
        return {
            "samples": [[s.t, s.lam, s.mu] for s in self.samples],
            "step_stats": self.step_stats,
            "termination": self.termination,
            "config": asdict(self.config) if self.config else None,
            "meta": self.meta,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json())


# ---------------------------------------------------------------------------
# integrators

Vector = tuple[float, float]
RHS = Callable[[float, float, float], Vector]

_RKF_A = (0.0, 1 / 4, 3 / 8, 12 / 13, 1.0, 1 / 2)
_RKF_B = (
    (),
    (1 / 4,),
    (3 / 32, 9 / 32),
    (1932 / 2197, -7200 / 2197, 7296 / 2197),
    (439 / 216, -8.0, 3680 / 513, -845 / 4104),
    (-8 / 27, 2.0, -3544 / 2565, 1859 / 4104, -11 / 40),
)
_RKF_C4 = (25 / 216, 0.0, 1408 / 2565, 2197 / 4104, -1 / 5, 0.0)
_RKF_C5 = (16 / 135, 0.0, 6656 / 12825, 28561 / 56430, -9 / 50, 2 / 55)


def rk4_step(f: RHS, t: float, y: Vector, h: float) -> Vector:
    k1 = f(t, *y)
    k2 = f(t + h / 2, y[0] + h / 2 * k1[0], y[1] + h / 2 * k1[1])
    k3 = f(t + h / 2, y[0] + h / 2 * k2[0], y[1] + h / 2 * k2[1])
    k4 = f(t + h, y[0] + h * k3[0], y[1] + h * k3[1])
    return tuple(y[i] + h / 6 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]) for i in range(2))


def rkf45_step(f: RHS, t: float, y: Vector, h: float) -> tuple[Vector, Vector]:
    """One Fehlberg step: (fifth-order solution, error estimate)."""
    ks: list[Vector] = []
    for a, row in zip(_RKF_A, _RKF_B):
        yi = tuple(y[i] + h * sum(b * k[i] for b, k in zip(row, ks)) for i in range(2))
        ks.append(f(t + a * h, *yi))
    y4 = tuple(y[i] + h * sum(c * k[i] for c, k in zip(_RKF_C4, ks)) for i in range(2))
    y5 = tuple(y[i] + h * sum(c * k[i] for c, k in zip(_RKF_C5, ks)) for i in range(2))
    return y5, tuple(y5[i] - y4[i] for i in range(2))


def _guard_tripped(guards, t, y, cfg) -> bool:
    if any(not math.isfinite(v) or abs(v) > cfg.blowup for v in y):
        return True
    return any(abs(g(t, *y)) < cfg.pole_guard for g in guards)


def integrate_system(f: RHS, t0: float, y0: Vector, t_end: float, cfg: IntegratorConfig,
                     guards: Sequence[HornerPoly] = (), *, strict: bool = False) -> Trajectory:
    """Integrate y' = f(t, y) for a pair y from t0 to t_end."""
    if _guard_tripped(guards, t0, y0, cfg):
        raise PoleProximity(f"initial state ({t0}, {y0}) is inside the pole guard")
    direction = 1.0 if t_end >= t0 else -1.0
    samples = [State(t0, *y0)]
    traj = Trajectory(samples, config=cfg)
    t, y = t0, tuple(y0)
    h = cfg.h_init
    span = abs(t_end - t0)
    while abs(t - t0) < span * (1 - 1e-14) and abs(t_end - t) > 1e-15:
        # equal steps to the end keep the grid smooth for the difference stencils
        if traj.accepted + traj.rejected >= cfg.max_steps:
            traj.termination = "max_steps"
            if strict:
                raise StepUnderflow(f"step budget {cfg.max_steps} spent at t = {t}")
            break
        remaining = abs(t_end - t)
        h = remaining / math.ceil(remaining / h - 1e-9)
        try:
            if cfg.method == "rk4":
                y_new, err_ok = rk4_step(f, t, y, direction * h), True
            else:
                y_new, err = rkf45_step(f, t, y, direction * h)
                scale = max(cfg.abs_tol + cfg.rel_tol * max(abs(y[i]), abs(y_new[i]))
                            for i in range(2))
                ratio = max(abs(e) for e in err) / scale
                err_ok = ratio <= 1.0
        except (ZeroDivisionError, OverflowError):
            traj.termination = "pole_proximity"
            break
        if not err_ok:
            traj.rejected += 1
            h *= max(0.2, 0.9 * ratio ** -0.25) if math.isfinite(ratio) else 0.2
            if h < cfg.h_min:
                traj.termination = "step_underflow"
                if strict:
                    raise StepUnderflow(f"step below {cfg.h_min} at t = {t}")
                break
            continue
        t_new = t + direction * h
        if abs(t_end - t_new) < 1e-12 * max(1.0, abs(t_end)):
            t_new = t_end
        if _guard_tripped(guards, t_new, y_new, cfg):
            traj.termination = "pole_proximity"
            if strict:
                raise PoleProximity(f"guard tripped near t = {t_new}")
            break
        t, y = t_new, y_new
        samples.append(State(t, *y))
        traj.accepted += 1
        if cfg.method == "rkf45":
            grow = 5.0 if ratio == 0 else min(5.0, 0.9 * ratio ** -0.2)
            h = min(cfg.h_max, h * grow)
    return traj


# ---------------------------------------------------------------------------
# Hamiltonian and second-order front ends


def _bind(f: RatFunc, params: dict | None) -> RatFunc:
    f = as_ratfunc(f)
    vals = {k: as_ratfunc(v) for k, v in (params or {}).items() if k in f.variables}
    return f.subs_many(vals) if vals else f


def _numeric(v):
    from fractions import Fraction

    if isinstance(v, float):
        return Fraction(v).limit_denominator(10 ** 12) if v != int(v) else int(v)
    return v


def hamilton_field(H: RatFunc) -> tuple[RHS, list[HornerPoly]]:
    lam_dot = H.diff("mu")
    mu_dot = -H.diff("lam")
    fl = CompiledRatFunc(lam_dot, HAMILTON_VARS)
    fm = CompiledRatFunc(mu_dot, HAMILTON_VARS)
    return (lambda t, lam, mu: (fl(t, lam, mu), fm(t, lam, mu))), \
        denominator_guards([lam_dot, mu_dot, H], HAMILTON_VARS)


def integrate_hamiltonian(H: RatFunc, init: State, t_end: float,
                          cfg: IntegratorConfig | None = None, *, params: dict | None = None,
                          strict: bool = False) -> Trajectory:
    """dλ/dt = ∂H/∂μ, dμ/dt = -∂H/∂λ for an arbitrary H(t, λ, μ)."""
    cfg = cfg or IntegratorConfig()
    H = _bind(H, {k: _numeric(v) for k, v in (params or {}).items()})
    f, guards = hamilton_field(H)
    traj = integrate_system(f, init.t, (init.lam, init.mu), t_end, cfg, guards, strict=strict)
    traj.meta["hamiltonian"] = str(H)
    return traj


def integrate(type_: str, params: dict | None, init: State, t_end: float,
              cfg: IntegratorConfig | None = None, *, strict: bool = False) -> Trajectory:
    """Integrate the catalog Hamiltonian of a Painlevé type."""
    p = {k: _numeric(v) for k, v in (params or {}).items()}
    H = catalog_hamiltonian(type_, p)
    traj = integrate_hamiltonian(H, init, t_end, cfg, strict=strict)
    traj.meta.update({"type": type_, "params": {k: str(v) for k, v in p.items()}})
    return traj


def integrate_second_order(F: RatFunc, t0: float, lam0: float, lamp0: float, t_end: float,
                           cfg: IntegratorConfig | None = None) -> Trajectory:
    """λ'' = F(t, λ, λ') as a first-order pair; ``mu`` slots hold λ'."""
    cfg = cfg or IntegratorConfig()
    Fc = CompiledRatFunc(F, ODE_VARS)
    guards = denominator_guards([F], ODE_VARS)
    return integrate_system(lambda t, x, v: (v, Fc(t, x, v)), t0, (lam0, lamp0), t_end, cfg,
                            guards)


# ---------------------------------------------------------------------------
# diagnostics


def fd_derivatives(ts: Sequence[float], ys: Sequence[float], i: int) -> tuple[float, float]:
    """Three-point first and second derivatives on a non-uniform grid."""
    h1, h2 = ts[i] - ts[i - 1], ts[i + 1] - ts[i]
    y0, y1, y2 = ys[i - 1], ys[i], ys[i + 1]
    d1 = (-h2 / (h1 * (h1 + h2)) * y0 + (h2 - h1) / (h1 * h2) * y1
          + h1 / (h2 * (h1 + h2)) * y2)
    d2 = 2 * (y0 / (h1 * (h1 + h2)) - y1 / (h1 * h2) + y2 / (h2 * (h1 + h2)))
    return d1, d2


def residual_series(traj: Trajectory, F: RatFunc) -> list[float]:
    if len(traj.samples) < 5:
        raise TooFewSamples(f"{len(traj.samples)} samples; need at least 5")
    Fc = CompiledRatFunc(F, ODE_VARS)
    ts, ys = traj.times, traj.lams
    out = []
    for i in range(1, len(ts) - 1):
        d1, d2 = fd_derivatives(ts, ys, i)
        out.append(abs(d2 - Fc(ts[i], ys[i], d1)))
    return out


def residual_second_order(traj: Trajectory, entry) -> float:
    """max |λ''_num - F(t, λ, λ'_num)| over interior samples.

    ``entry`` is a catalog tag with ``traj.meta['params']``, a CatalogEntry, or
    the right-hand side F itself.
    """
    if isinstance(entry, str):
        params = {k: _parse_number(v) for k, v in traj.meta.get("params", {}).items()}
        F = catalog_ode(entry, params)
    elif isinstance(entry, RatFunc):
        F = entry
    else:
        F = entry.ode_rhs
    return max(residual_series(traj, F))


def _parse_number(text: str):
    from fractions import Fraction

    return Fraction(text)


def hamiltonian_drift(traj: Trajectory, H: RatFunc) -> list[float]:
    """H(t, λ, μ) along the samples (constant only for conserved H)."""
    Hc = CompiledRatFunc(H, HAMILTON_VARS)
    return [Hc(s.t, s.lam, s.mu) for s in traj.samples]


def max_drift(values: Sequence[float]) -> float:
    return max(abs(v - values[0]) for v in values)


def self_convergence_order(f: RHS, t0: float, y0: Vector, t_end: float, h: float) -> float:
    """log2 of the ratio of successive rk4 self-convergence errors at h, h/2, h/4."""
    finals = []
    for k in range(3):
        cfg = IntegratorConfig("rk4", h_init=h / 2 ** k, h_min=h / 2 ** k / 2, h_max=h)
        finals.append(integrate_system(f, t0, y0, t_end, cfg).final.lam)
    e1 = abs(finals[0] - finals[1])
    e2 = abs(finals[1] - finals[2])
    return math.log2(e1 / e2)


def energy_series(traj: Trajectory, H: RatFunc) -> list[float]:
    """E = fμ²/2 + gμ + h along the samples for H = m(t)(fμ²/2 + gμ + h)."""
    from .painleve_catalog import solve_quadrature

    red = solve_quadrature(H)
    K = red.conserved("lam", "mu")
    Kc = CompiledRatFunc(K, HAMILTON_VARS)
    return [Kc(s.t, s.lam, s.mu) for s in traj.samples]


def velocity(H: RatFunc, state: State) -> float:
    """λ' = ∂H/∂μ at a state, the matching initial datum for the second-order form."""
    return CompiledRatFunc(H.diff("mu"), HAMILTON_VARS)(state.t, state.lam, state.mu)
