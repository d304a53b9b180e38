"""Integrate Painlevé I and II and compare the Hamilton and second-order routes."""

import argparse

from heunpainleve.numerics import (IntegratorConfig, State, integrate, integrate_second_order,
                                   residual_second_order, velocity)
from heunpainleve.painleve_catalog import catalog_hamiltonian, catalog_ode


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--t-end", type=float, default=1.0)
    ap.add_argument("--h-max", type=float, default=1e-3)
    ap.add_argument("--csv", default=None, help="write the type II trajectory here")
    args = ap.parse_args()
    cfg = IntegratorConfig(h_init=min(args.h_max, 1e-3), h_max=args.h_max)
    for tag, params in (("I", {}), ("II", {"alpha": 1})):
        init = State(0.0, 0.3, -0.2)
        traj = integrate(tag, params, init, args.t_end, cfg)
        H = catalog_hamiltonian(tag, params)
        direct = integrate_second_order(catalog_ode(tag, params), init.t, init.lam,
                                        velocity(H, init), args.t_end, cfg)
        print(f"{tag:3} {traj.termination:15} steps {traj.accepted:6} "
              f"lambda({traj.final.t:g}) = {traj.final.lam:.12f} "
              f"residual {residual_second_order(traj, tag):.1e} "
              f"route gap {abs(traj.final.lam - direct.final.lam):.1e}")
        if args.csv and tag == "II":
            with open(args.csv, "w", encoding="utf-8") as fh:
                fh.write(traj.to_csv())


if __name__ == "__main__":
    main()
