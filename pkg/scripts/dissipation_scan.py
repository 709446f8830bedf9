#!/usr/bin/env python3
"""Map the absorption spectrum against the bath dissipation rate.

Produces the F(gamma, omega) data grid for one aggregate: strong dissipation
shows a single electronic peak, weak dissipation a resolved vibronic ladder.

Example:
    python scripts/dissipation_scan.py --n 2 --coupling 1.0 --out data/dimer
"""

import argparse
from pathlib import Path

import numpy as np

from vibrospec import System, SweepPlan, sweep_parameter
from vibrospec.spectrum import sweep_from_rows


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=2)
    ap.add_argument("--geometry", choices=["linear", "ring"], default="linear")
    ap.add_argument("--coupling", type=float, default=1.0)
    ap.add_argument("--g", type=float, default=1.0)
    ap.add_argument("--gamma-min", type=float, default=0.01)
    ap.add_argument("--gamma-max", type=float, default=10.0)
    ap.add_argument("--gamma-points", type=int, default=60)
    ap.add_argument("--omega-points", type=int, default=400)
    ap.add_argument("--e-max", type=int, default=12)
    ap.add_argument("--epsilon", type=float, default=0.01)
    ap.add_argument("--out", default="data/dissipation_scan")
    args = ap.parse_args()

    gammas = np.geomspace(args.gamma_min, args.gamma_max, args.gamma_points)
    system = System.uniform(
        args.n, geometry=args.geometry, coupling=args.coupling, g=args.g, gamma=1.0
    )
    plan = SweepPlan(
        omega_grid=np.linspace(-4.0, 6.0, args.omega_points),
        epsilon=args.epsilon,
        e_max=args.e_max,
        parameter_axis=("gamma", tuple(gammas)),
    )
    rows = sweep_parameter(system, plan)
    result = sweep_from_rows(rows, gammas, system.aggregate.dipoles,
                             {"numerics": {"epsilon": args.epsilon}})

    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    path = out.with_suffix(".csv")
    with open(path, "w") as fh:
        fh.write("gamma,omega,F\n")
        for gamma, row in zip(result.axis_values, result.f):
            for w, f in zip(result.omega, row):
                fh.write(f"{gamma!r},{w!r},{f!r}\n")
    print(f"wrote {path} ({args.gamma_points} x {args.omega_points} points)")


if __name__ == "__main__":
    main()
