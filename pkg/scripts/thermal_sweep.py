#!/usr/bin/env python3
"""Sweep the classical diffusion and watch the hybrid state turn thermal.

At each diffusion value the stationary hybrid moments are compared with the
Gibbs state at the effective temperature D/(2 alpha); the normalised
deviation falls like 1/D^2 while the occupation number crosses over from the
zero-point floor 1/2 to classical equipartition T/omega.
"""

import argparse

import numpy as np

from hybridosc import CQParams, occupation_number, thermal_limit


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--coupling", type=float, default=0.1)
    parser.add_argument("--d-min", type=float, default=0.3)
    parser.add_argument("--d-max", type=float, default=1e4)
    parser.add_argument("--points", type=int, default=12)
    args = parser.parse_args()

    print(f"{'D':>10} {'T_C':>10} {'N':>12} {'Gibbs deviation':>16}")
    for diffusion in np.geomspace(args.d_min, args.d_max, args.points):
        cq = CQParams(
            classical_mass=1.0,
            classical_spring=1.0,
            damping=1.0,
            diffusion=float(diffusion),
            quantum_mass=1.0,
            quantum_spring=1.0,
            coupling=args.coupling,
        )
        occ = occupation_number(cq)
        report = thermal_limit(cq)
        print(
            f"{diffusion:10.3g} {occ.temperature:10.3g} {occ.n:12.5g} "
            f"{report.max_deviation_gibbs:16.3e}"
        )


if __name__ == "__main__":
    main()
