#!/usr/bin/env python3
"""Print the phase structure of the damped dimer across the transition.

For a ladder of damping strengths: the relaxation spectrum and regime,
the fixed-point skeleton of the angular flow with classifications, and
the pole-connectivity verdict.  A quick sanity run of the package's
analysis layer; takes a few seconds.
"""

import argparse

import numpy as np

from dimer_dpt.analysis import disconnection_test, find_fixed_points, linear_spectrum
from dimer_dpt.flows import angular_field


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--J", type=float, default=1.0)
    ap.add_argument(
        "--gammas", type=float, nargs="+", default=[0.5, 1.0, 1.9, 2.0, 2.1, 3.0, 5.0]
    )
    args = ap.parse_args()

    for gamma in args.gammas:
        spec = linear_spectrum(args.J, gamma)
        eigs = ", ".join(f"{e:.3f}" for e in spec.eigenvalues)
        recs = find_fixed_points(lambda n, g=gamma: angular_field(n, args.J, g))
        verdict, max_nz = disconnection_test(
            lambda n, g=gamma: angular_field(n, args.J, g), horizon=500.0 / args.J
        )
        print(f"gamma/J = {gamma / args.J:g}  [{spec.regime}]")
        print(f"  relaxation rates: {eigs}")
        print(f"  fixed points ({len(recs)}):")
        for r in recs:
            loc = np.round(r.location, 4)
            print(f"    {r.classification:9s} at {loc}  (n_y n_z = {loc[1] * loc[2]:+.4f})")
        print(f"  pole-to-pole transport: {verdict} (max n_z = {max_nz:+.3f})")
        print()


if __name__ == "__main__":
    main()
