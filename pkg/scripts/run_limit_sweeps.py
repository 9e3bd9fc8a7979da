#!/usr/bin/env python3
"""Run the three degeneration sweeps and print their reports.

Catenoid side (lam -> 0), helicoid side (lam -> infinity), and the
spacing-normalized plane experiment; each row lists the family parameter,
the sup deviation from the limit reference on the clipped annulus image,
and the vertical end spacing.
"""

import argparse

from riemann_examples.limits import (
    Annulus,
    ClipRegion,
    catenoid_limit_sweep,
    helicoid_limit_sweep,
    plane_limit_experiment,
)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--annulus-L", type=float, default=10.0)
    ap.add_argument("--clip-r", type=float, default=5.0)
    args = ap.parse_args()

    annulus = Annulus(L=args.annulus_L, n_rad=24, n_ang=48)
    clip = ClipRegion("ball", args.clip_r)

    print("== catenoid limit (lam -> 0) ==")
    rep = catenoid_limit_sweep([0.1, 0.01, 0.001], annulus, clip)
    for lv, dev, sp in zip(rep.lambdas, rep.deviations, rep.extras["end_spacing"]):
        print(f"  lam={lv:<8g} deviation={dev:<12.6f} end_spacing={sp:.6f}")

    print("== helicoid limit (lam -> infinity) ==")
    rep = helicoid_limit_sweep([10.0, 100.0, 1000.0], annulus, clip)
    for lv, dev, sp in zip(rep.lambdas, rep.deviations, rep.extras["end_spacing"]):
        print(f"  lam={lv:<8g} deviation={dev:<12.6f} end_spacing={sp:.6f}")

    print("== plane experiment (fixed 2*pi spacing, lam -> 0) ==")
    rep = plane_limit_experiment([0.1, 0.03, 0.01])
    for lv, dev, waist in zip(rep.lambdas, rep.plane_deviations, rep.waist_radii):
        print(f"  lam={lv:<8g} plane_deviation={dev:<12.6f} waist_radius={waist:.3f}")


if __name__ == "__main__":
    main()
