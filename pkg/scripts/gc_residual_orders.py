#!/usr/bin/env python3
"""Measure the mesh-order of the discrete Gauss-Codazzi residuals.

On the sphere the dropped correction terms are visible: the two Codazzi
balances are first order, and the curvature balance becomes second order
only after subtracting its explicit first-order star-factor term
(see quantities.GCResiduals).  On the cylinder all residuals vanish to
(amplified) round-off because the grown surface is exactly symmetric.

Growth amplifies non-smooth perturbations geometrically per row, so
pushing eps much below 0.025 at h = 0.3 drowns the measurement in
amplified round-off; the default meshes stay in the clean regime.

    python scripts/gc_residual_orders.py
"""

import numpy as np

from isogrow.bjorling import builtin_bjorling, derive_cauchy_data, sample_initial_strip
from isogrow.growth import grow
from isogrow.quantities import extract, gc_residuals

EPS_LIST = [0.1, 0.05, 0.025]


def main():
    for name in ("sphere_mercator", "cylinder"):
        data = builtin_bjorling(name, r=1.0)
        cd = derive_cauchy_data(data)
        rows = []
        for eps in EPS_LIST:
            res = grow(sample_initial_strip(cd, data, eps), 0.3)
            gc = gc_residuals(extract(res.surface))
            rows.append((eps, gc.r_gd1, gc.r_gd1a, gc.r_gd2, gc.r_gd2_refined, gc.r_gd3))
        print(f"\n{name}")
        print("  eps       gd1        gd1a       gd2        gd2(corr)  gd3")
        for row in rows:
            print("  " + "  ".join(f"{v:<9.2e}" for v in row))
        if name == "sphere_mercator":
            logs = np.log(EPS_LIST)
            for label, col in (("gd1a", 2), ("gd2", 3), ("gd2(corr)", 4), ("gd3", 5)):
                vals = [r[col] for r in rows]
                order = np.polyfit(logs, np.log(vals), 1)[0]
                print(f"  order {label}: {order:.3f}")


if __name__ == "__main__":
    main()
