#!/usr/bin/env python3
"""Check the two factors in the mean execution-gap bound C |pi| ||lam||^2.

The exact mean gap (the trace of the per-cell quadratic form, no Monte
Carlo) is tabulated on a grid of mesh counts and policy-noise scales for the
default benchmark model, executed with the learner's initial policy.  Two
fits summarise the table: the slope in the mesh width at each noise scale
(should sit near 1) and the slope in the noise scale at each mesh (should
sit near 2, since the gap is quadratic in lam).  Everything is deterministic
and runs in a couple of seconds.
"""

import argparse
import csv
import sys

import numpy as np

from lqrl.dynamics import mean_execution_gap
from lqrl.learner import loglog_slope
from lqrl.model import Constant, GeneralLqModel, Sampled, TimeGrid
from lqrl.policy import GaussianPolicy, exploratory_policy
from lqrl.cli import load_setup


def scaled(lam, s):
    if isinstance(lam, Sampled):
        return Sampled(lam.values * s, lam.T)
    return Constant(lam.value * s)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--config", help="flat key = value configuration file")
    ap.add_argument("--out", default="gap_scaling.csv")
    ap.add_argument("--meshes", default="8,16,32,64,128,256")
    ap.add_argument("--scales", default="0.5,0.707,1.0,1.414,2.0")
    args = ap.parse_args()

    setup = load_setup(args)
    model = setup.model
    theta0 = setup.box.clip(setup.prior.theta0.A, setup.prior.theta0.B)
    from lqrl.riccati import solve_riccati

    sol = solve_riccati(theta0, model.cost, TimeGrid(model.T, setup.exec_steps))
    base = exploratory_policy(sol.gains(), setup.rho0, model.cost)
    gm = GeneralLqModel.embed(model)

    meshes = [int(v) for v in args.meshes.split(",")]
    scales = [float(v) for v in args.scales.split(",")]
    table = np.empty((len(scales), len(meshes)))
    for i, s in enumerate(scales):
        pol = GaussianPolicy(base.k, base.K, scaled(base.lam, s))
        for j, n in enumerate(meshes):
            table[i, j] = mean_execution_gap(gm, pol, TimeGrid(model.T, n))

    with open(args.out, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["lam_scale", "mesh_n", "mean_gap"])
        for i, s in enumerate(scales):
            for j, n in enumerate(meshes):
                w.writerow([repr(float(s)), n, repr(float(table[i, j]))])

    widths = model.T / np.array(meshes, dtype=float)
    print(f"{'lam scale':>10} | mesh-width slope")
    for i, s in enumerate(scales):
        sl = loglog_slope(widths, np.abs(table[i]))
        print(f"{s:10.3f} | {sl:6.3f}")
    print(f"{'mesh n':>10} | noise-scale slope")
    for j, n in enumerate(meshes):
        sl = loglog_slope(scales, np.abs(table[:, j]))
        print(f"{n:10d} | {sl:6.3f}")
    print(f"table written to {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
