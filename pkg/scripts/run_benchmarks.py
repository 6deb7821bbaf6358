#!/usr/bin/env python3
"""Reproduce the full benchmark suite in one go.

Runs every CLI experiment with plots enabled: the Riccati self-test with its
step-size sweep, the repeated-execution bias study, the execution-gap mesh
law, and the 50-seed learning ensembles for both algorithm variants.  With
--quick the expensive pieces are scaled down (fewer draws, seeds and
episodes) so the whole thing finishes in well under a minute; the full run
takes a few minutes, dominated by the two ensembles.

Results land under --out (default: benchmark_results/), one CSV per table
and one SVG per figure, regenerable later with `lqrl replot --out DIR`.
"""

import argparse
import sys
import time

from lqrl.cli import main as lqrl_main


def run(argv):
    print(f"$ lqrl {' '.join(argv)}", flush=True)
    t0 = time.perf_counter()
    code = lqrl_main(argv)
    print(f"  -> exit {code} in {time.perf_counter() - t0:.1f} s", flush=True)
    return code


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="benchmark_results")
    ap.add_argument("--quick", action="store_true", help="scaled-down pass")
    ap.add_argument("--parallel", type=int, default=1, help="workers for the ensembles")
    args = ap.parse_args()

    draws = "5000" if args.quick else "100000"
    agents = "10000" if args.quick else "100000"
    episodes = "200" if args.quick else "2000"
    runs = "10" if args.quick else "50"

    jobs = [
        ["riccati-check", "--dt-sweep", "--plot", "--out", args.out],
        ["repetition-bias", "--agents", agents, "--plot", "--out", args.out],
        ["execution-gap", "--draws", draws, "--plot", "--out", args.out],
        ["run-alg1", "--episodes", episodes, "--runs", runs,
         "--parallel", str(args.parallel), "--plot", "--out", args.out],
        ["run-alg2", "--episodes", episodes, "--runs", runs,
         "--parallel", str(args.parallel), "--plot", "--out", args.out],
    ]
    failures = 0
    for argv in jobs:
        code = run(argv)
        if code != 0:
            failures += 1
            if args.quick and argv[0] == "execution-gap":
                # few draws make the fitted slopes noisy; the CSV is still written
                print("  (slope gate is expected to be unreliable under --quick)")
    print(f"done: {len(jobs) - failures}/{len(jobs)} experiments clean, output in {args.out}/")
    return 1 if failures and not args.quick else 0


if __name__ == "__main__":
    sys.exit(main())
