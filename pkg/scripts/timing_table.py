#!/usr/bin/env python3
"""Mean wall-clock time of one complete CE / SA / MH run (N=304, 1500 evaluations)."""
import argparse

from risce.config import Scenario
from risce.harness import TrialPlan, wallclock_report

p = argparse.ArgumentParser(description=__doc__)
p.add_argument("--n", type=int, default=304)
p.add_argument("--trials", type=int, default=20)
p.add_argument("--seed", type=int, default=0)
args = p.parse_args()

sc = Scenario().replace(**{"ris.N": args.n})
for row in wallclock_report(TrialPlan(sc, ("ce", "sa", "mh"), (args.n,), args.trials, args.seed)):
    print(f"{row.algo:4s} {row.mean_seconds:.4f} s  ({row.n_runs} runs, {row.complexity})")
