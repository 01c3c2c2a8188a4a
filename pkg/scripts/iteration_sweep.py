#!/usr/bin/env python3
"""Best-so-far SNR against evaluations for CE, SA, MH and the no-RIS baseline.

Writes results/iterations.csv (plot-ready) and prints the table.
"""
import argparse
from pathlib import Path

from risce.config import Scenario, load
from risce.harness import ITERATION_COLUMNS, TrialPlan, export, metadata, rows_to_csv, sweep_iterations

p = argparse.ArgumentParser(description=__doc__)
p.add_argument("--scenario")
p.add_argument("--trials", type=int, default=500)
p.add_argument("--seed", type=int, default=0)
p.add_argument("--workers", type=int, default=1)
p.add_argument("--out", default="results/iterations.csv")
args = p.parse_args()

sc = load(args.scenario) if args.scenario else Scenario()
plan = TrialPlan(sc, ("ce", "sa", "mh", "none"), (sc.ris.N,), args.trials, args.seed, args.workers)
sweep = sweep_iterations(plan)
Path(args.out).parent.mkdir(parents=True, exist_ok=True)
export(sweep.rows, ITERATION_COLUMNS, args.out, "csv", metadata(sc, args.seed))
print(rows_to_csv(sweep.rows, ITERATION_COLUMNS), end="")
