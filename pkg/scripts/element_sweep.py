#!/usr/bin/env python3
"""Mean SNR, 10%/90% quantiles and variance/mean^2 against the RIS element count.

Writes results/elements.json with the N^2 and scaled-1/N reference curves
anchored at the largest N, plus results/elements.csv.
"""
import argparse
from pathlib import Path

from risce.config import Scenario, load
from risce.harness import ELEMENT_COLUMNS, TrialPlan, curves_json, export, metadata, rows_to_csv, sweep_elements

p = argparse.ArgumentParser(description=__doc__)
p.add_argument("--scenario")
p.add_argument("--n", default="10,38,76,152,304")
p.add_argument("--trials", type=int, default=500)
p.add_argument("--seed", type=int, default=0)
p.add_argument("--workers", type=int, default=1)
p.add_argument("--outdir", default="results")
args = p.parse_args()

sc = load(args.scenario) if args.scenario else Scenario()
n_values = tuple(int(v) for v in args.n.split(","))
plan = TrialPlan(sc, ("ce", "sa", "mh", "none"), n_values, args.trials, args.seed, args.workers)
sweep = sweep_elements(plan)
out = Path(args.outdir)
out.mkdir(parents=True, exist_ok=True)
meta = metadata(sc, args.seed)
export(sweep.rows, ELEMENT_COLUMNS, out / "elements.csv", "csv", meta)
export(sweep.rows, ELEMENT_COLUMNS, out / "elements.json", "json", meta, curves_json(sweep.curves, n_values))
print(rows_to_csv(sweep.rows, ELEMENT_COLUMNS), end="")
for c in sweep.curves:
    print(c.kind, [round(float(c(n)), 6) for n in n_values])
