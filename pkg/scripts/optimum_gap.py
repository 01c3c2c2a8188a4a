#!/usr/bin/env python3
"""Distance of CE, SA and MH to the exact single-antenna optimum at large N.

With one BS antenna the SNR is |d + sum_i s_i c_i|^2 with s_i = +-1, so the
optimum is s_i = sign(Re(c_i e^{-j phi})) for some phi; only the 2N angles where
a sign changes need checking. This makes the gap measurable at N=304, where
exhaustive search is out of reach.
"""
import argparse

import numpy as np

from risce.channel import draw_realization, lin_to_db
from risce.config import Scenario
from risce.harness import TrialPlan, run_trials, statistics, trial_streams


def exact_optimum_db(real) -> float:
    if real.M != 1:
        raise ValueError("the angular sweep needs a single BS antenna")
    d = complex(real.h_bu[0])
    c = real.cascaded[0]
    crit = np.angle(c)[:, None] + np.array([np.pi / 2, -np.pi / 2])
    # midpoints between consecutive sign changes cover every reachable pattern
    phis = np.sort(np.mod(crit.ravel(), 2 * np.pi))
    mids = (phis + np.roll(phis, -1) + np.where(np.arange(phis.size) == phis.size - 1, 2 * np.pi, 0)) / 2
    s = np.sign(np.real(c[None, :] * np.exp(-1j * mids[:, None])))
    gain = np.abs(d + s @ c) ** 2
    return float(lin_to_db(real.snr_scale * gain.max()))


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--n", type=int, default=304)
    p.add_argument("--trials", type=int, default=50)
    p.add_argument("--seed", type=int, default=2024)
    p.add_argument("--kappa", type=float, default=None, help="override both Ricean factors")
    args = p.parse_args()

    sc = Scenario().replace(**{"ris.N": args.n})
    if args.kappa is not None:
        sc = sc.replace(**{"bu.kappa": args.kappa, "ru.kappa": args.kappa})
    recs = run_trials(TrialPlan(sc, ("ce", "sa", "mh"), (args.n,), args.trials, args.seed))
    opt = [exact_optimum_db(draw_realization(sc, trial_streams(args.seed, t)[0], args.n)) for t in range(args.trials)]
    print(f"exact optimum  mean {statistics(opt).mean_db:8.3f} dB")
    for algo in ("ce", "sa", "mh"):
        vals = [r.snr_db for r in recs if r.algo == algo]
        gap = np.mean(np.asarray(opt) - np.asarray(vals))
        print(f"{algo:14s} mean {statistics(vals).mean_db:8.3f} dB  mean gap to optimum {gap:6.3f} dB")


if __name__ == "__main__":
    main()
