"""Command-line entry point.

    risce run          --algo ce --seed 7
    risce sweep-iters  --algo ce,sa,mh,none --trials 500 --out fig2.csv
    risce sweep-n      --n 10,38,76,152,304 --algo ce,sa,mh,none --trials 500
    risce oracle-check --n 12 --seeds 100
    risce timing       --algo ce,sa,mh --trials 20

Every command first prints the fully resolved scenario (defaults, then the
scenario file, then flags) as INI text; that block parses back to the same
configuration. Exit status: 0 ok, 1 runtime error, 2 usage error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import config as cfg
from .channel import draw_realization
from .config import InvalidParameterError, Scenario
from .harness import (
    ELEMENT_COLUMNS,
    ITERATION_COLUMNS,
    TIMING_COLUMNS,
    TRACE_COLUMNS,
    TrialPlan,
    curves_json,
    export,
    metadata,
    remeasure,
    rows_to_csv,
    sweep_elements,
    sweep_iterations,
    trace_rows,
    trial_streams,
    wallclock_report,
)
from .objective import build_objective
from .optimizers import ALGORITHMS, EXHAUSTIVE_MAX_N, CeParams, ce_optimize, exhaustive, run_algorithm

CONFIG_END = "# --- end of resolved configuration ---"
ORACLE_MAX_N = 16


def _int_list(s: str) -> tuple[int, ...]:
    try:
        return tuple(int(v) for v in s.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {s!r}") from None


def _str_list(s: str) -> tuple[str, ...]:
    return tuple(v.strip() for v in s.split(",") if v.strip())


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--scenario", help=f"scenario file (relative paths also searched in ${cfg.SCENARIO_DIR_ENV})")
    common.add_argument("--algo", type=_str_list, help=f"comma-separated subset of {','.join(ALGORITHMS)}")
    common.add_argument("--n", type=_int_list, help="RIS element count(s)")
    common.add_argument("--T", type=int, help="CE iterations")
    common.add_argument("--K", type=int, help="CE samples per iteration")
    common.add_argument("--beta", type=float, help="CE elite fraction in (0, 1]")
    common.add_argument("--iters", type=int, help="SA/MH/random budget (default T*K)")
    common.add_argument("--T0", type=float, help="SA initial temperature (dB)")
    common.add_argument("--gamma", type=float, help="SA cooling factor in (0, 1)")
    common.add_argument("--temp", type=float, help="MH temperature (dB)")
    common.add_argument("--objective", help="simulated | recorded:PATH | noisy:STD [over recorded:PATH]")
    common.add_argument("--seed", type=int, help="master seed")
    common.add_argument("--trials", type=int, help="number of independent trials")
    common.add_argument("--workers", type=int, default=1, help="worker processes for trials")
    common.add_argument("--out", help="output file (default: stdout)")
    common.add_argument("--format", choices=("csv", "json"), default="csv")

    p = argparse.ArgumentParser(prog="risce", description="Cross-entropy RIS configuration laboratory")
    sub = p.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", parents=[common], help="one optimization on one channel draw")
    run.add_argument("--remeasure", type=int, default=0, metavar="R",
                     help="re-read the optimized configuration R times through the noisy wrapper")
    run.add_argument("--noise-std", type=float, default=0.0, help="measurement jitter (dB) for --remeasure")
    it = sub.add_parser("sweep-iters", parents=[common], help="best-so-far SNR vs evaluations")
    it.add_argument("--checkpoints", type=_int_list, help="evaluation counts (default: multiples of K)")
    sub.add_parser("sweep-n", parents=[common], help="statistics vs RIS element count")
    oc = sub.add_parser("oracle-check", parents=[common], help="CE against exhaustive search on small N")
    oc.add_argument("--seeds", type=int, default=100, help="number of CE seeds")
    oc.add_argument("--threshold", type=float, default=0.2, help="optimality gap counted as success (dB)")
    oc.add_argument("--force", action="store_true", help=f"allow N above {ORACLE_MAX_N}")
    sub.add_parser("timing", parents=[common], help="mean wall-clock seconds per optimizer run")
    return p


_OVERRIDES = [
    ("T", "optimizer.T"),
    ("K", "optimizer.K"),
    ("beta", "optimizer.beta"),
    ("iters", "optimizer.iters"),
    ("T0", "optimizer.T0"),
    ("gamma", "optimizer.gamma"),
    ("temp", "optimizer.temp"),
    ("objective", "objective.kind"),
    ("seed", "harness.seed"),
    ("trials", "harness.trials"),
    ("algo", "harness.algos"),
]


def resolve(args, parser: argparse.ArgumentParser) -> Scenario:
    """Defaults <- scenario file <- command-line overrides."""
    sc = Scenario()
    if args.scenario:
        path = cfg.resolve_path(args.scenario)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            parser.error(f"argument --scenario: cannot read {path}: {exc.strerror}")
        try:
            sc = cfg.loads(text)
        except InvalidParameterError as exc:
            parser.error(f"argument --scenario: {path}: {exc}")
    for flag, dotted in _OVERRIDES:
        value = getattr(args, flag)
        if value is None:
            continue
        try:
            sc = sc.replace(**{dotted: value})
        except InvalidParameterError as exc:
            parser.error(f"argument --{flag}: {exc}")
    if args.n is not None:
        try:
            if args.command == "sweep-n":
                sc = sc.replace(**{"harness.n_values": args.n})
            else:
                if len(args.n) != 1:
                    raise InvalidParameterError("this command takes a single N")
                sc = sc.replace(**{"ris.N": args.n[0]})
        except InvalidParameterError as exc:
            parser.error(f"argument --n: {exc}")
    if args.workers < 1:
        parser.error("argument --workers: must be >= 1")
    return sc


def _write(rows, columns, args, sc, extra=None, **meta) -> None:
    if args.out:
        export(rows, columns, args.out, args.format, metadata(sc, sc.harness.seed, **meta), extra)
        print(f"wrote {args.out}")
    elif args.format == "csv":
        sys.stdout.write(rows_to_csv(rows, columns))
    else:
        import json

        doc = {"metadata": metadata(sc, sc.harness.seed, **meta), "rows": rows, **(extra or {})}
        print(json.dumps(doc, indent=2))


def cmd_run(args, sc: Scenario, parser) -> int:
    algo = sc.harness.algos[0]
    if args.remeasure < 0:
        parser.error("argument --remeasure: must be >= 0")
    ch_rng, opt_rng, noise_rng = trial_streams(sc.harness.seed, 0)
    real = draw_realization(sc, ch_rng)
    if algo == "none":
        real = real.without_ris()
    obj = build_objective(sc.objective.kind, real, rng=noise_rng)
    res = run_algorithm(algo, obj, sc.optimizer, opt_rng)
    print(f"algorithm      {res.algo}")
    print(f"N              {obj.dimension()}")
    print(f"snr_db         {res.snr_db:.4f}")
    print(f"best_snr_db    {res.best_snr_db:.4f}")
    print(f"evaluations    {res.evaluations}")
    print(f"termination    {res.reason}")
    if args.remeasure:
        st = remeasure(res, obj, args.noise_std, args.remeasure, noise_rng)
        print(f"remeasured     mean {st.mean_db:.4f} dB, q10 {st.q10_db:.4f}, q90 {st.q90_db:.4f}, "
              f"ratio {st.ratio:.3e} over {st.count} reads")
    _write(trace_rows(res), TRACE_COLUMNS, args, sc, algo=algo)
    return 0


def cmd_sweep_iters(args, sc: Scenario, parser) -> int:
    plan = TrialPlan.from_scenario(sc, workers=args.workers)
    try:
        sweep = sweep_iterations(plan, args.checkpoints)
    except InvalidParameterError as exc:
        parser.error(f"argument --checkpoints: {exc}")
    _write(sweep.rows, ITERATION_COLUMNS, args, sc, kind="sweep_iterations")
    return 0


def cmd_sweep_n(args, sc: Scenario, parser) -> int:
    plan = TrialPlan.from_scenario(sc, n_values=sc.harness.n_values, workers=args.workers)
    sweep = sweep_elements(plan)
    _write(sweep.rows, ELEMENT_COLUMNS, args, sc, extra=curves_json(sweep.curves, plan.n_values),
           kind="sweep_elements")
    return 0


def oracle_check(sc: Scenario, seeds: int, threshold: float = 0.2):
    """Exhaustive optimum of one seeded channel versus CE over ``seeds`` independent CE runs.

    Returns (optimum_db, list of CE results, success fraction).
    """
    n = sc.ris.N
    ch_rng, _, _ = trial_streams(sc.harness.seed, 0)
    real = draw_realization(sc, ch_rng)
    opt = exhaustive(build_objective("simulated", real))
    params = CeParams(sc.optimizer.T, sc.optimizer.K, sc.optimizer.beta)
    results = []
    for s in range(seeds):
        rng = np.random.default_rng(np.random.SeedSequence([sc.harness.seed, 1, s]))
        results.append(ce_optimize(build_objective("simulated", real), params, rng))
    hits = sum(opt.snr_db - r.snr_db <= threshold for r in results)
    return opt.snr_db, results, hits / max(1, seeds)


def cmd_oracle_check(args, sc: Scenario, parser) -> int:
    n = sc.ris.N
    limit = EXHAUSTIVE_MAX_N if args.force else ORACLE_MAX_N
    if n > limit:
        parser.error(f"argument --n: N={n} exceeds the oracle limit {limit}"
                     + ("" if args.force else " (use --force up to %d)" % EXHAUSTIVE_MAX_N))
    optimum, results, frac = oracle_check(sc, args.seeds, args.threshold)
    rows = [dict(seed=s, ce_db=r.snr_db, optimum_db=optimum, gap_db=optimum - r.snr_db,
                 success=int(optimum - r.snr_db <= args.threshold)) for s, r in enumerate(results)]
    cols = ("seed", "ce_db", "optimum_db", "gap_db", "success")
    if args.out:
        export(rows, cols, args.out, args.format, metadata(sc, sc.harness.seed, kind="oracle_check"))
    print(f"oracle-check N={n} seeds={args.seeds} optimum={optimum:.4f} dB "
          f"success_fraction={frac:.3f} threshold={args.threshold} dB")
    return 0


def cmd_timing(args, sc: Scenario, parser) -> int:
    plan = TrialPlan.from_scenario(sc)
    rows = [vars(r) for r in wallclock_report(plan)]
    _write(rows, TIMING_COLUMNS, args, sc, kind="timing")
    return 0


COMMANDS = {
    "run": cmd_run,
    "sweep-iters": cmd_sweep_iters,
    "sweep-n": cmd_sweep_n,
    "oracle-check": cmd_oracle_check,
    "timing": cmd_timing,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    sc = resolve(args, parser)
    sys.stdout.write(sc.to_text())
    print(CONFIG_END)
    sys.stdout.flush()
    try:
        return COMMANDS[args.command](args, sc, parser)
    except SystemExit:
        raise
    except Exception as exc:
        print(f"risce: error: {exc}", file=sys.stderr)
        return 1


def parse_config_block(stdout: str) -> Scenario:
    """Recover the resolved configuration printed at the top of a CLI run."""
    return cfg.loads(stdout.split(CONFIG_END, 1)[0])
